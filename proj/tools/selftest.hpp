#pragma once

#include <ostream>
#include <string>

/// Runs the invariant suites against the shipped data; prints one line per
/// check. Returns 0 when all pass, 3 when a data file fails to parse, 4
/// otherwise.
int run_selftest(const std::string& data_dir, unsigned seed, std::ostream& out);
