#pragma once

#include "heapstone/classes.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace heapstone::io {

/// Input error with the line it was found on (0 when not tied to a line).
class ParseError : public std::runtime_error {
public:
    ParseError(std::string file, int line, const std::string& what);
    std::string file;
    int line;
};

/// Parsed value of the shared text grammar:
///
///   value  := INT | STRING | NAME | NAME '/' INT | NAME '^' INT
///           | '[' values ']' | NAME? '{' (key ':' value)* '}' | NAME '(' values ')'
///
/// Entries and list items may be separated by commas or newlines; '#' starts
/// a comment.
struct Value {
    enum class Kind { Int, String, Name, List, Record, Call };
    Kind kind = Kind::Int;
    int line = 0;
    Integer integer;
    std::string text;  // STRING contents, NAME, or the record/call head
    std::vector<Value> items;  // list items, call arguments
    std::vector<std::pair<std::string, Value>> fields;

    const Value* find(const std::string& key) const;
    const Value& at(const std::string& key) const;
    bool is_name(const std::string& n) const { return kind == Kind::Name && text == n; }
};

/// Parses a whole file: header line `heapstone-v1`, then one value.
Value parse_document(const std::string& text, const std::string& file = "<input>");
Value read_document(const std::filesystem::path& p);

/// Resolves names and relative paths while interpreting one file.
class Reader {
public:
    explicit Reader(std::filesystem::path file);
    const std::string& file() const { return name_; }
    [[noreturn]] void fail(const Value& v, const std::string& what) const;

    Integer integer(const Value& v) const;
    int small_int(const Value& v) const;
    /// Z, Z/n, Z^r, 0, or group { gens: k, rels: [[...], ...] }. Structurally
    /// identical groups within one reader share a handle.
    FGAbelianGroup group(const Value& v);
    /// A file path (STRING) or point, simplex(n), boundary(n), product(a, b),
    /// suspension(a).
    FiniteSSet sset(const Value& v);
    /// empty, all, or a list of [dim, id] generators.
    Subcomplex subcomplex(const FiniteSSet& x, const Value& v) const;
    /// cochain { degree: d, pi: G, values: [[id, v], ...] } with v an INT or
    /// a coordinate list.
    Cochain cochain(const FiniteSSet& x, const Value& v);
    std::filesystem::path resolve(const Value& v) const;

private:
    std::filesystem::path dir_;
    std::string name_;
    std::map<std::string, FGAbelianGroup> groups_;
};

/// sset { vertices: k, d1: [faces...], d2: [...], ... } with each face an id
/// (nondegenerate) or [word, id] (degeneracy word, decreasing), or
/// sset { facets: [[v0, v1, ...], ...] }.
FiniteSSet parse_sset(const Value& v, Reader& r);
FiniteSSet read_sset(const std::filesystem::path& p);
std::string write_sset(const FiniteSSet& x);

/// A tower file, optionally naming the tower of the fibrewise suspension.
struct TowerFile {
    std::shared_ptr<Tower> tower;
    std::shared_ptr<Tower> suspension;
};
/// tower { base: <sset>, cochains: { name: cochain {...} }, stages: [
///   { n: 3, pi: Z, k: zero }, { n: 4, pi: Z/2, k: cup1(mod(2, c1), mod(2, c1)) } ],
///   suspension: "file" }
///
/// k expressions: zero, cJ (stage J), base(name), delta(e), mod(m, e),
/// cup(a, b), cup1(a, b), cupi(i, a, b), add(a, b, ...), neg(e), scale(k, e),
/// hom([[rows]], G, e).
TowerFile parse_tower(const Value& v, Reader& r);
TowerFile read_tower(const std::filesystem::path& p);

/// problem { X: <sset>, A: <subcomplex>, g: <map>, f: zero | [cochains],
///   tower: "file" }. Maps: constant(v), identity, projection(i) (X a
///   product), vertices([...]) (X and B given by facets).
struct Job {
    std::filesystem::path tower_path;  // empty if not given
    Value x, a, g, f;
};
Job read_job(const std::filesystem::path& p);
LiftingProblem make_job_problem(const Job& j, const Tower& t, const std::filesystem::path& job_file);

}  // namespace heapstone::io
