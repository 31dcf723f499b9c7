#include "selftest.hpp"

#include "heapstone/io.hpp"

#include <filesystem>
#include <functional>
#include <random>

using namespace heapstone;
namespace fs = std::filesystem;

namespace {

struct Runner {
    std::ostream& out;
    int passed = 0, failed = 0;
    bool parse_failure = false;

    void run(const std::string& name, const std::function<std::string()>& f)
    {
        std::string err;
        try {
            err = f();
        } catch (const io::ParseError& e) {
            err = e.what();
            parse_failure = true;
        } catch (const std::exception& e) {
            err = e.what();
        }
        if (err.empty()) {
            ++passed;
            out << "pass  " << name << "\n";
        } else {
            ++failed;
            out << "FAIL  " << name << ": " << err << "\n";
        }
    }
};

std::string check_snf(std::mt19937& rng)
{
    std::uniform_int_distribution<int> dim(1, 5), entry(-6, 6);
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t r = dim(rng), c = dim(rng);
        IntMatrix a(r, c);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j) a(i, j) = entry(rng);
        SNFDecomposition d = smith_normal_form(a);
        if (!(d.U * d.S * d.V == a)) return "A != U S V for " + a.to_string();
        if (abs(d.U.determinant()) != 1 || abs(d.V.determinant()) != 1) return "transform not unimodular";
        auto f = d.invariant_factors();
        for (std::size_t i = 0; i + 1 < f.size(); ++i)
            if (f[i + 1] % f[i] != 0) return "divisibility chain broken";
    }
    return {};
}

std::string check_heap_axioms()
{
    std::vector<FGAbelianGroup> groups = {FGAbelianGroup::cyclic(2), FGAbelianGroup::cyclic(4),
                                          FGAbelianGroup::direct_sum(FGAbelianGroup::cyclic(2), FGAbelianGroup::cyclic(2)),
                                          FGAbelianGroup::cyclic(6)};
    for (const auto& g : groups) {
        auto el = g.enumerate();
        for (const auto& x : el)
            for (const auto& r : el)
                for (const auto& y : el) {
                    if (!(malcev(x, x, y) == y) || !(malcev(x, y, y) == x)) return "Mal'cev identities fail in " + g.type_string();
                    if (!(malcev(x, r, y) == malcev(y, r, x))) return "commutativity fails in " + g.type_string();
                    for (const auto& u : el)
                        for (const auto& v : el)
                            if (!(malcev(malcev(x, r, y), u, v) == malcev(x, r, malcev(y, u, v))))
                                return "associativity fails in " + g.type_string();
                }
    }
    return {};
}

}  // namespace

int run_selftest(const std::string& data_dir, unsigned seed, std::ostream& out)
{
    Runner t{out};
    std::mt19937 rng(seed);
    fs::path data(data_dir);

    t.run("integer Smith normal form on random matrices", [&] { return check_snf(rng); });
    t.run("heap axioms on small groups", check_heap_axioms);

    struct Coh {
        const char* file;
        int degree;
        const char* expect;
    };
    for (Coh c : {Coh{"s2.sset", 2, "Z"}, Coh{"s2_minimal.sset", 2, "Z"}, Coh{"rp2.sset", 2, "Z/2"},
                  Coh{"rp2.sset", 1, "0"}, Coh{"torus.sset", 1, "Z^2"}, Coh{"s4.sset", 4, "Z"}})
        t.run(std::string("H^") + std::to_string(c.degree) + "(" + c.file + "; Z) = " + c.expect, [&]() -> std::string {
            FiniteSSet x = io::read_sset(data / "sset" / c.file);
            std::string got = RelativeComplex(x, Subcomplex::empty(x)).cohomology(c.degree, FGAbelianGroup::integers())->group().type_string();
            return got == c.expect ? "" : "got " + got;
        });

    if (fs::is_directory(data / "sset"))
        for (const auto& e : fs::directory_iterator(data / "sset"))
            t.run("round trip " + e.path().filename().string(), [&]() -> std::string {
                FiniteSSet x = io::read_sset(e.path());
                if (!x.validate().empty()) return x.validate().front();
                io::Reader r(e.path());
                FiniteSSet y = io::parse_sset(io::parse_document(io::write_sset(x)), r);
                for (int d = 0; d <= std::max(x.dim(), y.dim()); ++d)
                    if (x.count(d) != y.count(d)) return "cell counts differ in dimension " + std::to_string(d);
                return x.euler_characteristic() == y.euler_characteristic() ? "" : "Euler characteristic differs";
            });

    if (fs::is_directory(data / "towers"))
        for (const auto& e : fs::directory_iterator(data / "towers"))
            t.run("k-invariants of " + e.path().filename().string() + " are cocycles", [&]() -> std::string {
                io::TowerFile tf = io::read_tower(e.path());
                tf.tower->spot_check(rng);
                if (tf.suspension) tf.suspension->spot_check(rng);
                return {};
            });

    if (fs::is_directory(data / "jobs"))
        for (const auto& e : fs::directory_iterator(data / "jobs"))
            t.run("job " + e.path().filename().string() + " parses", [&]() -> std::string {
                io::Job j = io::read_job(e.path());
                io::TowerFile tf = io::read_tower(j.tower_path);
                LiftingProblem p = io::make_job_problem(j, *tf.tower, e.path());
                return p.g.validate().empty() ? "" : "g is not simplicial";
            });

    t.run("corrector validators on the 3-sphere tower", [&]() -> std::string {
        io::TowerFile tf = io::read_tower(data / "towers" / "s3.tower");
        WeakMalcev w(*tf.tower);
        w.validate_random(2, 10, rng);
        return Validators::instance().total_violations() == 0 ? "" : "validator violations";
    });

    out << "selftest: " << t.passed << " passed, " << t.failed << " failed\n";
    if (t.failed == 0) return 0;
    return t.parse_failure ? 3 : 4;
}
