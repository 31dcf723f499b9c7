#include "heapstone/io.hpp"
#include "selftest.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <iostream>
#include <random>

using namespace heapstone;
using json = nlohmann::json;

namespace {

enum Exit { kOk = 0, kEmpty = 1, kUnstable = 2, kInput = 3, kInvariant = 4 };

struct Options {
    std::string format = "text";
    unsigned seed = 1;
};

bool json_out(const Options& o) { return o.format == "json-like"; }

FGAbelianGroup parse_group(const std::string& s)
{
    io::Reader r("<--group>");
    return r.group(io::parse_document("heapstone-v1\n" + s, "<--group>"));
}

int cmd_cohomology(const Options& o, const std::string& file, const std::string& group, int degree,
                   const std::string& relative)
{
    FiniteSSet x = io::read_sset(file);
    FGAbelianGroup pi = parse_group(group);
    Subcomplex a = Subcomplex::empty(x);
    if (!relative.empty()) {
        io::Reader r("<--relative>");
        a = r.subcomplex(x, io::parse_document("heapstone-v1\n" + relative, "<--relative>"));
    }
    std::string type = "0";
    if (degree >= 0 && degree <= x.dim()) type = RelativeComplex(x, a).cohomology(degree, pi)->group().type_string();
    if (json_out(o))
        std::cout << json{{"degree", degree}, {"group", pi.type_string()}, {"cohomology", type}}.dump() << "\n";
    else
        std::cout << type << "\n";
    return kOk;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct RouteRun {
    ClassSet set;
    double seconds = 0;
};

void warn_fallback(const WeakMalcev& w, const Tower& t)
{
    for (int l = 1; l <= t.height(); ++l)
        if (!w.natural(l))
            std::cerr << "warning: stage " << l << " uses the solved corrector; its classes are checked only on queried cells\n";
}

std::string heap_line(const ClassSet& s)
{
    if (s.heap.is_empty()) return "heap: EMPTY (" + s.certificate.to_string() + ")";
    return "heap: " + s.heap.to_string();
}

json heap_json(const ClassSet& s, double secs)
{
    json j{{"heap", s.heap.is_empty() ? "EMPTY" : s.heap.to_string()}, {"seconds", secs}, {"levels", s.level}};
    if (s.heap.is_empty()) {
        j["certificate"] = s.certificate.to_string();
    } else {
        auto c = s.heap.cardinality();
        j["cardinality"] = c ? json(to_string(*c)) : json("infinite");
        j["pointed_type"] = s.heap.difference_subgroup().group.type_string();
    }
    return j;
}

int cmd_compute_classes(const Options& o, const std::string& job_file, const std::string& tower_file,
                        const std::string& route, int max_stage)
{
    io::Job job = io::read_job(job_file);
    std::filesystem::path tp = tower_file.empty() ? job.tower_path : std::filesystem::path(tower_file);
    if (tp.empty()) throw io::ParseError(job_file, 0, "no tower file given");
    io::TowerFile tf = io::read_tower(tp);
    auto cut = [&](std::shared_ptr<Tower> t) {
        if (max_stage > 0 && t && max_stage < t->height()) return std::make_shared<Tower>(t->truncated(max_stage));
        return t;
    };
    std::shared_ptr<Tower> t = cut(tf.tower), sigma = cut(tf.suspension);
    std::mt19937 rng(o.seed);
    t->spot_check(rng);
    LiftingProblem p = io::make_job_problem(job, *t, job_file);

    bool main = route != "suspension", susp = route != "main";

    json out;
    std::optional<RouteRun> a, b;
    WeakMalcev w(*t);
    if (main) {
        auto t0 = std::chrono::steady_clock::now();
        Engine e(*t, w, p, t->height());
        a = RouteRun{compute_classes(e), 0};
        a->seconds = seconds_since(t0);
        warn_fallback(w, *t);
    }
    std::optional<WeakMalcev> ws;
    if (susp && !(a && a->set.heap.is_empty())) {
        require_stable(p, *t);
        if (!sigma) throw io::ParseError(tp.string(), 0, "the suspension route needs a suspension tower");
        ws.emplace(*sigma);
        auto t0 = std::chrono::steady_clock::now();
        Engine e(*sigma, *ws, suspended_problem(p, *sigma), sigma->height(), EngineOptions{false, MalcevKind::Delta3});
        b = RouteRun{compute_classes(e), 0};
        b->seconds = seconds_since(t0);
        warn_fallback(*ws, *sigma);
    }

    int code = kOk;
    const ClassSet& shown = a ? a->set : b->set;
    if (shown.heap.is_empty()) code = kEmpty;
    std::optional<RouteComparison> cmp;
    if (a && b) {
        cmp = compare_routes(a->set, b->set);
        if (!cmp->agree) code = kInvariant;
    }
    auto v = Validators::instance().snapshot();
    std::size_t violations = Validators::instance().total_violations();
    if (violations) code = kInvariant;

    if (json_out(o)) {
        if (a) out["main"] = heap_json(a->set, a->seconds);
        if (b) out["suspension"] = heap_json(b->set, b->seconds);
        if (cmp) out["routes_agree"] = cmp->agree;
        json checks = json::object();
        for (const auto& [kind, c] : v) checks[kind] = {{"checks", c.first}, {"violations", c.second}};
        out["validators"] = checks;
        out["exit"] = code;
        std::cout << out.dump(2) << "\n";
        return code;
    }
    std::cout << heap_line(shown) << "\n";
    if (a && b) {
        std::cout << "main route: " << a->set.heap.to_string() << " (" << a->seconds << " s)\n";
        std::cout << "suspension route: " << b->set.heap.to_string() << " (" << b->seconds << " s)\n";
        std::cout << (cmp->agree ? "routes agree" : "ROUTES DISAGREE") << "\n";
    } else if (b && !a) {
        std::cout << "suspension route (" << b->seconds << " s)\n";
    } else if (a && susp) {
        std::cout << "suspension route skipped: the heap is empty\n";
    }
    if (violations) std::cout << "validator violations: " << violations << "\n";
    return code;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Fibrewise homotopy classes of maps into Moore-Postnikov towers"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "json-like"}));
    app.add_option("--seed", o.seed, "Seed for randomized checks");

    auto* coh = app.add_subcommand("cohomology", "Relative cohomology of a simplicial set");
    std::string sset_file, group = "Z", relative;
    int degree = 0;
    coh->add_option("sset", sset_file, "Simplicial set file")->required();
    coh->add_option("--group", group, "Coefficients: Z, Z/n, Z^r or group { ... }");
    coh->add_option("--degree", degree, "Degree")->required();
    coh->add_option("--relative", relative, "Subcomplex: a list of [dim, id] generators");

    auto* cc = app.add_subcommand("compute-classes", "Compute the heap of homotopy classes for a job");
    std::string job_file, tower_file, route = "main";
    int max_stage = 0;
    cc->add_option("job", job_file, "Problem file")->required();
    cc->add_option("tower", tower_file, "Tower file (defaults to the job's)");
    cc->add_option("--route", route, "main, suspension or both")->check(CLI::IsMember({"main", "suspension", "both"}));
    cc->add_option("--max-stage", max_stage, "Use only the first stages of the tower");

    auto* st = app.add_subcommand("selftest", "Run the invariant suites");
    std::string data_dir = HEAPSTONE_DATA_DIR;
    st->add_option("--data", data_dir, "Data directory");

    for (auto* s : {coh, cc, st}) {
        s->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "json-like"}));
        s->add_option("--seed", o.seed, "Seed for randomized checks");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int r = app.exit(e);
        return r == 0 ? kOk : kInput;
    }

    try {
        if (*coh) return cmd_cohomology(o, sset_file, group, degree, relative);
        if (*cc) return cmd_compute_classes(o, job_file, tower_file, route, max_stage);
        if (*st) return run_selftest(data_dir, o.seed, std::cout);
    } catch (const StabilityError& e) {
        std::cout << "refused: " << e.report.message() << "\n";
        return kUnstable;
    } catch (const io::ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kInput;
    } catch (const InvariantViolation& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return kInvariant;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kInput;
    }
    return kOk;
}
