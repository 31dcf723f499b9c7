#include "heapstone/classes.hpp"

#include <algorithm>
#include <sstream>

namespace heapstone {

namespace {

bool same_map(const SimplicialMap& f, const SimplicialMap& g)
{
    if (!f.source().same_as(g.source()) || !f.target().same_as(g.target())) return false;
    const FiniteSSet& s = f.source();
    for (int d = 0; d <= s.dim(); ++d)
        for (std::size_t id = 0; id < s.count(d); ++id)
            if (!(f.image(d, id) == g.image(d, id))) return false;
    return true;
}

bool agree_on(const Subcomplex& a, const StageMap& f, const StageMap& g)
{
    if (f.level() != g.level() || !same_map(f.base, g.base)) return false;
    for (int j = 0; j < f.level(); ++j)
        if (!restrict_to(f.coords[j], a).equals(restrict_to(g.coords[j], a))) return false;
    return true;
}

Subcomplex where_first(const ProductSSet& p, const std::function<bool(const Simplex&)>& keep)
{
    return Subcomplex::from_predicate(p.sset(), [&](const Simplex& s) { return keep(p.components(s.base_dim, s.id)[0]); });
}

IntVector affine_coefficients(const IntVector& g)
{
    IntVector t(g.size() + 1);
    Integer sum = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        t[i + 1] = g[i];
        sum += g[i];
    }
    t[0] = 1 - sum;
    return t;
}

}  // namespace

// ---------------------------------------------------------------------------
// Pairs and cylinders

PairContext::PairContext(FiniteSSet x, Subcomplex a)
    : x_(std::move(x)), a_(std::move(a)), rc_(std::make_unique<RelativeComplex>(x_, a_))
{
    if (!a_.parent().same_as(x_)) throw std::invalid_argument("pair: subcomplex of another space");
}

std::shared_ptr<PairContext> PairContext::make(FiniteSSet x, Subcomplex a)
{
    return std::shared_ptr<PairContext>(new PairContext(std::move(x), std::move(a)));
}

const CylinderContext& PairContext::cylinder()
{
    std::lock_guard<std::mutex> lock(m_);
    if (cyl_) return *cyl_;
    FiniteSSet d1 = standard_simplex(1);
    ProductSSet prism({d1, x_});
    auto at_vertex = [](std::size_t v) {
        return [v](const Simplex& c) { return c.base_dim == 0 && c.id == v; };
    };
    Subcomplex end0 = where_first(prism, at_vertex(0));
    Subcomplex end1 = where_first(prism, at_vertex(1));
    Subcomplex side = Subcomplex::from_predicate(prism.sset(), [&](const Simplex& s) {
        return a_.contains(prism.components(s.base_dim, s.id)[1]);
    });
    SimplicialMap pr = prism.projection(1);
    SimplicialMap i0 = prism.pairing({SimplicialMap::constant(x_, d1, 0), SimplicialMap::identity(x_)});
    SimplicialMap i1 = prism.pairing({SimplicialMap::constant(x_, d1, 1), SimplicialMap::identity(x_)});
    auto rel_ends = PairContext::make(prism.sset(), end0.unite(end1).unite(side));
    auto from_start = PairContext::make(prism.sset(), end0.unite(side));
    cyl_ = std::make_unique<CylinderContext>(
        CylinderContext{prism, pr, i0, i1, end0, end1, side, rel_ends, from_start});
    rel_ends->shape_ = std::make_shared<CylinderShape>(CylinderShape{prism, a_});
    return *cyl_;
}

ClassOperation& PairContext::operation(WeakMalcev& w, MalcevKind kind)
{
    std::lock_guard<std::mutex> lock(m_);
    auto key = std::make_pair(static_cast<const WeakMalcev*>(&w), kind);
    auto it = ops_.find(key);
    if (it != ops_.end()) return *it->second;
    std::unique_ptr<ClassOperation> op;
    if (kind == MalcevKind::Delta3)
        op = std::make_unique<Delta3Malcev>(w.tower(), *this);
    else
        op = std::make_unique<ClassMalcev>(w, a_);
    return *ops_.emplace(key, std::move(op)).first->second;
}

Cochain glue(const FiniteSSet& x, int degree, const FGAbelianGroup& pi,
             const std::vector<std::pair<const Subcomplex*, Cochain>>& parts)
{
    Cochain out = Cochain::zero(x, degree, pi);
    for (const auto& [sub, c] : parts)
        if (!sub->parent().same_as(x) || !c.space().same_as(x) || c.degree() != degree)
            throw std::invalid_argument("glue: part not on the target space");
    if (degree > x.dim()) return out;
    for (std::size_t id = 0; id < x.count(degree); ++id) {
        const IntVector* v = nullptr;
        for (const auto& [sub, c] : parts) {
            if (!sub->contains(degree, id)) continue;
            if (!v)
                v = &c.value(id);
            else if (!pi.equal(*v, c.value(id)))
                throw std::invalid_argument("glue: parts disagree on an overlap");
        }
        if (v) out.set(id, *v);
    }
    return out;
}

LiftingProblem make_problem(std::shared_ptr<PairContext> pair, const SimplicialMap& g, const Tower& t,
                            std::optional<StageMap> a_data)
{
    if (!g.source().same_as(pair->space()) || !g.target().same_as(t.base()))
        throw std::invalid_argument("problem: base map must go from X to the tower's base");
    if (!a_data) {
        a_data = base_only(g);
        for (int j = 1; j <= t.height(); ++j)
            a_data->coords.push_back(Cochain::zero(pair->space(), t.stage(j).n, t.stage(j).pi));
    }
    if (a_data->level() != t.height() || !a_data->space().same_as(pair->space()))
        throw std::invalid_argument("problem: A-data must be a full-height map on X");
    return LiftingProblem{std::move(pair), g, std::move(*a_data)};
}

// ---------------------------------------------------------------------------
// The Δ³ operation

namespace {

std::shared_ptr<const CylinderShape> require_shape(const PairContext& p)
{
    if (!p.shape()) throw std::invalid_argument("Δ³ operation: pair is not of cylinder shape");
    return std::make_shared<CylinderShape>(*p.shape());
}

}  // namespace

Delta3Malcev::Delta3Malcev(const Tower& t, PairContext& pair)
    : t_(t), pair_(pair), shape_(require_shape(pair)),
      big_({standard_simplex(3), shape_->base_sub.parent()})
{
    FiniteSSet d3 = standard_simplex(3);
    auto within = [&](std::initializer_list<std::size_t> edge) {
        std::vector<std::size_t> e(edge);
        return where_first(big_, [&d3, e](const Simplex& c) {
            for (auto v : d3.vertices(c))
                if (std::find(e.begin(), e.end(), v) == e.end()) return false;
            return true;
        });
    };
    e02_ = within({0, 2});
    e12_ = within({1, 2});
    e13_ = within({1, 3});
    const Subcomplex& c = shape_->base_sub;
    side_ = Subcomplex::from_predicate(big_.sset(), [&](const Simplex& s) {
        return c.contains(big_.components(s.base_dim, s.id)[1]);
    });
    t_sub_ = e02_.unite(e12_).unite(e13_).unite(side_);
    rc_ = std::make_unique<RelativeComplex>(big_.sset(), t_sub_);
    FiniteSSet d1 = standard_simplex(1);
    SimplicialMap sigma = simplex_map(d1, d1.nerve_simplex({0, 0, 1, 1}));
    SimplicialMap e03 = simplex_map(d3, d3.nerve_simplex({0, 3}));
    SimplicialMap id = SimplicialMap::identity(shape_->base_sub.parent());
    q_ = product_map(big_, shape_->prism, {sigma, id});
    restrict_ = product_map(shape_->prism, big_, {e03, id});
}

StageMap Delta3Malcev::operator()(const StageMap& l1, const StageMap& l0, const StageMap& l2)
{
    const Subcomplex& a = pair_.subcomplex();
    for (const StageMap* l : {&l1, &l2})
        if (!agree_on(a, *l, l0)) throw std::invalid_argument("Δ³ operation: representatives differ on A");
    StageMap q1 = precompose(l1, q_), q0 = precompose(l0, q_), q2 = precompose(l2, q_);
    StageMap ext = base_only(q0.base);
    for (int j = 1; j <= l0.level(); ++j) {
        const StageSpec& st = t_.stage(j);
        auto part = [&](const Subcomplex& s, const StageMap& m) { return std::make_pair(&s, relabel(m.coords[j - 1], st.pi)); };
        Cochain fixed = glue(big_.sset(), st.n, st.pi, {part(e02_, q1), part(e12_, q0), part(e13_, q2), part(side_, q0)});
        ext = lift_homotopy(*rc_, t_, ext, fixed);
    }
    StageMap out = precompose(ext, restrict_);
    Validators::instance().check("triangle", agree_on(a, out, l0), "Δ³ operation");
    return out;
}

// ---------------------------------------------------------------------------
// Stage induction

Engine::Engine(const Tower& t, WeakMalcev& w, LiftingProblem p, int top, EngineOptions o)
    : t_(t), w_(w), p_(std::move(p)), top_(top), o_(o)
{
    if (top < 0 || top > t.height() || top > p_.a_data.level()) throw std::invalid_argument("engine: level out of range");
    if (&w.tower() != &t) throw std::invalid_argument("engine: Mal'cev structure of another tower");
}

ClassOperation& Engine::op()
{
    bool d3 = o_.malcev == MalcevKind::Delta3 && p_.pair->shape();
    return p_.pair->operation(w_, d3 ? MalcevKind::Delta3 : MalcevKind::Lambda);
}

const StageResult& Engine::stage(int level)
{
    if (level < 0 || level > top_) throw std::out_of_range("engine: stage out of range");
    auto it = stages_.find(level);
    if (it == stages_.end()) {
        compute(level);
        it = stages_.find(level);
    }
    return it->second;
}

StageMap Engine::lift_or_throw(const StageMap& below, int level, const char* what)
{
    LiftResult r = lift_map(p_.pair->complex(), t_, below, p_.a_data.coords[level - 1]);
    if (!r.lift) throw InvariantViolation(std::string("lift with zero obstruction failed: ") + what);
    return *r.lift;
}

StageMap Engine::representative(int level, const GroupElement& g)
{
    const StageResult& r = stage(level);
    if (r.empty) throw std::invalid_argument("representative: the stage is EMPTY");
    if (!g.group().same_as(r.group)) throw std::invalid_argument("representative: element of another group");
    IntVector c = g.canonical().coords();
    long unit = -1;
    bool zero = true;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i] == 0) continue;
        unit = (zero && c[i] == 1) ? static_cast<long>(i) : -2;
        zero = false;
    }
    if (zero) return r.reps[0];
    if (unit >= 0) return r.reps[unit + 1];
    return op().affine(r.reps, affine_coefficients(c));
}

StageMap Engine::kernel_combination(int level, const IntVector& u)
{
    const StageResult& r = stage(level);
    std::vector<StageMap> ls(r.reps.begin(), r.reps.begin() + static_cast<long>(u.size()) + 1);
    return op().affine(ls, affine_coefficients(u));
}

void Engine::compute(int j)
{
    StageResult r;
    r.level = j;
    if (j == 0) {
        r.reps = {base_only(p_.g)};
        stages_.emplace(0, std::move(r));
        return;
    }
    const StageResult& prev = stage(j - 1);
    if (prev.empty) {
        r.empty = true;
        stages_.emplace(j, std::move(r));
        return;
    }
    const StageSpec& st = t_.stage(j);
    const RelativeComplex& rc = p_.pair->complex();
    const Subcomplex& a = p_.pair->subcomplex();

    // Obstructions of the previous representatives.
    Cochain on_a = mask_to(relabel(p_.a_data.coords[j - 1], st.pi), a);
    Cochain d_on_a = coboundary(on_a);
    auto obs = rc.cohomology(st.n + 1, st.pi);
    std::vector<GroupElement> o;
    for (const auto& rep : prev.reps) {
        Cochain rel = (evaluate_k(t_, j, rep) - d_on_a).canonical();
        if (!rc.vanishes_on_subcomplex(rel)) throw std::invalid_argument("engine: the A-data is not a lift over A");
        o.push_back(obs->class_of(rel));
    }
    auto t = solve_zero_preimage(o);
    if (!t) {
        r.empty = true;
        r.obstruction = o[0];
        stages_.emplace(j, std::move(r));
        return;
    }
    r.t = *t;
    StageMap l0 = lift_or_throw(op().affine(prev.reps, *t), j, "base point");

    IntMatrix km(obs->group().n_generators(), prev.group.n_generators());
    for (std::size_t i = 0; i < prev.group.n_generators(); ++i) {
        IntVector d = (o[i + 1] - o[0]).coords();
        for (std::size_t k = 0; k < d.size(); ++k) km(k, i) = d[k];
    }
    GroupHom kappa;
    try {
        kappa = GroupHom(prev.group, obs->group(), km);
    } catch (const std::invalid_argument&) {
        throw InvariantViolation("obstruction map does not respect the relations of the previous stage");
    }
    Subgroup kernel = hom_kernel(kappa);
    r.g_star = prev.group.element(IntVector(t->begin() + 1, t->end()));

    std::vector<StageMap> lambdas;
    for (std::size_t i = 0; i < kernel.group.n_generators(); ++i) {
        GroupElement gi = r.g_star + kernel.inclusion(kernel.group.generator(i));
        lambdas.push_back(lift_or_throw(representative(j - 1, gi), j, "kernel generator"));
    }
    auto fiber = rc.cohomology(st.n, st.pi);
    std::vector<Cochain> zs = fiber->generator_representatives();

    r.reps = {l0};
    r.reps.insert(r.reps.end(), lambdas.begin(), lambdas.end());
    for (const auto& z : zs) r.reps.push_back(principal_action(l0, relabel(z, st.pi)));

    if (o_.generators_only) {
        r.group = FGAbelianGroup::free(r.reps.size() - 1);
        stages_.emplace(j, std::move(r));
        return;
    }

    // Full mode: record the stage data before the relation lifts, which
    // build combinations of these representatives.
    r.kernel = kernel;
    r.fiber = fiber;
    auto [slot, fresh] = stages_.emplace(j, std::move(r));
    StageResult& cur = slot->second;
    const CylinderContext& cyl = p_.pair->cylinder();
    auto fiber_class = [&](const StageMap& h, const StageMap& start) {
        StageMap end = precompose(lift_from(h, start), cyl.i1);
        return fiber->class_of(relabel(unique_difference(a, l0, end), st.pi)).coords();
    };

    std::vector<IntVector> w;
    const IntMatrix& rel = kernel.group.relations();
    for (std::size_t c = 0; c < rel.cols(); ++c) {
        IntVector u(rel.rows());
        for (std::size_t i = 0; i < u.size(); ++i) u[i] = rel(i, c);
        StageMap mu = kernel_combination(j, u);
        auto h = find_homotopy(j - 1, mu.truncated(j - 1), l0.truncated(j - 1));
        if (!h) throw InvariantViolation("no homotopy between representatives of one class");
        w.push_back(fiber_class(*h, mu));
    }
    if (!fiber->group().is_trivial()) {
        StageMap below = l0.truncated(j - 1);
        Engine loops(t_, w_, path_problem(j - 1, below, below), j - 1, EngineOptions{true, MalcevKind::Lambda});
        const StageResult& lr = loops.stage(j - 1);
        if (lr.empty) throw InvariantViolation("the constant homotopy is missing");
        for (const auto& h : lr.reps) cur.stabilizer.push_back(fiber_class(h, l0));
    }
    cur.group = heap_from_extension(fiber->group(), cur.stabilizer, kernel.group, w).ambient();
}

LiftingProblem Engine::path_problem(int level, const StageMap& a, const StageMap& b)
{
    const CylinderContext& cyl = p_.pair->cylinder();
    if (!a_pr_) a_pr_ = precompose(p_.a_data, cyl.pr);
    LiftingProblem sub{cyl.rel_ends, p_.g.compose_after(cyl.pr), base_only(p_.g.compose_after(cyl.pr))};
    const FiniteSSet& prism = cyl.prism.sset();
    for (int l = 0; l < level; ++l) {
        const StageSpec& st = t_.stage(l + 1);
        auto part = [&](const Subcomplex& s, const Cochain& c) { return std::make_pair(&s, relabel(pullback(cyl.pr, c), st.pi)); };
        sub.a_data.coords.push_back(glue(prism, st.n, st.pi,
                                         {part(cyl.end0, a.coords[l]), part(cyl.end1, b.coords[l]),
                                          std::make_pair(&cyl.side, relabel(a_pr_->coords[l], st.pi))}));
    }
    return sub;
}

std::optional<StageMap> Engine::find_homotopy(int level, const StageMap& a, const StageMap& b)
{
    Engine sub(t_, w_, path_problem(level, a, b), level, EngineOptions{true, MalcevKind::Lambda});
    const StageResult& r = sub.stage(level);
    if (r.empty) return std::nullopt;
    return r.reps[0];
}

StageMap Engine::lift_from(const StageMap& h, const StageMap& start)
{
    const CylinderContext& cyl = p_.pair->cylinder();
    if (!a_pr_) a_pr_ = precompose(p_.a_data, cyl.pr);
    int j = h.level() + 1;
    if (start.level() != j) throw std::invalid_argument("lift_from: start is not one level above the homotopy");
    const StageSpec& st = t_.stage(j);
    Cochain fixed = glue(cyl.prism.sset(), st.n, st.pi,
                         {std::make_pair(&cyl.end0, relabel(pullback(cyl.pr, start.coords[j - 1]), st.pi)),
                          std::make_pair(&cyl.side, relabel(a_pr_->coords[j - 1], st.pi))});
    return lift_homotopy(cyl.from_start->complex(), t_, h, fixed);
}

GroupElement Engine::classify(int level, const StageMap& l)
{
    if (o_.generators_only) throw std::logic_error("classify: engine computes generators only");
    const StageResult& r = stage(level);
    if (r.empty) throw std::invalid_argument("classify: the stage is EMPTY");
    if (level == 0) return r.group.zero();
    if (l.level() < level) throw std::invalid_argument("classify: map below the requested level");
    StageMap below = l.truncated(level - 1);
    StageMap top = l.truncated(level);
    GroupElement g = classify(level - 1, below);
    auto u = r.kernel->inclusion.preimage(g - r.g_star);
    if (!u) throw InvariantViolation("classify: map outside the image of the stage");
    IntVector uc = u->coords();
    StageMap mu = kernel_combination(level, uc);
    auto h = find_homotopy(level - 1, below, mu.truncated(level - 1));
    if (!h) throw InvariantViolation("classify: representatives of one class are not homotopic");
    const CylinderContext& cyl = p_.pair->cylinder();
    StageMap end = precompose(lift_from(*h, top), cyl.i1);
    const StageSpec& st = t_.stage(level);
    GroupElement f = r.fiber->class_of(relabel(unique_difference(p_.pair->subcomplex(), mu, end), st.pi));
    IntVector coords = uc;
    coords.insert(coords.end(), f.coords().begin(), f.coords().end());
    return r.group.element(coords).canonical();
}

// ---------------------------------------------------------------------------
// Top-level routines

std::string Certificate::to_string() const
{
    std::ostringstream o;
    if (!nonempty) {
        o << "obstructed at stage " << stage_degree << ", class ≠ 0 in H^" << stage_degree + 1;
        return o.str();
    }
    o << "nonempty; lift coefficients";
    for (const auto& t : coefficients) o << " " << heapstone::to_string(t);
    return o.str();
}

CohomologyClasses classes_into_L(const RelativeComplex& pair, const FGAbelianGroup& pi, int n)
{
    auto h = pair.cohomology(n, pi);
    CohomologyClasses out{AbelianHeap::whole(h->group()), {h->representative(h->group().zero())}};
    for (auto& z : h->generator_representatives()) out.reps.push_back(z);
    return out;
}

void require_stable(const LiftingProblem& p, const Tower& t)
{
    StabilityReport r = check_stability(p.pair->subcomplex(), t);
    if (!r.stable) throw StabilityError(r);
}

namespace {

Certificate walk(Engine& e)
{
    Certificate c;
    for (int j = 1; j <= e.top(); ++j) {
        const StageResult& r = e.stage(j);
        if (r.empty) {
            c.nonempty = false;
            c.stage_degree = e.tower().stage(j).n;
            c.obstruction = r.obstruction;
            return c;
        }
        c.coefficients.push_back(r.t);
    }
    return c;
}

}  // namespace

ClassSet compute_classes(Engine& e)
{
    require_stable(e.problem(), e.tower());
    ClassSet s;
    s.level = e.top();
    s.certificate = walk(e);
    if (!s.certificate.nonempty) return s;
    const StageResult& r = e.stage(e.top());
    s.heap = AbelianHeap::whole(r.group);
    s.reps = r.reps;
    return s;
}

Certificate decide_nonempty(const Tower& t, WeakMalcev& w, const LiftingProblem& p)
{
    Engine e(t, w, p, t.height(), EngineOptions{true, MalcevKind::Lambda});
    return walk(e);
}

LiftingProblem suspended_problem(const LiftingProblem& p, const Tower& suspension)
{
    if (!p.pair->subcomplex().sset().empty()) throw std::invalid_argument("suspension route: needs A = ∅");
    if (!suspension.base().same_as(p.g.target())) throw std::invalid_argument("suspension route: tower over another base");
    const CylinderContext& cyl = p.pair->cylinder();
    LiftingProblem s = make_problem(cyl.rel_ends, p.g.compose_after(cyl.pr), suspension);
    for (int j = 1; j <= suspension.height(); ++j)
        if (!evaluate_k(suspension, j, s.a_data.truncated(j - 1)).is_zero())
            throw std::invalid_argument("suspension route: zero coordinates are not a section at stage " + std::to_string(j));
    return s;
}

RouteComparison compare_routes(const ClassSet& main, const ClassSet& suspension)
{
    auto describe = [](const ClassSet& c) { return c.heap.to_string(); };
    RouteComparison r{false, describe(main), describe(suspension)};
    if (main.heap.is_empty() || suspension.heap.is_empty()) {
        r.agree = main.heap.is_empty() == suspension.heap.is_empty();
        return r;
    }
    r.agree = main.heap.cardinality() == suspension.heap.cardinality() &&
              main.heap.difference_subgroup().group.type_string() == suspension.heap.difference_subgroup().group.type_string();
    return r;
}

std::size_t check_class_malcev(Engine& e, ClassOperation& op, std::size_t max_elements)
{
    const StageResult& r = e.stage(e.top());
    if (r.empty) return 0;
    std::vector<GroupElement> elems;
    auto order = r.group.order();
    if (order && *order <= max_elements) {
        elems = r.group.enumerate();
    } else {
        elems.push_back(r.group.zero());
        for (std::size_t i = 0; i < r.group.n_generators() && elems.size() < max_elements; ++i) elems.push_back(r.group.generator(i));
    }
    std::vector<StageMap> reps;
    for (const auto& x : elems) reps.push_back(e.representative(e.top(), x));
    std::size_t bad = 0;
    for (std::size_t x = 0; x < elems.size(); ++x)
        for (std::size_t m = 0; m < elems.size(); ++m)
            for (std::size_t y = 0; y < elems.size(); ++y) {
                GroupElement got = e.classify(e.top(), op(reps[x], reps[m], reps[y]));
                if (!(got == malcev(elems[x], elems[m], elems[y]))) ++bad;
            }
    return bad;
}

}  // namespace heapstone
