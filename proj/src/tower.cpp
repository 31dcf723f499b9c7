#include "heapstone/tower.hpp"

#include <algorithm>
#include <sstream>

namespace heapstone {

// ---------------------------------------------------------------------------
// Validators

Validators& Validators::instance()
{
    static Validators v;
    return v;
}

void Validators::check(const std::string& kind, bool ok, const std::string& detail)
{
    {
        std::lock_guard<std::mutex> lock(m_);
        auto& c = counts_[kind];
        ++c.first;
        if (!ok) ++c.second;
    }
    if (!ok) throw InvariantViolation(kind + " violated" + (detail.empty() ? "" : ": " + detail));
}

std::size_t Validators::checks(const std::string& kind) const
{
    std::lock_guard<std::mutex> lock(m_);
    auto it = counts_.find(kind);
    return it == counts_.end() ? 0 : it->second.first;
}

std::size_t Validators::violations(const std::string& kind) const
{
    std::lock_guard<std::mutex> lock(m_);
    auto it = counts_.find(kind);
    return it == counts_.end() ? 0 : it->second.second;
}

std::size_t Validators::total_violations() const
{
    std::lock_guard<std::mutex> lock(m_);
    std::size_t n = 0;
    for (const auto& [k, c] : counts_) n += c.second;
    return n;
}

std::map<std::string, std::pair<std::size_t, std::size_t>> Validators::snapshot() const
{
    std::lock_guard<std::mutex> lock(m_);
    return counts_;
}

void Validators::reset()
{
    std::lock_guard<std::mutex> lock(m_);
    counts_.clear();
}

// ---------------------------------------------------------------------------
// k-invariant expressions

bool same_presentation(const FGAbelianGroup& a, const FGAbelianGroup& b)
{
    if (a.same_as(b)) return true;
    return a.n_generators() == b.n_generators() && a.relations() == b.relations();
}

Cochain relabel(const Cochain& c, const FGAbelianGroup& pi)
{
    if (c.coefficients().same_as(pi)) return c;
    if (!same_presentation(c.coefficients(), pi)) throw std::invalid_argument("relabel: different presentations");
    std::vector<IntVector> vals(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) vals[i] = c.value(i);
    return Cochain(c.space(), c.degree(), pi, std::move(vals));
}

namespace {

bool is_ring(const FGAbelianGroup& g) { return g.n_generators() == 1; }

Integer modulus_of(const FGAbelianGroup& g)
{
    if (g.n_generators() != 1) throw std::invalid_argument("cup products need cyclic coefficients");
    return ring_modulus(g);
}

}  // namespace

KExpr KExpr::zero(int degree, FGAbelianGroup pi)
{
    auto n = std::make_shared<Node>();
    n->op = Op::Zero;
    n->degree = degree;
    n->group = std::move(pi);
    return KExpr(n);
}

KExpr KExpr::fib(int level, int degree, FGAbelianGroup pi)
{
    if (level < 1) throw std::invalid_argument("fibre levels start at 1");
    auto n = std::make_shared<Node>();
    n->op = Op::Fib;
    n->index = level;
    n->degree = degree;
    n->group = std::move(pi);
    return KExpr(n);
}

KExpr KExpr::base(Cochain on_base)
{
    auto n = std::make_shared<Node>();
    n->op = Op::Base;
    n->degree = on_base.degree();
    n->group = on_base.coefficients();
    n->cochain = std::move(on_base);
    return KExpr(n);
}

KExpr KExpr::coboundary(const KExpr& e)
{
    auto n = std::make_shared<Node>();
    n->op = Op::Coboundary;
    n->degree = e.degree() + 1;
    n->group = e.group();
    n->args = {e.n_};
    return KExpr(n);
}

KExpr KExpr::hom(GroupHom h, const KExpr& e)
{
    if (!same_presentation(h.source(), e.group())) throw std::invalid_argument("hom: source group does not match");
    auto n = std::make_shared<Node>();
    n->op = Op::Hom;
    n->degree = e.degree();
    n->group = h.target();
    n->hom = h.source().same_as(e.group()) ? std::move(h) : GroupHom(e.group(), h.target(), h.matrix());
    n->args = {e.n_};
    return KExpr(n);
}

KExpr KExpr::mod(const Integer& m, const KExpr& e)
{
    if (m < 2) throw std::invalid_argument("mod: modulus must be at least 2");
    if (!is_ring(e.group()) || modulus_of(e.group()) != 0) throw std::invalid_argument("mod: needs integral input");
    IntMatrix one(1, 1);
    one(0, 0) = 1;
    return hom(GroupHom(e.group(), FGAbelianGroup::cyclic(m), one), e);
}

KExpr KExpr::cup(const KExpr& a, const KExpr& b) { return cup_i(0, a, b); }

KExpr KExpr::cup_i(int i, const KExpr& a, const KExpr& b)
{
    if (i < 0) throw std::invalid_argument("cup_i: negative index");
    Integer ma = modulus_of(a.group()), mb = modulus_of(b.group());
    if (ma != mb) throw std::invalid_argument("cup_i: operands have different coefficient rings");
    if (i >= 2 && ma != 2) throw std::invalid_argument("cup_i for i >= 2 needs Z/2 coefficients");
    auto n = std::make_shared<Node>();
    n->op = Op::CupI;
    n->index = i;
    n->degree = a.degree() + b.degree() - i;
    if (n->degree < 0) throw std::invalid_argument("cup_i: negative degree");
    n->group = a.group();
    n->args = {a.n_, b.n_};
    return KExpr(n);
}

KExpr KExpr::add(const KExpr& a, const KExpr& b)
{
    if (a.degree() != b.degree() || !same_presentation(a.group(), b.group()))
        throw std::invalid_argument("add: operands of different type");
    auto n = std::make_shared<Node>();
    n->op = Op::Add;
    n->degree = a.degree();
    n->group = a.group();
    n->args = {a.n_, b.n_};
    return KExpr(n);
}

KExpr KExpr::neg(const KExpr& e) { return scale(-1, e); }

KExpr KExpr::scale(const Integer& k, const KExpr& e)
{
    auto n = std::make_shared<Node>();
    n->op = k == -1 ? Op::Neg : Op::Scale;
    n->scalar = k;
    n->degree = e.degree();
    n->group = e.group();
    n->args = {e.n_};
    return KExpr(n);
}

int KExpr::max_level() const
{
    std::function<int(const Node&)> go = [&](const Node& n) {
        int m = n.op == Op::Fib ? n.index : 0;
        for (const auto& a : n.args) m = std::max(m, go(*a));
        return m;
    };
    return go(*n_);
}

Cochain KExpr::evaluate(const KContext& ctx) const { return eval(*n_, ctx); }

Cochain KExpr::eval(const Node& n, const KContext& ctx)
{
    auto arg = [&](std::size_t i) { return relabel(eval(*n.args[i], ctx), n.args[i]->group); };
    switch (n.op) {
    case Op::Zero: return Cochain::zero(ctx.space, n.degree, n.group);
    case Op::Fib: {
        if (n.index > static_cast<int>(ctx.coords.size())) throw std::invalid_argument("k-invariant: missing fibre coordinate");
        const Cochain& c = ctx.coords[n.index - 1];
        if (c.degree() != n.degree) throw std::invalid_argument("k-invariant: fibre coordinate of wrong degree");
        return relabel(c, n.group);
    }
    case Op::Base: return ctx.pull_base(n.cochain);
    case Op::Coboundary: return heapstone::coboundary(arg(0));
    case Op::Hom: return apply_hom(n.hom, arg(0));
    case Op::CupI: {
        Cochain a = arg(0), b = arg(1);
        if (n.index == 0) return heapstone::cup(a, b);
        if (n.index == 1) return cup1(a, b);
        return heapstone::cup_i(n.index, a, b);
    }
    case Op::Add: return (arg(0) + relabel(arg(1), n.group)).canonical();
    case Op::Neg:
    case Op::Scale: return arg(0).times(n.scalar).canonical();
    }
    throw std::logic_error("KExpr: unknown node");
}

std::string KExpr::to_string() const { return show(*n_); }

std::string KExpr::show(const Node& n)
{
    auto a = [&](std::size_t i) { return show(*n.args[i]); };
    switch (n.op) {
    case Op::Zero: return "zero";
    case Op::Fib: return "c" + std::to_string(n.index);
    case Op::Base: return "base(" + n.cochain.to_string() + ")";
    case Op::Coboundary: return "delta(" + a(0) + ")";
    case Op::Hom:
        if (is_ring(n.group) && is_ring(n.hom.source()) && n.hom.matrix()(0, 0) == 1 && modulus_of(n.hom.source()) == 0)
            return "mod(" + heapstone::to_string(modulus_of(n.group)) + ", " + a(0) + ")";
        return "hom(" + a(0) + ")";
    case Op::CupI:
        if (n.index == 0) return "cup(" + a(0) + ", " + a(1) + ")";
        if (n.index == 1) return "cup1(" + a(0) + ", " + a(1) + ")";
        return "cupi(" + std::to_string(n.index) + ", " + a(0) + ", " + a(1) + ")";
    case Op::Add: return "add(" + a(0) + ", " + a(1) + ")";
    case Op::Neg: return "neg(" + a(0) + ")";
    case Op::Scale: return "scale(" + heapstone::to_string(n.scalar) + ", " + a(0) + ")";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Towers

Tower::Tower(FiniteSSet base, std::vector<StageSpec> stages) : base_(std::move(base)), stages_(std::move(stages))
{
    for (std::size_t j = 0; j < stages_.size(); ++j) {
        const StageSpec& s = stages_[j];
        if (s.n < 0) throw std::invalid_argument("tower: negative stage degree");
        if (j > 0 && s.n <= stages_[j - 1].n) throw std::invalid_argument("tower: stage degrees must increase");
        if (s.k.degree() != s.n + 1) throw std::invalid_argument("tower: k-invariant of stage " + std::to_string(s.n) + " has degree " + std::to_string(s.k.degree()));
        if (!same_presentation(s.k.group(), s.pi)) throw std::invalid_argument("tower: k-invariant of stage " + std::to_string(s.n) + " has the wrong coefficients");
        if (s.k.max_level() > static_cast<int>(j)) throw std::invalid_argument("tower: k-invariant refers to a later stage");
    }
}

int Tower::connectivity() const { return stages_.empty() ? 1 << 20 : stages_.front().n - 1; }

Tower Tower::truncated(int levels) const
{
    std::vector<StageSpec> s(stages_.begin(), stages_.begin() + std::min<std::ptrdiff_t>(levels, stages_.size()));
    return Tower(base_, std::move(s));
}

void Tower::spot_check(std::mt19937& rng, int samples) const
{
    for (int j = 1; j <= height(); ++j) {
        StageSet prev(*this, j - 1);
        for (int s = 0; s < samples; ++s) {
            int q = stage(j).n + 1 + s % 3;
            StageSimplex x = prev.random(q, rng);
            Cochain k = evaluate_k(*this, j, x);
            Validators::instance().check("k-cocycle", heapstone::coboundary(k).is_zero(),
                                         "k-invariant of stage " + std::to_string(stage(j).n));
        }
    }
}

StageMap StageMap::truncated(int level) const
{
    StageMap f{base, {}};
    f.coords.assign(coords.begin(), coords.begin() + level);
    return f;
}

Cochain evaluate_k(const Tower& t, int level, const StageMap& f)
{
    if (f.level() < level - 1) throw std::invalid_argument("evaluate_k: map does not reach the previous stage");
    KContext ctx{f.space(), [&](const Cochain& c) { return pullback(f.base, c); }, f.coords};
    return relabel(t.stage(level).k.evaluate(ctx), t.stage(level).pi);
}

Cochain evaluate_k(const Tower& t, int level, const StageSimplex& s)
{
    if (static_cast<int>(s.coords.size()) < level - 1) throw std::invalid_argument("evaluate_k: simplex does not reach the previous stage");
    FiniteSSet d = standard_simplex(s.dim());
    KContext ctx{d, [&](const Cochain& c) { return pullback_simplex(c, s.base); }, s.coords};
    return relabel(t.stage(level).k.evaluate(ctx), t.stage(level).pi);
}

namespace {

bool coords_typed(const Tower& t, const std::vector<Cochain>& coords)
{
    if (static_cast<int>(coords.size()) > t.height()) return false;
    for (std::size_t j = 0; j < coords.size(); ++j)
        if (coords[j].degree() != t.stage(j + 1).n || !coords[j].coefficients().same_as(t.stage(j + 1).pi)) return false;
    return true;
}

}  // namespace

bool is_member(const Tower& t, const StageMap& f)
{
    if (!f.base.target().same_as(t.base()) || !coords_typed(t, f.coords)) return false;
    for (int j = 1; j <= f.level(); ++j)
        if (!coboundary(f.coords[j - 1]).equals(evaluate_k(t, j, f))) return false;
    return true;
}

bool is_member(const Tower& t, const StageSimplex& s)
{
    if (!coords_typed(t, s.coords)) return false;
    for (int j = 1; j <= static_cast<int>(s.coords.size()); ++j)
        if (!coboundary(s.coords[j - 1]).equals(evaluate_k(t, j, s))) return false;
    return true;
}

void validate_member(const Tower& t, const StageMap& f, const std::string& where)
{
    Validators::instance().check("membership", is_member(t, f), where);
}

void validate_member(const Tower& t, const StageSimplex& s, const std::string& where)
{
    Validators::instance().check("membership", is_member(t, s), where);
}

StageSimplex simplex_of(const StageMap& f, const Simplex& sigma)
{
    StageSimplex s{f.base(sigma), {}};
    for (const auto& c : f.coords) s.coords.push_back(pullback_simplex(c, sigma));
    return s;
}

StageMap precompose(const StageMap& f, const SimplicialMap& h)
{
    StageMap out{f.base.compose_after(h), {}};
    for (const auto& c : f.coords) out.coords.push_back(pullback(h, c));
    return out;
}

StageMap base_only(const SimplicialMap& g) { return StageMap{g, {}}; }

// ---------------------------------------------------------------------------
// Stages as simplicial sets

StageSimplex StageSet::face(const StageSimplex& s, int i) const
{
    StageSimplex out{t_.base().face(s.base, i), {}};
    for (const auto& c : s.coords) out.coords.push_back(em_face(c, i));
    return out;
}

StageSimplex StageSet::degeneracy(const StageSimplex& s, int j) const
{
    StageSimplex out{t_.base().degeneracy(s.base, j), {}};
    for (const auto& c : s.coords) out.coords.push_back(em_degeneracy(c, j));
    return out;
}

bool StageSet::equal(const StageSimplex& a, const StageSimplex& b) const
{
    if (!(a.base == b.base) || a.coords.size() != b.coords.size()) return false;
    for (std::size_t j = 0; j < a.coords.size(); ++j)
        if (!a.coords[j].equals(b.coords[j])) return false;
    return true;
}

StageSimplex StageSet::random_over(const Simplex& b, std::mt19937& rng) const
{
    StageSimplex s{b, {}};
    for (int j = 1; j <= level_; ++j) {
        const StageSpec& st = t_.stage(j);
        Cochain k = evaluate_k(t_, j, s);
        auto c = lift_through_delta_on_simplex(k, {});
        if (!c) throw InvariantViolation("k-invariant is not a cocycle on a simplex");
        EMSpace fibre(EMSpace::Kind::K, st.n, st.pi);
        s.coords.push_back(em_add(relabel(*c, st.pi), fibre.random(b.dim, rng)));
    }
    return s;
}

StageSimplex StageSet::random(int q, std::mt19937& rng) const
{
    const FiniteSSet& B = t_.base();
    std::vector<Simplex> cells;
    for (int d = 0; d <= std::min(q, B.dim()); ++d)
        for (const auto& s : B.simplices(d)) cells.push_back(s);
    Simplex b = cells[std::uniform_int_distribution<std::size_t>(0, cells.size() - 1)(rng)];
    // random monotone surjection [q] -> [b.dim]: choose the b.dim jump positions
    std::vector<int> pos(q);
    for (int i = 0; i < q; ++i) pos[i] = i + 1;
    std::shuffle(pos.begin(), pos.end(), rng);
    std::vector<char> jump(q + 1, 0);
    for (int i = 0; i < b.dim; ++i) jump[pos[i]] = 1;
    OrderMap eta;
    eta.push_back(0);
    for (int i = 1; i <= q; ++i) eta.push_back(eta.back() + jump[i]);
    return random_over(B.apply(b, eta), rng);
}

StageSimplex principal_action(const StageSimplex& s, const EMSimplex& z)
{
    if (s.coords.empty()) throw std::invalid_argument("principal_action: no fibre coordinate");
    const Cochain& top = s.coords.back();
    if (z.degree() != top.degree() || z.space().dim() != s.dim()) throw std::invalid_argument("principal_action: level mismatch");
    if (!coboundary(z).is_zero()) throw std::invalid_argument("principal_action: z is not a cocycle");
    StageSimplex out = s;
    out.coords.back() = em_add(top, relabel(z, top.coefficients()));
    return out;
}

StageMap principal_action(const StageMap& f, const Cochain& z)
{
    if (f.coords.empty()) throw std::invalid_argument("principal_action: no fibre coordinate");
    const Cochain& top = f.coords.back();
    if (z.degree() != top.degree() || !z.space().same_as(top.space())) throw std::invalid_argument("principal_action: level mismatch");
    if (!coboundary(z).is_zero()) throw std::invalid_argument("principal_action: z is not a cocycle");
    StageMap out = f;
    out.coords.back() = (top + relabel(z, top.coefficients())).canonical();
    return out;
}

// ---------------------------------------------------------------------------
// Stability and lifting

std::string StabilityReport::message() const
{
    std::ostringstream o;
    o << "dim(X \\ A) = " << relative_dim << ", 2 * conn = " << 2 * connectivity;
    o << (stable ? " (stable)" : " (outside the stable range)");
    return o.str();
}

StabilityReport check_stability(const Subcomplex& a, const Tower& t)
{
    StabilityReport r{a.complement_dim(), t.connectivity(), true};
    r.stable = r.relative_dim <= 2 * r.connectivity;
    return r;
}

Cochain mask_to(const Cochain& c, const Subcomplex& a) { return extend_by_zero(restrict_to(c, a), a); }

LiftResult lift_map(const RelativeComplex& pair, const Tower& t, const StageMap& base_lift, const Cochain& on_a)
{
    int j = base_lift.level() + 1;
    if (j > t.height()) throw std::invalid_argument("lift_map: no further stage");
    if (!base_lift.space().same_as(pair.space())) throw std::invalid_argument("lift_map: map is not defined on the pair");
    const StageSpec& st = t.stage(j);
    Cochain fixed = mask_to(relabel(on_a, st.pi), pair.subcomplex());
    if (fixed.degree() != st.n) throw std::invalid_argument("lift_map: A-data of wrong degree");
    Cochain rel = (evaluate_k(t, j, base_lift) - coboundary(fixed)).canonical();
    if (!pair.vanishes_on_subcomplex(rel)) throw std::invalid_argument("lift_map: the A-data is not a lift over A");
    LiftResult r;
    auto c = pair.solve(rel);
    if (!c) {
        r.obstruction = pair.cohomology(st.n + 1, st.pi)->class_of(rel);
        return r;
    }
    StageMap out = base_lift;
    out.coords.push_back((fixed + relabel(*c, st.pi)).canonical());
    validate_member(t, out, "lift_map");
    r.lift = std::move(out);
    return r;
}

LiftResult lift_map(const RelativeComplex& pair, const Tower& t, const StageMap& base_lift)
{
    int j = base_lift.level() + 1;
    if (j > t.height()) throw std::invalid_argument("lift_map: no further stage");
    return lift_map(pair, t, base_lift, Cochain::zero(pair.space(), t.stage(j).n, t.stage(j).pi));
}

StageMap lift_homotopy(const RelativeComplex& pair, const Tower& t, const StageMap& h, const Cochain& fixed)
{
    LiftResult r = lift_map(pair, t, h, fixed);
    if (!r.lift) throw InvariantViolation("homotopy lifting failed over an anodyne pair");
    return *r.lift;
}

Cochain unique_difference(const Subcomplex& a, const StageMap& l1, const StageMap& l2)
{
    if (l1.level() != l2.level() || l1.level() == 0 || !l1.space().same_as(l2.space()))
        throw std::invalid_argument("unique_difference: maps of different shape");
    const FiniteSSet& x = l1.space();
    for (int d = 0; d <= x.dim(); ++d)
        for (std::size_t id = 0; id < x.count(d); ++id)
            if (!(l1.base.image(d, id) == l2.base.image(d, id)))
                throw std::invalid_argument("unique_difference: different base maps");
    for (int j = 0; j + 1 < l1.level(); ++j)
        if (!l1.coords[j].equals(l2.coords[j])) throw std::invalid_argument("unique_difference: maps differ below the top stage");
    Cochain z = (l2.coords.back() - l1.coords.back()).canonical();
    if (!restrict_to(z, a).is_zero()) throw std::invalid_argument("unique_difference: maps differ on A");
    return z;
}

}  // namespace heapstone
