#include "heapstone/malcev.hpp"

#include <algorithm>

namespace heapstone {

namespace {

int fibre_degree(const KExpr& e);
void fibre_levels(const KExpr& e, std::vector<int>& out);
bool natural_ok(const Tower& t, const KExpr& e);

bool same_map(const SimplicialMap& f, const SimplicialMap& g)
{
    if (!f.source().same_as(g.source()) || !f.target().same_as(g.target())) return false;
    const FiniteSSet& s = f.source();
    for (int d = 0; d <= s.dim(); ++d)
        for (std::size_t id = 0; id < s.count(d); ++id)
            if (!(f.image(d, id) == g.image(d, id))) return false;
    return true;
}

// First `levels` coordinates of f over sigma.
StageSimplex lower(const StageMap& f, const Simplex& sigma, int levels)
{
    StageSimplex s{f.base(sigma), {}};
    for (int j = 0; j < levels; ++j) s.coords.push_back(pullback_simplex(f.coords[j], sigma));
    return s;
}

bool coords_equal(const StageSimplex& a, const StageSimplex& b)
{
    for (std::size_t j = 0; j < a.coords.size(); ++j)
        if (!a.coords[j].equals(b.coords[j])) return false;
    return true;
}

std::string serialize(const StageSimplex& s)
{
    std::string out;
    for (const auto& c : s.coords) out += c.canonical().to_string() + "/";
    return out;
}

bool degenerate_at(const FiniteSSet& b, const Simplex& base, const std::vector<const StageSimplex*>& parts, int i)
{
    if (!(b.degeneracy(b.face(base, i), i) == base)) return false;
    for (const StageSimplex* p : parts)
        for (const auto& c : p->coords)
            if (!em_degeneracy(em_face(c, i), i).equals(c)) return false;
    return true;
}

unsigned vertex_mask(const std::vector<std::size_t>& seq)
{
    unsigned m = 0;
    for (auto v : seq) m |= 1u << v;
    return m;
}

SimplicialMap edge_into_triangle(int a, int b)
{
    FiniteSSet d2 = standard_simplex(2);
    return simplex_map(d2, d2.nerve_simplex({static_cast<std::size_t>(a), static_cast<std::size_t>(b)}));
}

StageMap as_map(const Tower& t, const StageSimplex& s)
{
    return StageMap{simplex_map(t.base(), s.base), s.coords};
}

}  // namespace

WeakMalcev::WeakMalcev(const Tower& t) : t_(t), memo_(static_cast<std::size_t>(t.height()) + 1)
{
    // strict: M_j = 0 is natural, so τ_j is x - r + y
    std::vector<bool> strict;
    for (int j = 1; j <= t.height(); ++j) {
        const KExpr& k = t.stage(j).k;
        std::vector<int> lv;
        fibre_levels(k, lv);
        bool refs = std::all_of(lv.begin(), lv.end(), [&](int l) { return strict[l - 1]; });
        strict.push_back(refs && fibre_degree(k) <= 1);
        natural_.push_back(refs && natural_ok(t, k));
    }
}

Cochain WeakMalcev::deviation(int level, const HatQuery& q, const StageMap& tau_below)
{
    Cochain m = evaluate_k(t_, level, tau_below) - evaluate_k(t_, level, q.x) + evaluate_k(t_, level, q.r) -
                evaluate_k(t_, level, q.y);
    return m.canonical();
}

namespace {

// 0 for expressions free of fibre coordinates, 1 for linear ones, 2 for quadratic.
int fibre_degree(const KExpr& e)
{
    switch (e.op()) {
    case KExpr::Op::Zero:
    case KExpr::Op::Base: return 0;
    case KExpr::Op::Fib: return 1;
    case KExpr::Op::CupI: return fibre_degree(e.arg(0)) + fibre_degree(e.arg(1));
    case KExpr::Op::Add: return std::max(fibre_degree(e.arg(0)), fibre_degree(e.arg(1)));
    default: return fibre_degree(e.arg(0));
    }
}

void fibre_levels(const KExpr& e, std::vector<int>& out)
{
    if (e.op() == KExpr::Op::Fib) out.push_back(e.index());
    for (std::size_t i = 0; i < e.arity(); ++i) fibre_levels(e.arg(i), out);
}

// Squares U ⌣_i U with U linear over stages whose k involves no fibre
// coordinate (so U(x) - U(r) is a cocycle) have M = ±A ⌣_{i+1} C.
bool square_ok(const Tower& t, const KExpr& e)
{
    KExpr u = e.arg(0), v = e.arg(1);
    if (fibre_degree(u) != 1 || fibre_degree(v) != 1 || u.to_string() != v.to_string()) return false;
    std::vector<int> lv;
    fibre_levels(u, lv);
    for (int l : lv)
        if (l < 1 || fibre_degree(t.stage(l).k) != 0) return false;
    Integer mod = ring_modulus(u.group());
    if (mod == 2) return true;
    return mod == 0 && e.index() == 0 && u.degree() % 2 == 1;
}

bool natural_ok(const Tower& t, const KExpr& e)
{
    if (fibre_degree(e) <= 1) return true;
    switch (e.op()) {
    case KExpr::Op::Coboundary: return true;
    case KExpr::Op::Add: return natural_ok(t, e.arg(0)) && natural_ok(t, e.arg(1));
    case KExpr::Op::Neg:
    case KExpr::Op::Scale:
    case KExpr::Op::Hom: return natural_ok(t, e.arg(0));
    case KExpr::Op::CupI: return square_ok(t, e);
    default: return false;
    }
}

struct Triple {
    KContext x, r, y, tau;
};

Cochain natural_m(const KExpr& e, const Triple& c)
{
    return (e.evaluate(c.tau) - relabel(e.evaluate(c.x), e.group()) + relabel(e.evaluate(c.r), e.group()) -
            relabel(e.evaluate(c.y), e.group()))
        .canonical();
}

Cochain natural_M(const KExpr& e, const Triple& c)
{
    if (fibre_degree(e) <= 1) return Cochain::zero(c.x.space, e.degree() - 1, e.group());
    switch (e.op()) {
    case KExpr::Op::Coboundary: return relabel(natural_m(e.arg(0), c), e.group());
    case KExpr::Op::Add:
        return (relabel(natural_M(e.arg(0), c), e.group()) + relabel(natural_M(e.arg(1), c), e.group())).canonical();
    case KExpr::Op::Neg:
    case KExpr::Op::Scale: return relabel(natural_M(e.arg(0), c), e.group()).times(e.scalar()).canonical();
    case KExpr::Op::Hom: return apply_hom(e.hom(), natural_M(e.arg(0), c));
    case KExpr::Op::CupI: {
        KExpr u = e.arg(0);
        Cochain ur = u.evaluate(c.r);
        Cochain a = (relabel(u.evaluate(c.x), u.group()) - relabel(ur, u.group())).canonical();
        Cochain b = (relabel(u.evaluate(c.y), u.group()) - relabel(ur, u.group())).canonical();
        if (ring_modulus(u.group()) == 2) return relabel(cup_i(e.index() + 1, a, b), e.group());
        return relabel(-cup1(a, b), e.group());
    }
    default: throw std::logic_error("natural corrector: unsupported k-invariant");
    }
}

}  // namespace

bool WeakMalcev::natural(int level) const { return natural_.at(level - 1); }

Cochain WeakMalcev::natural_corrector(int level, const HatQuery& q)
{
    const FiniteSSet& s = q.label.source();
    std::vector<Cochain> tau;
    for (int j = 0; j + 1 < level; ++j)
        tau.push_back((q.x.coords[j] - q.r.coords[j] + q.y.coords[j]).canonical());
    auto ctx = [&](const StageMap& f, const std::vector<Cochain>& coords) {
        return KContext{s, [&f](const Cochain& c) { return pullback(f.base, c); }, coords};
    };
    Triple c{ctx(q.x, q.x.coords), ctx(q.r, q.r.coords), ctx(q.y, q.y.coords), ctx(q.x, tau)};
    const StageSpec& st = t_.stage(level);
    return relabel(natural_M(st.k, c), st.pi).canonical();
}

Cochain WeakMalcev::corrector(int level, const HatQuery& q, const Cochain& m)
{
    if (natural(level)) {
        Cochain out = natural_corrector(level, q);
        std::size_t nz = 0;
        for (std::size_t id = 0; id < out.size(); ++id) nz += out.coefficients().is_zero(out.value(id)) ? 0 : 1;
        bool zero_region_ok = true;
        const FiniteSSet d2 = standard_simplex(2);
        const FiniteSSet& s = q.label.source();
        for (std::size_t id = 0; id < out.size() && nz > 0; ++id) {
            if (out.coefficients().is_zero(out.value(id))) continue;
            Simplex sigma = Simplex::nondegenerate(out.degree(), id);
            int below = level - 1;
            StageSimplex xs = lower(q.x, sigma, below), rs = lower(q.r, sigma, below), ys = lower(q.y, sigma, below);
            if (hat2112_member(vertex_mask(d2.vertices(q.label(sigma))), coords_equal(xs, rs), coords_equal(rs, ys)))
                zero_region_ok = false;
        }
        Validators::instance().check("M-zero", zero_region_ok, "stage " + std::to_string(out.degree()));
        Validators::instance().check("deltaM", coboundary(out).equals(m), "stage " + std::to_string(out.degree()));
        std::lock_guard<std::mutex> lock(m_);
        natural_nonzero_ += nz;
        if (nz > 0) ++nonzero_queries_;
        return out;
    }
    const StageSpec& st = t_.stage(level);
    const FiniteSSet& s = q.label.source();
    const FiniteSSet d2 = standard_simplex(2);
    int n = st.n;
    Cochain out = Cochain::zero(s, n, st.pi);
    if (n > s.dim()) return out;

    std::lock_guard<std::mutex> lock(m_);
    auto& memo = memo_[level];
    // per n-cell of S: -1 prescribed zero, -2 memoized, else unknown index
    std::vector<long> slot(s.count(n), -1);
    std::vector<IntVector> fixed(s.count(n), IntVector(st.pi.n_generators()));
    std::vector<std::string> unknown_keys;
    std::unordered_map<std::string, long> index;
    bool zero_region_ok = true;
    for (std::size_t id = 0; id < s.count(n); ++id) {
        Simplex sigma = Simplex::nondegenerate(n, id);
        std::vector<std::size_t> seq = d2.vertices(q.label(sigma));
        StageSimplex xs = lower(q.x, sigma, level - 1), rs = lower(q.r, sigma, level - 1),
                     ys = lower(q.y, sigma, level - 1);
        bool xr = coords_equal(xs, rs), ry = coords_equal(rs, ys);
        if (hat2112_member(vertex_mask(seq), xr, ry)) continue;
        bool degenerate = false;
        for (int i = 0; i < n && !degenerate; ++i)
            degenerate = seq[i] == seq[i + 1] && degenerate_at(t_.base(), xs.base, {&xs, &rs, &ys}, i);
        if (degenerate) continue;
        std::string key;
        for (auto v : seq) key += static_cast<char>('0' + v);
        key += "|" + xs.base.to_string() + "|" + serialize(xs) + "|" + serialize(rs) + "|" + serialize(ys);
        if (auto it = memo.find(key); it != memo.end()) {
            slot[id] = -2;
            fixed[id] = it->second;
            continue;
        }
        auto [it, inserted] = index.emplace(key, static_cast<long>(unknown_keys.size()));
        if (inserted) unknown_keys.push_back(key);
        slot[id] = it->second;
    }

    std::vector<GroupEquation> eqs;
    if (n + 1 <= s.dim()) {
        for (std::size_t id = 0; id < s.count(n + 1); ++id) {
            GroupEquation e;
            e.rhs = m.value(id);
            for (int i = 0; i <= n + 1; ++i) {
                const Simplex& f = s.face_of(n + 1, id, i);
                if (!f.is_nondegenerate()) continue;
                Integer sign = i % 2 == 0 ? 1 : -1;
                if (slot[f.id] >= 0)
                    e.terms.emplace_back(static_cast<std::size_t>(slot[f.id]), sign);
                else if (slot[f.id] == -2)
                    e.rhs = sub(e.rhs, scale(sign, fixed[f.id]));
            }
            if (e.terms.empty()) {
                if (!st.pi.is_zero(e.rhs))
                    throw InvariantViolation("corrector for stage " + std::to_string(n) +
                                             ": prescribed values admit no lift through δ (correction depth exceeded)");
                continue;
            }
            eqs.push_back(std::move(e));
        }
    }
    std::vector<IntVector> sol(unknown_keys.size(), IntVector(st.pi.n_generators()));
    if (!unknown_keys.empty()) {
        auto r = solve_in_group(st.pi, unknown_keys.size(), eqs);
        if (!r) throw InvariantViolation("corrector for stage " + std::to_string(n) + ": no lift through δ");
        sol = std::move(*r);
        for (std::size_t k = 0; k < unknown_keys.size(); ++k) memo.emplace(unknown_keys[k], sol[k]);
    }
    for (std::size_t id = 0; id < s.count(n); ++id) {
        if (slot[id] >= 0) out.set(id, sol[slot[id]]);
        else if (slot[id] == -2) out.set(id, fixed[id]);
        else if (!st.pi.is_zero(out.value(id))) zero_region_ok = false;
    }
    out = out.canonical();
    Validators::instance().check("M-zero", zero_region_ok, "stage " + std::to_string(n));
    Validators::instance().check("deltaM", coboundary(out).equals(m), "stage " + std::to_string(n));
    if (!out.is_zero()) ++nonzero_queries_;
    return out;
}

StageMap WeakMalcev::tau_hat(const HatQuery& q)
{
    const FiniteSSet& s = q.label.source();
    if (!q.label.target().same_as(standard_simplex(2))) throw std::invalid_argument("tau_hat: label must map to Δ²");
    for (const StageMap* f : {&q.x, &q.r, &q.y})
        if (!f->space().same_as(s)) throw std::invalid_argument("tau_hat: maps are not defined on the query space");
    int top = q.x.level();
    if (q.r.level() != top || q.y.level() != top || top > t_.height()) throw std::invalid_argument("tau_hat: levels differ");
    if (!same_map(q.x.base, q.r.base) || !same_map(q.x.base, q.y.base))
        throw std::invalid_argument("tau_hat: triple is not over a common base");
    FiniteSSet d2 = standard_simplex(2);
    for (int d = 0; d <= s.dim(); ++d)
        for (std::size_t id = 0; id < s.count(d); ++id) {
            Simplex sigma = Simplex::nondegenerate(d, id);
            StageSimplex xs = lower(q.x, sigma, top), rs = lower(q.r, sigma, top), ys = lower(q.y, sigma, top);
            if (!hat111_member(vertex_mask(d2.vertices(q.label(sigma))), coords_equal(xs, rs), coords_equal(rs, ys)))
                throw std::invalid_argument("tau_hat: query does not lie in the domain of the operation");
        }

    StageMap tau = base_only(q.x.base);
    for (int j = 1; j <= top; ++j) {
        Cochain m = deviation(j, q, tau);
        Cochain corr = corrector(j, q, m);
        tau.coords.push_back((q.x.coords[j - 1] - q.r.coords[j - 1] + q.y.coords[j - 1] + corr).canonical());
    }
    validate_member(t_, tau, "weak Mal'cev operation");
    return tau;
}

StageMap WeakMalcev::tau(const StageMap& x, const StageMap& r, const StageMap& y)
{
    return tau_hat(HatQuery{SimplicialMap::constant(x.space(), standard_simplex(2), 2), x, r, y});
}

StageSimplex WeakMalcev::tau(const StageSimplex& x, const StageSimplex& r, const StageSimplex& y)
{
    StageMap m = tau(as_map(t_, x), as_map(t_, r), as_map(t_, y));
    return StageSimplex{x.base, m.coords};
}

namespace {

PrismMap prism_query(WeakMalcev& w, const SimplicialMap& edge_or_id, int param_dim, const StageMap& x,
                      const StageMap& r, const StageMap& y)
{
    ProductSSet p({standard_simplex(param_dim), x.space()});
    SimplicialMap label = edge_or_id.compose_after(p.projection(0));
    const SimplicialMap& pr = p.projection(1);
    StageMap h = w.tau_hat(HatQuery{label, precompose(x, pr), precompose(r, pr), precompose(y, pr)});
    return PrismMap{std::move(p), std::move(h)};
}

}  // namespace

PrismMap WeakMalcev::lambda(const StageMap& x, const StageMap& y)
{
    return prism_query(*this, edge_into_triangle(0, 2), 1, x, x, y);
}

PrismMap WeakMalcev::rho(const StageMap& x, const StageMap& y)
{
    return prism_query(*this, edge_into_triangle(1, 2), 1, x, y, y);
}

PrismMap WeakMalcev::eta(const StageMap& x)
{
    return prism_query(*this, SimplicialMap::identity(standard_simplex(2)), 2, x, x, x);
}

std::size_t WeakMalcev::memo_size(int level) const { return memo_.at(level).size(); }

std::size_t WeakMalcev::nonzero_values() const
{
    std::size_t n = natural_nonzero_;
    for (const auto& m : memo_)
        for (const auto& [k, v] : m)
            if (!is_zero(v)) ++n;
    return n;
}

HatQuery random_hat_simplex(const Tower& t, int level, int q, std::mt19937& rng, bool generic)
{
    StageSet p(t, level);
    StageSimplex x = p.random(q, rng);
    StageSimplex r = p.random_over(x.base, rng), y = p.random_over(x.base, rng);
    int pattern = generic ? 0 : std::uniform_int_distribution<int>(0, 4)(rng);
    std::vector<std::size_t> allowed;
    switch (pattern) {
    case 0: allowed = {2}; break;
    case 1: allowed = {0, 2}; r = x; break;
    case 2: allowed = {1, 2}; y = r; break;
    case 3: allowed = {0, 1, 2}; r = x; y = x; break;
    default: allowed = {0, 1}; r = x; y = x; break;
    }
    std::vector<std::size_t> seq(q + 1);
    std::uniform_int_distribution<std::size_t> pick(0, allowed.size() - 1);
    for (auto& v : seq) v = allowed[pick(rng)];
    std::sort(seq.begin(), seq.end());
    FiniteSSet d2 = standard_simplex(2);
    return HatQuery{simplex_map(d2, d2.nerve_simplex(seq)), as_map(t, x), as_map(t, r), as_map(t, y)};
}

std::size_t WeakMalcev::validate_random(int level, int count, std::mt19937& rng)
{
    std::size_t nonzero = 0;
    int n = t_.stage(level).n;
    for (int k = 0; k < count; ++k) {
        HatQuery q = random_hat_simplex(t_, level, n + 1 + k % 2, rng, k % 2 == 0);
        StageMap out = tau_hat(q);
        StageMap below = out.truncated(level - 1);
        Cochain m = deviation(level, q, below);
        Cochain corr = (out.coords[level - 1] - q.x.coords[level - 1] + q.r.coords[level - 1] - q.y.coords[level - 1]).canonical();
        if (!corr.is_zero()) ++nonzero;
        Validators::instance().check("deltaM", coboundary(corr).equals(m), "random query");
    }
    return nonzero;
}

// ---------------------------------------------------------------------------
// Operation on classes

struct ClassMalcev::Cyl {
    ProductSSet prism;
    Subcomplex t;
    std::shared_ptr<RelativeComplex> pair;
    SimplicialMap i0, label_t, pr_t;
};

ClassMalcev::ClassMalcev(WeakMalcev& w, const Subcomplex& a) : w_(w), a_(a)
{
    const FiniteSSet& x = a.parent();
    if (a.sset().empty()) return;
    FiniteSSet d1 = standard_simplex(1);
    ProductSSet prism({d1, x});
    Subcomplex t = Subcomplex::from_predicate(prism.sset(), [&](const Simplex& s) {
        const auto& c = prism.components(s.base_dim, s.id);
        return (c[0].base_dim == 0 && c[0].id == 1) || a.contains(c[1]);
    });
    auto pair = std::make_shared<RelativeComplex>(prism.sset(), t);
    SimplicialMap i0 = prism.pairing({SimplicialMap::constant(x, d1, 0), SimplicialMap::identity(x)});
    SimplicialMap label = edge_into_triangle(0, 2).compose_after(prism.projection(0)).compose_after(t.inclusion());
    SimplicialMap pr = prism.projection(1).compose_after(t.inclusion());
    cyl_ = std::make_shared<Cyl>(Cyl{prism, t, std::move(pair), i0, label, pr});
}

StageMap ClassMalcev::operator()(const StageMap& l1, const StageMap& l0, const StageMap& l2)
{
    for (const StageMap* l : {&l1, &l2}) {
        if (!same_map(l->base, l0.base) || l->level() != l0.level()) throw std::invalid_argument("malcev on classes: maps over different bases");
        for (int j = 0; j < l0.level(); ++j)
            if (!restrict_to(l->coords[j], a_).equals(restrict_to(l0.coords[j], a_)))
                throw std::invalid_argument("malcev on classes: representatives differ on A");
    }
    const Tower& t = w_.tower();
    if (!cyl_) return w_.tau(l1, l0, l2);
    const Cyl& c = *cyl_;
    StageMap h = w_.tau_hat(HatQuery{c.label_t, precompose(l1, c.pr_t), precompose(l0, c.pr_t), precompose(l2, c.pr_t)});
    StageMap ext = base_only(l0.base.compose_after(c.prism.projection(1)));
    for (int j = 1; j <= l0.level(); ++j)
        ext = lift_homotopy(*c.pair, t, ext, extend_by_zero(h.coords[j - 1], c.t));
    StageMap out = precompose(ext, c.i0);
    bool ok = true;
    for (int j = 0; j < out.level(); ++j) ok = ok && restrict_to(out.coords[j], a_).equals(restrict_to(l0.coords[j], a_));
    Validators::instance().check("triangle", ok && same_map(out.base, l0.base), "malcev on classes");
    return out;
}

StageMap ClassOperation::multiple(const StageMap& l, const StageMap& l0, Integer k)
{
    if (k == 0) return l0;
    StageMap p = l;
    if (k < 0) {
        p = (*this)(l0, l, l0);
        k = -k;
    }
    if (k == 1) return p;
    std::optional<StageMap> acc;
    while (k > 0) {
        if (k % 2 == 1) acc = acc ? (*this)(*acc, l0, p) : p;
        k /= 2;
        if (k > 0) p = (*this)(p, l0, p);
    }
    return *acc;
}

StageMap ClassOperation::affine(const std::vector<StageMap>& ls, const IntVector& t)
{
    if (ls.empty() || ls.size() != t.size()) throw std::invalid_argument("affine: size mismatch");
    Integer sum = 0;
    for (const auto& v : t) sum += v;
    if (sum != 1) throw std::invalid_argument("affine: coefficients must sum to 1");
    StageMap acc = ls[0];
    for (std::size_t i = 1; i < ls.size(); ++i) {
        if (t[i] == 0) continue;
        acc = (*this)(acc, ls[0], multiple(ls[i], ls[0], t[i]));
    }
    return acc;
}

}  // namespace heapstone
