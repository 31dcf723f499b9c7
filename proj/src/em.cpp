#include "heapstone/em.hpp"

#include <map>
#include <stdexcept>

namespace heapstone {

EMSpace::EMSpace(Kind kind, int n, FGAbelianGroup pi) : kind_(kind), n_(n), pi_(std::move(pi))
{
    if (n < 0) throw std::invalid_argument("EMSpace: negative degree");
}

EMSimplex em_face(const EMSimplex& s, int i)
{
    int q = s.space().dim();
    if (q < 1 || i < 0 || i > q) throw std::out_of_range("em_face: index out of range");
    return pullback_order(s, coface(q, i));
}

EMSimplex em_degeneracy(const EMSimplex& s, int j)
{
    int q = s.space().dim();
    if (j < 0 || j > q) throw std::out_of_range("em_degeneracy: index out of range");
    return pullback_order(s, codegeneracy(q, j));
}

EMSimplex EMSpace::face(const EMSimplex& s, int i) const { return em_face(s, i); }
EMSimplex EMSpace::degeneracy(const EMSimplex& s, int j) const { return em_degeneracy(s, j); }

bool EMSpace::contains(const EMSimplex& s) const
{
    int q = s.space().dim();
    if (q < 0 || !s.space().same_as(standard_simplex(q)) || s.degree() != n_ || !s.coefficients().same_as(pi_))
        return false;
    return kind_ == Kind::E || coboundary(s).is_zero();
}

std::vector<EMSimplex> EMSpace::enumerate(int q, std::size_t limit) const
{
    auto elems = pi_.enumerate();
    EMSimplex base = zero(q);
    std::vector<EMSimplex> out;
    std::vector<std::size_t> digit(base.size(), 0);
    while (true) {
        EMSimplex c = base;
        for (std::size_t i = 0; i < digit.size(); ++i) c.set(i, elems[digit[i]].coords());
        if (contains(c)) {
            if (out.size() == limit) throw std::length_error("EMSpace::enumerate: too many simplices");
            out.push_back(c);
        }
        std::size_t i = 0;
        while (i < digit.size() && ++digit[i] == elems.size()) digit[i++] = 0;
        if (i == digit.size()) break;
    }
    return out;
}

EMSimplex EMSpace::random(int q, std::mt19937& rng) const
{
    std::uniform_int_distribution<int> u(-4, 4);
    auto fill = [&](Cochain c) {
        for (std::size_t i = 0; i < c.size(); ++i) {
            IntVector v(pi_.n_generators());
            for (auto& e : v) e = u(rng);
            c.set(i, v);
        }
        return c.canonical();
    };
    if (kind_ == Kind::E) return fill(zero(q));
    if (n_ == 0) return zero(q);
    return coboundary(fill(Cochain::zero(standard_simplex(q), n_ - 1, pi_))).canonical();
}

EMSimplex em_add(const EMSimplex& a, const EMSimplex& b) { return (a + b).canonical(); }
EMSimplex em_neg(const EMSimplex& a) { return (-a).canonical(); }
EMSimplex delta_map(const EMSimplex& s) { return coboundary(s).canonical(); }

std::optional<std::vector<IntVector>> solve_in_group(const FGAbelianGroup& pi, std::size_t unknowns,
                                                     const std::vector<GroupEquation>& eqs)
{
    std::size_t p = pi.n_generators();
    std::vector<IntVector> sol(unknowns, IntVector(p));
    bool zero_works = true;
    for (const auto& e : eqs)
        if (!pi.is_zero(e.rhs)) zero_works = false;
    if (zero_works) return sol;
    const IntMatrix& rel = pi.relations();
    SparseSystem sys(unknowns * p);
    for (const auto& e : eqs) {
        std::size_t slack = sys.variable_count();
        for (std::size_t s = 0; s < rel.cols(); ++s) sys.add_variable();
        for (std::size_t j = 0; j < p; ++j) {
            std::map<std::size_t, Integer> row;
            for (const auto& [v, coef] : e.terms) row[v * p + j] += coef;
            for (std::size_t s = 0; s < rel.cols(); ++s)
                if (rel(j, s) != 0) row[slack + s] = -rel(j, s);
            sys.add_equation(std::move(row), e.rhs[j]);
        }
    }
    auto x = sys.solve();
    if (!x) return std::nullopt;
    for (std::size_t v = 0; v < unknowns; ++v)
        for (std::size_t j = 0; j < p; ++j) sol[v][j] = (*x)[v * p + j];
    for (auto& v : sol) v = pi.canonical(v);
    return sol;
}

std::optional<EMSimplex> lift_through_delta_on_simplex(const EMSimplex& z,
                                                       const std::vector<std::pair<int, EMSimplex>>& constraints)
{
    int q = z.space().dim(), n = z.degree() - 1;
    if (n < 0) throw std::invalid_argument("lift_through_delta_on_simplex: z must have positive degree");
    const FGAbelianGroup& pi = z.coefficients();
    FiniteSSet d = standard_simplex(q);
    if (!z.space().same_as(d)) throw std::invalid_argument("lift_through_delta_on_simplex: z is not on a standard simplex");
    if (!coboundary(z).is_zero()) throw std::invalid_argument("lift_through_delta_on_simplex: z is not a cocycle");
    // prescribed values on n-faces
    std::vector<std::optional<IntVector>> fixed(d.count(n <= q ? n : 0));
    if (n > q) return Cochain::zero(d, n, pi);
    for (const auto& [i, c] : constraints) {
        if (i < 0 || i > q) throw std::out_of_range("constraint face index out of range");
        if (c.degree() != n || !c.coefficients().same_as(pi) || !c.space().same_as(standard_simplex(q - 1)))
            throw std::invalid_argument("constraint has the wrong shape");
        for (const auto& [fid, theta] : delta_faces(q - 1, n)) {
            OrderMap img = compose(coface(q, i), theta);
            Simplex s = d.apply(Simplex::nondegenerate(q, 0), img);
            auto& slot = fixed[s.id];
            IntVector v = pi.canonical(c.value(fid));
            if (slot && !pi.equal(*slot, v)) throw std::invalid_argument("constraints disagree on a common face");
            slot = v;
        }
    }
    std::vector<long> var(fixed.size(), -1);
    std::size_t unknowns = 0;
    for (std::size_t id = 0; id < fixed.size(); ++id)
        if (!fixed[id]) var[id] = static_cast<long>(unknowns++);
    std::vector<GroupEquation> eqs;
    if (n + 1 <= q)
        for (std::size_t id = 0; id < d.count(n + 1); ++id) {
            GroupEquation e{{}, z.value(id)};
            for (int i = 0; i <= n + 1; ++i) {
                const Simplex& f = d.face_of(n + 1, id, i);
                int sign = i % 2 ? -1 : 1;
                if (var[f.id] >= 0)
                    e.terms.emplace_back(static_cast<std::size_t>(var[f.id]), sign);
                else
                    e.rhs = sub(e.rhs, scale(sign, *fixed[f.id]));
            }
            eqs.push_back(std::move(e));
        }
    auto sol = solve_in_group(pi, unknowns, eqs);
    if (!sol) return std::nullopt;
    Cochain c = Cochain::zero(d, n, pi);
    for (std::size_t id = 0; id < fixed.size(); ++id) c.set(id, var[id] >= 0 ? (*sol)[static_cast<std::size_t>(var[id])] : *fixed[id]);
    return c;
}

GroupElement classify_map_to_K(const RelativeComplex& pair, const Cochain& cocycle)
{
    return pair.cohomology(cocycle.degree(), cocycle.coefficients())->class_of(cocycle);
}

}  // namespace heapstone
