#pragma once

#include "heapstone/cochain.hpp"

#include <optional>
#include <random>
#include <vector>

namespace heapstone {

/// A q-simplex of K(pi,n) or E(pi,n): a normalized n-cochain on Δ^q.
using EMSimplex = Cochain;

/// K(pi,n)_q = Z^n(Δ^q; pi) and E(pi,n)_q = C^n(Δ^q; pi); faces and
/// degeneracies are pullbacks along cofaces and codegeneracies.
class EMSpace : public LocallyEffectiveSet<EMSimplex> {
public:
    enum class Kind { K, E };
    EMSpace(Kind kind, int n, FGAbelianGroup pi);

    Kind kind() const { return kind_; }
    int degree() const { return n_; }
    const FGAbelianGroup& coefficients() const { return pi_; }

    int dimension_of(const EMSimplex& s) const override { return s.space().dim(); }
    EMSimplex face(const EMSimplex& s, int i) const override;
    EMSimplex degeneracy(const EMSimplex& s, int j) const override;
    bool equal(const EMSimplex& a, const EMSimplex& b) const override { return a.equals(b); }

    bool contains(const EMSimplex& s) const;
    EMSimplex zero(int q) const { return Cochain::zero(standard_simplex(q), n_, pi_); }
    /// Every q-simplex; pi must be finite.
    std::vector<EMSimplex> enumerate(int q, std::size_t limit = 1u << 16) const;
    /// Uniformly random values (K: the coboundary of a random (n-1)-cochain, or 0 for n = 0).
    EMSimplex random(int q, std::mt19937& rng) const;

private:
    Kind kind_;
    int n_;
    FGAbelianGroup pi_;
};

EMSimplex em_face(const EMSimplex& s, int i);
EMSimplex em_degeneracy(const EMSimplex& s, int j);
EMSimplex em_add(const EMSimplex& a, const EMSimplex& b);
EMSimplex em_neg(const EMSimplex& a);
/// δ : E(pi,n) -> K(pi,n+1).
EMSimplex delta_map(const EMSimplex& s);

/// Σ coef_v x_v = rhs in pi, over unknowns x_v in pi.
struct GroupEquation {
    std::vector<std::pair<std::size_t, Integer>> terms;
    IntVector rhs;
};
/// Solves a system over pi; the zero assignment is returned whenever it works.
std::optional<std::vector<IntVector>> solve_in_group(const FGAbelianGroup& pi, std::size_t unknowns,
                                                     const std::vector<GroupEquation>& eqs);

/// c on Δ^q with δc = z and prescribed faces d_i c = constraint_i. Throws
/// std::invalid_argument when constraints disagree on common faces.
std::optional<EMSimplex> lift_through_delta_on_simplex(const EMSimplex& z,
                                                       const std::vector<std::pair<int, EMSimplex>>& constraints);

/// Class in H^n(X, A; pi) of a relative cocycle (the homotopy class of the
/// corresponding map X -> K(pi,n) rel A). Rejects non-cocycles.
GroupElement classify_map_to_K(const RelativeComplex& pair, const Cochain& cocycle);

}  // namespace heapstone
