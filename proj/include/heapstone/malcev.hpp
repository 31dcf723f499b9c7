#pragma once

#include "heapstone/tower.hpp"

#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

namespace heapstone {

/// A query of the extended operation: a finite space S with a label map
/// S -> Δ² and three maps S -> P_level over one base map, jointly landing
/// in δ̂^{111} P_level.
struct HatQuery {
    SimplicialMap label;
    StageMap x, r, y;
};

/// A map out of Δ^k × S, with the product it lives on.
struct PrismMap {
    ProductSSet product;
    StageMap map;
};

/// Weak Mal'cev structure on every stage of a tower, as one map
/// τ̂ : δ̂^{111} P_j -> P_j over B restricting to the projection on δ̂^{21,12}:
///   τ̂_j(x, r, y) = (τ̂_{j-1}, c_x - c_r + c_y + M_j)
/// with δM_j = m_j = k_j τ̂_{j-1} - k_j x + k_j r - k_j y. The label-2 part
/// is τ, the part over the edge {0,2} is λ, over {1,2} is ρ, and the whole
/// Δ² over the diagonal is η.
class WeakMalcev {
public:
    explicit WeakMalcev(const Tower& t);
    const Tower& tower() const { return t_; }

    StageMap tau_hat(const HatQuery& q);
    /// Label 2: τ(x, r, y) on maps.
    StageMap tau(const StageMap& x, const StageMap& r, const StageMap& y);
    StageSimplex tau(const StageSimplex& x, const StageSimplex& r, const StageSimplex& y);
    /// λ_{x,y} : Δ¹×S -> P from y (at 0) to τ(x,x,y) (at 1); ρ_{x,y} from x to τ(x,y,y).
    PrismMap lambda(const StageMap& x, const StageMap& y);
    PrismMap rho(const StageMap& x, const StageMap& y);
    /// η_x : Δ²×S -> P on the diagonal triple (x,x,x).
    PrismMap eta(const StageMap& x);

    /// m_j on the query space (level j uses the first j-1 coordinates).
    Cochain deviation(int level, const HatQuery& q, const StageMap& tau_below);
    /// M_j on the query space. When natural(level), M_j is a closed formula in
    /// the coordinates (a ⌣_{i+1} b for each square U ⌣_i U in k_j, with
    /// a = U(x) - U(r), b = U(y) - U(r)); otherwise the values it needs are
    /// solved for and memoized.
    Cochain corrector(int level, const HatQuery& q, const Cochain& m);
    /// M_j has a closed formula, valid on all of δ̂^{111} P_{j-1}. The solved
    /// fallback is only constrained by the queried (n+1)-cells, so classes it
    /// produces on spaces without such cells are not checked.
    bool natural(int level) const;

    /// Validates δM = m, M = 0 on δ̂^{21,12} and membership on random
    /// queried q-simplices of δ̂^{111} P_{level-1}; returns how many had M ≠ 0.
    std::size_t validate_random(int level, int count, std::mt19937& rng);

    std::size_t memo_size(int level) const;
    /// Nonzero corrector values produced (cells for the closed formula,
    /// memo entries otherwise), over all levels.
    std::size_t nonzero_values() const;
    std::size_t queries_with_nonzero_corrector() const { return nonzero_queries_; }

private:
    const Tower& t_;
    std::vector<std::unordered_map<std::string, IntVector>> memo_;  // per level
    std::size_t nonzero_queries_ = 0;
    std::size_t natural_nonzero_ = 0;
    std::vector<bool> natural_;
    Cochain natural_corrector(int level, const HatQuery& q);
    std::mutex m_;
};

/// Random simplex of δ̂^{111} P_level over a random base simplex: the label
/// pattern and the forced equalities are chosen at random.
HatQuery random_hat_simplex(const Tower& t, int level, int q, std::mt19937& rng, bool generic = false);

/// A Mal'cev operation on representatives of homotopy classes rel A.
class ClassOperation {
public:
    virtual ~ClassOperation() = default;
    virtual StageMap operator()(const StageMap& l1, const StageMap& l0, const StageMap& l2) = 0;
    /// l0 + k(l - l0) (k ∈ Z), by doubling.
    StageMap multiple(const StageMap& l, const StageMap& l0, Integer k);
    /// Σ t_i ℓ_i with Σ t_i = 1.
    StageMap affine(const std::vector<StageMap>& ls, const IntVector& t);
};

/// Induced operation on [X, P_j]^A_B: representatives ℓ1, ℓ0, ℓ2 that agree
/// with f on A give ℓ with [ℓ] = t([ℓ1],[ℓ0],[ℓ2]) and ℓ|A = f. For A ≠ ∅
/// the λ_{f,f} homotopy on Δ¹×A and τ on 1×X are extended over Δ¹×X.
class ClassMalcev : public ClassOperation {
public:
    ClassMalcev(WeakMalcev& w, const Subcomplex& a);
    StageMap operator()(const StageMap& l1, const StageMap& l0, const StageMap& l2) override;

private:
    WeakMalcev& w_;
    Subcomplex a_;
    struct Cyl;
    std::shared_ptr<Cyl> cyl_;
};

}  // namespace heapstone
