#pragma once

#include "heapstone/abelian.hpp"
#include "heapstone/simplicial.hpp"

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace heapstone {

/// Normalized cochain with coefficients in pi: one coordinate vector per
/// nondegenerate simplex of the given degree. Degenerate simplices carry 0.
class Cochain {
public:
    Cochain() = default;
    Cochain(FiniteSSet space, int degree, FGAbelianGroup pi, std::vector<IntVector> values);
    static Cochain zero(FiniteSSet space, int degree, FGAbelianGroup pi);

    const FiniteSSet& space() const { return space_; }
    int degree() const { return degree_; }
    const FGAbelianGroup& coefficients() const { return pi_; }
    std::size_t size() const { return values_.size(); }

    const IntVector& value(std::size_t id) const { return values_[id]; }
    void set(std::size_t id, IntVector v);
    void add_to(std::size_t id, const IntVector& v);
    /// Value on a simplex of dimension degree(); 0 on degenerate simplices.
    IntVector at(const Simplex& s) const;

    Cochain canonical() const;
    bool is_zero() const;
    /// Equality of values modulo the relations of pi.
    bool equals(const Cochain& o) const;
    /// Cells with a nonzero value, as "id:value" pairs.
    std::string to_string() const;

    Cochain operator+(const Cochain& o) const;
    Cochain operator-(const Cochain& o) const;
    Cochain operator-() const;
    Cochain times(const Integer& k) const;

private:
    void check_compatible(const Cochain& o) const;
    FiniteSSet space_;
    int degree_ = 0;
    FGAbelianGroup pi_;
    std::vector<IntVector> values_;
};

Cochain coboundary(const Cochain& c);
/// f^* c on the source of f.
Cochain pullback(const SimplicialMap& f, const Cochain& c);
/// sigma^* c as a cochain on the standard simplex of dimension sigma.dim.
Cochain pullback_simplex(const Cochain& c, const Simplex& sigma);
/// Pullback of a cochain on Δ^q along a monotone theta : [m] -> [q].
Cochain pullback_order(const Cochain& c, const OrderMap& theta);
/// Restriction to a subcomplex (as a cochain on A.sset()).
Cochain restrict_to(const Cochain& c, const Subcomplex& a);
/// Cochain on the parent agreeing with c on A and vanishing elsewhere.
Cochain extend_by_zero(const Cochain& c, const Subcomplex& a);
Cochain apply_hom(const GroupHom& h, const Cochain& c);

/// Nondegenerate n-simplices of Δ^q with their vertex inclusions [n] -> [q].
const std::vector<std::pair<std::size_t, OrderMap>>& delta_faces(int q, int n);
/// The map Δ^q -> X classifying a q-simplex.
SimplicialMap simplex_map(const FiniteSSet& x, const Simplex& sigma);

/// Modulus of a cyclic coefficient group Z/m (0 for Z). Throws unless pi has
/// exactly one generator.
Integer ring_modulus(const FGAbelianGroup& pi);

/// Alexander–Whitney cup product (a ⌣ b)(σ) = a(σ|0..p) b(σ|p..p+q).
/// Both operands need the same cyclic ring; the result uses a's group.
Cochain cup(const Cochain& a, const Cochain& b);

/// Steenrod's cup-1, fixed sign convention: for u of degree p, v of degree q
/// and σ of dimension p+q-1,
///   (u ⌣₁ v)(σ) = Σ_{i<p} (-1)^{(p-i)(q+1)} u(σ|0..i, i+q..p+q-1) v(σ|i..i+q),
/// so that δ(u⌣₁v) = (-1)^{p+q-1} u⌣v + (-1)^{pq+p+q} v⌣u + δu⌣₁v + (-1)^p u⌣₁δv.
Cochain cup1(const Cochain& a, const Cochain& b);
int cup1_sign(int p, int q, int i);

/// Cup-i for i >= 2 with Z/2 coefficients only (no signs), by the subset
/// formula: sum over U ⊆ [n] with |U| = n - i of u(d_{U-} σ) v(d_{U+} σ),
/// where U- holds the u_j ≡ j (mod 2) and U+ the rest. i = 0, 1 dispatch to
/// cup and cup1.
Cochain cup_i(int i, const Cochain& a, const Cochain& b);

/// Normalized cochains of a pair (X, A): the cells of X outside A. The
/// integral complex is shrunk once by unit-pivot reductions; solving and
/// cohomology then work on the small reduced complex for any coefficients.
class RelativeComplex {
public:
    RelativeComplex(FiniteSSet x, Subcomplex a);

    const FiniteSSet& space() const { return x_; }
    const Subcomplex& subcomplex() const { return a_; }
    bool relative_cell(int d, std::size_t id) const;
    /// Cells per degree that survive the reduction.
    std::vector<std::size_t> reduced_sizes() const;
    std::size_t reduction_steps() const { return steps_.size(); }

    bool vanishes_on_subcomplex(const Cochain& c) const;
    bool is_relative_cocycle(const Cochain& c) const;

    /// Some c vanishing on A with δc = t, or nullopt when [t] ≠ 0.
    /// Throws std::invalid_argument unless t is a relative cocycle.
    std::optional<Cochain> solve(const Cochain& t) const;

    class Cohomology {
    public:
        const FGAbelianGroup& group() const { return group_; }
        int degree() const { return degree_; }
        GroupElement class_of(const Cochain& z) const;
        Cochain representative(const GroupElement& cls) const;
        /// Representative cocycles of the generators of group().
        std::vector<Cochain> generator_representatives() const;

    private:
        friend class RelativeComplex;
        const RelativeComplex* owner_ = nullptr;
        int degree_ = 0;
        FGAbelianGroup pi_;
        FGAbelianGroup group_;
        std::shared_ptr<const CohomologyGroup> dense_;
    };
    /// H^k(X, A; pi). The returned object refers to this complex.
    std::shared_ptr<const Cohomology> cohomology(int k, const FGAbelianGroup& pi) const;

private:
    struct Step {
        int k;            // a in degree k, b in degree k+1
        std::size_t a, b; // positions among relative cells
        int eps;          // coefficient of b in δa
        std::vector<std::pair<std::size_t, Integer>> beta;   // row b of δ^k without a
        std::vector<std::pair<std::size_t, Integer>> alpha;  // column a of δ^k without b
    };
    using Vec = std::vector<IntVector>;

    Vec to_relative(const Cochain& c) const;
    Cochain from_relative(int d, const Vec& v, const FGAbelianGroup& pi) const;
    void forward(int d, Vec& v, std::vector<std::pair<std::size_t, IntVector>>* h_contrib) const;
    void backward_g(int d, Vec& v) const;
    IntVector to_dense(int d, const Vec& v, std::size_t p) const;
    Vec from_dense(int d, const IntVector& y, std::size_t p) const;
    void reduce();
    FGAbelianGroup reduced_group(int d, const FGAbelianGroup& pi) const;
    GroupHom reduced_differential(int d, const FGAbelianGroup& pi) const;

    FiniteSSet x_;
    Subcomplex a_;
    std::vector<std::vector<std::size_t>> cells_;  // relative cells per degree (simplex ids)
    std::vector<std::vector<long>> pos_;           // simplex id -> position or -1
    std::vector<Step> steps_;
    std::vector<std::vector<char>> alive_;
    std::vector<std::vector<std::size_t>> alive_list_;
    std::vector<std::vector<long>> alive_pos_;
    std::vector<IntMatrix> reduced_;  // δ'^k: alive(k+1) × alive(k)

    struct SolverEntry {
        int k;
        FGAbelianGroup pi;
        std::shared_ptr<const LinearSolver> solver;
    };
    mutable std::mutex cache_mutex_;
    mutable std::vector<SolverEntry> solvers_;
    mutable std::vector<std::shared_ptr<const Cohomology>> cohomologies_;
};

}  // namespace heapstone
