#pragma once

#include "heapstone/intlinalg.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace heapstone {

class GroupElement;

/// Z^n modulo the column span of a relation matrix. Copies share the same
/// underlying presentation; two handles denote the same group only if they
/// were copied from one another.
class FGAbelianGroup {
public:
    FGAbelianGroup();  // the trivial group on no generators
    FGAbelianGroup(std::size_t n_generators, IntMatrix relations);

    static FGAbelianGroup free(std::size_t n);
    /// Z/k, or Z when k == 0.
    static FGAbelianGroup cyclic(const Integer& k);
    static FGAbelianGroup integers() { return cyclic(0); }
    /// Direct sum Z^(a.n + b.n) with block relations.
    static FGAbelianGroup direct_sum(const FGAbelianGroup& a, const FGAbelianGroup& b);

    std::size_t n_generators() const { return d_->n; }
    const IntMatrix& relations() const { return d_->relations; }
    bool same_as(const FGAbelianGroup& other) const { return d_ == other.d_; }

    GroupElement zero() const;
    GroupElement generator(std::size_t i) const;
    GroupElement element(IntVector coords) const;

    /// Canonical coordinates: reduce modulo the relation lattice.
    IntVector canonical(const IntVector& coords) const;
    bool is_zero(const IntVector& coords) const;
    bool equal(const IntVector& a, const IntVector& b) const { return is_zero(sub(a, b)); }

    /// Nontrivial torsion invariant factors d_1 | d_2 | ... (all > 1).
    IntVector torsion() const;
    std::size_t free_rank() const;
    bool is_trivial() const { return free_rank() == 0 && torsion().empty(); }
    /// Order of the group, or nullopt if infinite.
    std::optional<Integer> order() const;

    /// Isomorphism to Z/d_1 + ... + Z/d_t + Z^r: coordinates in the cyclic
    /// summands (torsion first, entries reduced to [0, d_i)), then the free part.
    IntVector smith_coordinates(const IntVector& coords) const;
    IntVector from_smith_coordinates(const IntVector& s) const;
    /// All elements of a finite group, in smith-coordinate lexicographic order.
    std::vector<GroupElement> enumerate(std::size_t limit = 1u << 20) const;

    /// "0", "Z", "Z/2", "Z^2 + Z/2 + Z/4", ...
    std::string type_string() const;

private:
    struct Data {
        std::size_t n = 0;
        IntMatrix relations;
        SmithTransforms smith;
        // Rows of P that survive in canonical coordinates: (row index, modulus; 0 = free).
        std::vector<std::pair<std::size_t, Integer>> summands;
    };
    std::shared_ptr<const Data> d_;
};

class GroupElement {
public:
    GroupElement() = default;
    GroupElement(FGAbelianGroup group, IntVector coords);

    const FGAbelianGroup& group() const { return group_; }
    const IntVector& coords() const { return coords_; }

    GroupElement canonical() const;
    bool is_zero() const { return group_.is_zero(coords_); }

    GroupElement operator+(const GroupElement& o) const;
    GroupElement operator-(const GroupElement& o) const;
    GroupElement operator-() const;
    GroupElement times(const Integer& k) const;
    /// Equality in the group (not of coordinate vectors); rejects cross-group comparison.
    bool operator==(const GroupElement& o) const;

    std::string to_string() const;

private:
    void check_owner(const GroupElement& o) const;
    FGAbelianGroup group_;
    IntVector coords_;
};

GroupElement operator*(const Integer& k, const GroupElement& x);

/// Homomorphism given on generators; `matrix` is target.n × source.n.
class GroupHom {
public:
    GroupHom() = default;
    /// Throws std::invalid_argument unless relations of the source map into
    /// the relation lattice of the target.
    GroupHom(FGAbelianGroup source, FGAbelianGroup target, IntMatrix matrix);

    static GroupHom identity(const FGAbelianGroup& g);
    static GroupHom zero(const FGAbelianGroup& s, const FGAbelianGroup& t);

    const FGAbelianGroup& source() const { return source_; }
    const FGAbelianGroup& target() const { return target_; }
    const IntMatrix& matrix() const { return matrix_; }

    GroupElement operator()(const GroupElement& x) const;
    IntVector apply(const IntVector& coords) const { return matrix_ * coords; }
    GroupHom compose_after(const GroupHom& inner) const;  // this ∘ inner

    /// Some x with f(x) = y, if one exists.
    std::optional<GroupElement> preimage(const GroupElement& y) const;
    bool is_zero() const;

private:
    FGAbelianGroup source_, target_;
    IntMatrix matrix_;
};

struct Subgroup {
    FGAbelianGroup group;
    GroupHom inclusion;
};

struct Quotient {
    FGAbelianGroup group;
    GroupHom projection;
};

Subgroup hom_kernel(const GroupHom& f);
Subgroup hom_image(const GroupHom& f);
Quotient hom_cokernel(const GroupHom& f);
/// Subgroup of g generated by the given elements.
Subgroup generated_subgroup(const FGAbelianGroup& g, const std::vector<GroupElement>& gens);
/// g modulo the subgroup generated by the given elements.
Quotient quotient(const FGAbelianGroup& g, const std::vector<GroupElement>& gens);

/// Basis of the lattice spanned by the columns of `gens` (a matrix with
/// `dim` rows); returned as columns.
IntMatrix lattice_basis(const IntMatrix& gens);

/// ker(d_out) / im(d_in) at the middle group C.
class CohomologyGroup {
public:
    const FGAbelianGroup& group() const { return group_; }
    const FGAbelianGroup& cochains() const { return cochains_; }

    bool is_cocycle(const IntVector& z) const;
    /// Class of a cocycle; throws std::invalid_argument for non-cocycles.
    GroupElement class_of(const IntVector& z) const;
    /// A cocycle representing the class.
    IntVector representative(const GroupElement& cls) const;

private:
    friend CohomologyGroup cohomology(const GroupHom& d_in, const GroupHom& d_out);
    FGAbelianGroup group_;
    FGAbelianGroup cochains_;
    GroupHom d_out_;
    IntMatrix basis_;    // cochains.n × k, kernel generators
    std::shared_ptr<const LinearSolver> solver_;  // [basis | relations of cochains]
};

/// Rejects non-composable inputs and pairs with d_out ∘ d_in ≠ 0.
CohomologyGroup cohomology(const GroupHom& d_in, const GroupHom& d_out);

/// Cohomology of a cochain complex given as a list of differentials
/// d^0: C^0 → C^1, d^1: C^1 → C^2, ...; degree n uses d^{n-1} and d^n, with
/// zero maps substituted beyond the ends.
CohomologyGroup cohomology(const std::vector<GroupHom>& complex, std::size_t degree);

}  // namespace heapstone
