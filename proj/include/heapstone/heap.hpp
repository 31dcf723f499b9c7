#pragma once

#include "heapstone/abelian.hpp"

#include <optional>
#include <string>
#include <vector>

namespace heapstone {

/// t(x, r, y) = x - r + y, canonicalized.
GroupElement malcev(const GroupElement& x, const GroupElement& r, const GroupElement& y);

/// EMPTY, or the affine span { sum t_i x_i : sum t_i = 1 } of a nonempty
/// generator list inside an ambient group.
class AbelianHeap {
public:
    static AbelianHeap empty() { return AbelianHeap(); }
    AbelianHeap(FGAbelianGroup ambient, std::vector<GroupElement> generators);
    /// The whole group viewed as a heap (generators 0, e_1, ..., e_n).
    static AbelianHeap whole(const FGAbelianGroup& g);

    bool is_empty() const { return empty_; }
    const FGAbelianGroup& ambient() const;
    const std::vector<GroupElement>& generators() const { return generators_; }
    const GroupElement& base_point() const;

    bool contains(const GroupElement& x) const;
    /// Subgroup spanned by x_i - x_1.
    Subgroup difference_subgroup() const;
    /// 0 for EMPTY, nullopt when infinite.
    std::optional<Integer> cardinality() const;
    /// Same span; generators x_1 and x_1 + d_k for a Smith basis d_k of the differences.
    AbelianHeap reduce_generators() const;

    /// "EMPTY", "1 element", "2 elements; pointed type: Z/2", "infinite; pointed type: Z".
    std::string to_string() const;

private:
    AbelianHeap() = default;
    bool empty_ = true;
    FGAbelianGroup ambient_;
    std::vector<GroupElement> generators_;
};

/// Group structure on a heap with a chosen neutral element: x + y = t(x, 0, y).
struct PointedHeap {
    FGAbelianGroup group;   // the difference subgroup
    GroupHom inclusion;     // group -> ambient
    GroupElement zero;      // in the ambient group

    /// Element of `group` corresponding to the heap element x.
    GroupElement to_group(const GroupElement& x) const;
    GroupElement from_group(const GroupElement& d) const;
};

/// Throws std::invalid_argument if zero is not a member of H (or H is EMPTY).
PointedHeap point_heap(const AbelianHeap& H, const GroupElement& zero);

/// Affine map h(x) = linear(x - x_1) + h(x_1) between heaps, defined on the
/// ambient groups. Construction checks that generators land in the target.
class HeapHom {
public:
    HeapHom(AbelianHeap source, AbelianHeap target, GroupHom linear, GroupElement base_value);

    const AbelianHeap& source() const { return source_; }
    const AbelianHeap& target() const { return target_; }
    const GroupHom& linear() const { return linear_; }

    GroupElement operator()(const GroupElement& x) const;
    /// Images of the source generators.
    std::vector<GroupElement> generator_values() const;
    /// h(t(x,r,y)) == t(h(x),h(r),h(y)) on all generator triples.
    bool respects_malcev() const;

private:
    AbelianHeap source_, target_;
    GroupHom linear_;
    GroupElement base_value_;
};

/// Integer t with sum t_i = 1 and sum t_i images_i = 0, or nullopt.
std::optional<IntVector> solve_zero_preimage(const std::vector<GroupElement>& images);
std::optional<IntVector> solve_zero_preimage(const HeapHom& k);

/// Combination sum t_i x_i in the ambient group (requires sum t_i = 1).
GroupElement affine_combination(const std::vector<GroupElement>& xs, const IntVector& t);

/// Heap of transitive-action data: the base part K (pointed, generators
/// kappa_i), lifted through a principal action by the fibre group F. The
/// ambient is (K-coords, F-coords) modulo
///   (u, -w_u)  for each relation u of K, with w_u from `relation_lifts`,
///   (0, r)     for each relation r of F,
///   (0, s)     for each stabilizer element s.
/// The result is the whole ambient group as a heap.
AbelianHeap heap_from_extension(const FGAbelianGroup& fiber, const std::vector<IntVector>& stabilizer,
                                const FGAbelianGroup& base, const std::vector<IntVector>& relation_lifts);

}  // namespace heapstone
