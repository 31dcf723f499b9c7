#include "heapstone/heap.hpp"

#include <stdexcept>

namespace heapstone {

GroupElement malcev(const GroupElement& x, const GroupElement& r, const GroupElement& y)
{
    return (x - r + y).canonical();
}

AbelianHeap::AbelianHeap(FGAbelianGroup ambient, std::vector<GroupElement> generators)
    : empty_(false), ambient_(std::move(ambient)), generators_(std::move(generators))
{
    if (generators_.empty()) throw std::invalid_argument("AbelianHeap: a nonempty heap needs a generator");
    for (const auto& g : generators_)
        if (!g.group().same_as(ambient_)) throw std::invalid_argument("AbelianHeap: generator outside ambient group");
}

AbelianHeap AbelianHeap::whole(const FGAbelianGroup& g)
{
    std::vector<GroupElement> gens{g.zero()};
    for (std::size_t i = 0; i < g.n_generators(); ++i) gens.push_back(g.generator(i));
    return AbelianHeap(g, std::move(gens));
}

const FGAbelianGroup& AbelianHeap::ambient() const
{
    if (empty_) throw std::logic_error("EMPTY heap has no ambient group");
    return ambient_;
}

const GroupElement& AbelianHeap::base_point() const
{
    if (empty_) throw std::logic_error("EMPTY heap has no base point");
    return generators_.front();
}

Subgroup AbelianHeap::difference_subgroup() const
{
    std::vector<GroupElement> diffs;
    for (std::size_t i = 1; i < generators_.size(); ++i) diffs.push_back(generators_[i] - generators_[0]);
    return generated_subgroup(ambient(), diffs);
}

bool AbelianHeap::contains(const GroupElement& x) const
{
    if (empty_) return false;
    return difference_subgroup().inclusion.preimage(x - generators_[0]).has_value();
}

std::optional<Integer> AbelianHeap::cardinality() const
{
    if (empty_) return Integer(0);
    return difference_subgroup().group.order();
}

AbelianHeap AbelianHeap::reduce_generators() const
{
    if (empty_) return *this;
    Subgroup d = difference_subgroup();
    std::vector<GroupElement> gens{generators_[0]};
    std::size_t k = d.group.torsion().size() + d.group.free_rank();
    for (std::size_t i = 0; i < k; ++i) {
        IntVector s(k);
        s[i] = 1;
        gens.push_back((generators_[0] + d.inclusion(d.group.element(d.group.from_smith_coordinates(s)))).canonical());
    }
    return AbelianHeap(ambient_, std::move(gens));
}

std::string AbelianHeap::to_string() const
{
    if (empty_) return "EMPTY";
    Subgroup d = difference_subgroup();
    auto n = d.group.order();
    if (n && *n == 1) return "1 element";
    std::string size = n ? n->str() + " elements" : "infinite";
    return size + "; pointed type: " + d.group.type_string();
}

GroupElement PointedHeap::to_group(const GroupElement& x) const
{
    auto d = inclusion.preimage(x - zero);
    if (!d) throw std::invalid_argument("element is not in the heap");
    return *d;
}

GroupElement PointedHeap::from_group(const GroupElement& d) const { return (zero + inclusion(d)).canonical(); }

PointedHeap point_heap(const AbelianHeap& H, const GroupElement& zero)
{
    if (H.is_empty()) throw std::invalid_argument("point_heap: EMPTY heap has no points");
    if (!H.contains(zero)) throw std::invalid_argument("point_heap: chosen zero is not a member of the heap");
    Subgroup d = H.difference_subgroup();
    return PointedHeap{d.group, d.inclusion, zero.canonical()};
}

HeapHom::HeapHom(AbelianHeap source, AbelianHeap target, GroupHom linear, GroupElement base_value)
    : source_(std::move(source)), target_(std::move(target)), linear_(std::move(linear)),
      base_value_(std::move(base_value))
{
    if (source_.is_empty()) {
        return;
    }
    if (target_.is_empty()) throw std::invalid_argument("HeapHom: nonempty heap cannot map to EMPTY");
    if (!linear_.source().same_as(source_.ambient()) || !linear_.target().same_as(target_.ambient()))
        throw std::invalid_argument("HeapHom: linear part has wrong groups");
    for (const auto& v : generator_values())
        if (!target_.contains(v)) throw std::invalid_argument("HeapHom: generator image outside target heap");
}

GroupElement HeapHom::operator()(const GroupElement& x) const
{
    return (linear_(x - source_.base_point()) + base_value_).canonical();
}

std::vector<GroupElement> HeapHom::generator_values() const
{
    std::vector<GroupElement> out;
    for (const auto& g : source_.generators()) out.push_back((*this)(g));
    return out;
}

bool HeapHom::respects_malcev() const
{
    const auto& gens = source_.generators();
    for (const auto& x : gens)
        for (const auto& r : gens)
            for (const auto& y : gens)
                if (!((*this)(malcev(x, r, y)) == malcev((*this)(x), (*this)(r), (*this)(y)))) return false;
    return true;
}

std::optional<IntVector> solve_zero_preimage(const std::vector<GroupElement>& images)
{
    if (images.empty()) return std::nullopt;
    const FGAbelianGroup& g = images.front().group();
    std::size_t n = g.n_generators(), r = images.size();
    const IntMatrix& rel = g.relations();
    IntMatrix a(n + 1, r + rel.cols());
    for (std::size_t j = 0; j < r; ++j) {
        if (!images[j].group().same_as(g)) throw std::invalid_argument("solve_zero_preimage: mixed groups");
        for (std::size_t i = 0; i < n; ++i) a(i, j) = images[j].coords()[i];
        a(n, j) = 1;
    }
    for (std::size_t j = 0; j < rel.cols(); ++j)
        for (std::size_t i = 0; i < n; ++i) a(i, r + j) = rel(i, j);
    IntVector b(n + 1);
    b[n] = 1;
    // Prefer the first generator when it already maps to zero.
    if (images.front().is_zero()) {
        IntVector t(r);
        t[0] = 1;
        return t;
    }
    auto sol = solve_linear(a, b);
    if (!sol) return std::nullopt;
    sol->particular.resize(r);
    return sol->particular;
}

std::optional<IntVector> solve_zero_preimage(const HeapHom& k)
{
    if (k.source().is_empty()) return std::nullopt;
    return solve_zero_preimage(k.generator_values());
}

GroupElement affine_combination(const std::vector<GroupElement>& xs, const IntVector& t)
{
    if (xs.empty() || xs.size() != t.size()) throw std::invalid_argument("affine_combination: size mismatch");
    Integer total = 0;
    for (const auto& c : t) total += c;
    if (total != 1) throw std::invalid_argument("affine_combination: coefficients must sum to 1");
    GroupElement acc = xs.front().group().zero();
    for (std::size_t i = 0; i < xs.size(); ++i) acc = acc + xs[i].times(t[i]);
    return acc.canonical();
}

AbelianHeap heap_from_extension(const FGAbelianGroup& fiber, const std::vector<IntVector>& stabilizer,
                                const FGAbelianGroup& base, const std::vector<IntVector>& relation_lifts)
{
    std::size_t nk = base.n_generators(), nf = fiber.n_generators();
    const IntMatrix& rk = base.relations();
    const IntMatrix& rf = fiber.relations();
    if (relation_lifts.size() != rk.cols())
        throw std::invalid_argument("heap_from_extension: need one lift per base relation");
    std::vector<IntVector> cols;
    for (std::size_t j = 0; j < rk.cols(); ++j) {
        if (relation_lifts[j].size() != nf) throw std::invalid_argument("heap_from_extension: lift has wrong length");
        IntVector c(nk + nf);
        for (std::size_t i = 0; i < nk; ++i) c[i] = rk(i, j);
        for (std::size_t i = 0; i < nf; ++i) c[nk + i] = -relation_lifts[j][i];
        cols.push_back(std::move(c));
    }
    for (std::size_t j = 0; j < rf.cols(); ++j) {
        IntVector c(nk + nf);
        for (std::size_t i = 0; i < nf; ++i) c[nk + i] = rf(i, j);
        cols.push_back(std::move(c));
    }
    for (const auto& s : stabilizer) {
        if (s.size() != nf) throw std::invalid_argument("heap_from_extension: stabilizer element has wrong length");
        IntVector c(nk + nf);
        for (std::size_t i = 0; i < nf; ++i) c[nk + i] = s[i];
        cols.push_back(std::move(c));
    }
    FGAbelianGroup g(nk + nf, IntMatrix::from_columns(nk + nf, cols));
    return AbelianHeap::whole(g);
}

}  // namespace heapstone
