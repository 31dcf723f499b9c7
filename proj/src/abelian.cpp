#include "heapstone/abelian.hpp"

#include <sstream>
#include <stdexcept>

namespace heapstone {

// ---------------------------------------------------------------------------
// FGAbelianGroup

FGAbelianGroup::FGAbelianGroup() : FGAbelianGroup(0, IntMatrix(0, 0)) {}

FGAbelianGroup::FGAbelianGroup(std::size_t n_generators, IntMatrix relations)
{
    if (relations.rows() != n_generators)
        throw std::invalid_argument("FGAbelianGroup: relation matrix must have one row per generator");
    auto d = std::make_shared<Data>();
    d->n = n_generators;
    d->relations = std::move(relations);
    d->smith = smith_transforms(d->relations);
    for (std::size_t i = 0; i < n_generators; ++i) {
        if (i < d->smith.rank) {
            if (d->smith.S(i, i) != 1) d->summands.emplace_back(i, d->smith.S(i, i));
        } else {
            d->summands.emplace_back(i, Integer(0));
        }
    }
    d_ = std::move(d);
}

FGAbelianGroup FGAbelianGroup::free(std::size_t n) { return FGAbelianGroup(n, IntMatrix(n, 0)); }

FGAbelianGroup FGAbelianGroup::cyclic(const Integer& k)
{
    if (k == 0) return free(1);
    return FGAbelianGroup(1, IntMatrix(1, 1, {boost::multiprecision::abs(k)}));
}

FGAbelianGroup FGAbelianGroup::direct_sum(const FGAbelianGroup& a, const FGAbelianGroup& b)
{
    const IntMatrix& ra = a.relations();
    const IntMatrix& rb = b.relations();
    IntMatrix r(a.n_generators() + b.n_generators(), ra.cols() + rb.cols());
    for (std::size_t i = 0; i < ra.rows(); ++i)
        for (std::size_t j = 0; j < ra.cols(); ++j) r(i, j) = ra(i, j);
    for (std::size_t i = 0; i < rb.rows(); ++i)
        for (std::size_t j = 0; j < rb.cols(); ++j) r(ra.rows() + i, ra.cols() + j) = rb(i, j);
    return FGAbelianGroup(a.n_generators() + b.n_generators(), std::move(r));
}

GroupElement FGAbelianGroup::zero() const { return GroupElement(*this, IntVector(n_generators())); }

GroupElement FGAbelianGroup::generator(std::size_t i) const
{
    if (i >= n_generators()) throw std::out_of_range("generator index out of range");
    return GroupElement(*this, unit_vector(n_generators(), i));
}

GroupElement FGAbelianGroup::element(IntVector coords) const { return GroupElement(*this, std::move(coords)); }

IntVector FGAbelianGroup::canonical(const IntVector& coords) const
{
    if (coords.size() != d_->n) throw std::invalid_argument("element has wrong number of coordinates");
    IntVector y = d_->smith.P * coords;
    for (std::size_t i = 0; i < d_->smith.rank; ++i) y[i] = mod_floor(y[i], d_->smith.S(i, i));
    return d_->smith.P_inv * y;
}

bool FGAbelianGroup::is_zero(const IntVector& coords) const
{
    if (coords.size() != d_->n) throw std::invalid_argument("element has wrong number of coordinates");
    IntVector y = d_->smith.P * coords;
    for (std::size_t i = 0; i < d_->n; ++i) {
        if (i < d_->smith.rank) {
            if (y[i] % d_->smith.S(i, i) != 0) return false;
        } else if (y[i] != 0) {
            return false;
        }
    }
    return true;
}

IntVector FGAbelianGroup::torsion() const
{
    IntVector t;
    for (const auto& [i, m] : d_->summands)
        if (m != 0) t.push_back(m);
    return t;
}

std::size_t FGAbelianGroup::free_rank() const { return d_->n - d_->smith.rank; }

std::optional<Integer> FGAbelianGroup::order() const
{
    if (free_rank() > 0) return std::nullopt;
    Integer o = 1;
    for (const auto& t : torsion()) o *= t;
    return o;
}

IntVector FGAbelianGroup::smith_coordinates(const IntVector& coords) const
{
    IntVector y = d_->smith.P * coords;
    IntVector s;
    for (const auto& [i, m] : d_->summands) s.push_back(m != 0 ? mod_floor(y[i], m) : y[i]);
    return s;
}

IntVector FGAbelianGroup::from_smith_coordinates(const IntVector& s) const
{
    if (s.size() != d_->summands.size()) throw std::invalid_argument("wrong number of smith coordinates");
    IntVector y(d_->n);
    for (std::size_t k = 0; k < s.size(); ++k) y[d_->summands[k].first] = s[k];
    return d_->smith.P_inv * y;
}

std::vector<GroupElement> FGAbelianGroup::enumerate(std::size_t limit) const
{
    auto o = order();
    if (!o) throw std::invalid_argument("cannot enumerate an infinite group");
    if (*o > limit) throw std::invalid_argument("group too large to enumerate");
    IntVector mods = torsion();
    std::vector<GroupElement> out;
    IntVector s(mods.size());
    for (;;) {
        out.push_back(element(from_smith_coordinates(s)).canonical());
        std::size_t k = mods.size();
        while (k > 0) {
            --k;
            if (++s[k] < mods[k]) break;
            s[k] = 0;
            if (k == 0) return out;
        }
        if (mods.empty()) return out;
    }
}

std::string FGAbelianGroup::type_string() const
{
    std::vector<std::string> parts;
    std::size_t r = free_rank();
    if (r == 1) parts.push_back("Z");
    if (r > 1) parts.push_back("Z^" + std::to_string(r));
    for (const auto& t : torsion()) parts.push_back("Z/" + t.str());
    if (parts.empty()) return "0";
    std::string s = parts[0];
    for (std::size_t i = 1; i < parts.size(); ++i) s += " + " + parts[i];
    return s;
}

// ---------------------------------------------------------------------------
// GroupElement

GroupElement::GroupElement(FGAbelianGroup group, IntVector coords) : group_(std::move(group)), coords_(std::move(coords))
{
    if (coords_.size() != group_.n_generators())
        throw std::invalid_argument("GroupElement: expected " + std::to_string(group_.n_generators()) +
                                    " coordinates, got " + std::to_string(coords_.size()));
}

void GroupElement::check_owner(const GroupElement& o) const
{
    if (!group_.same_as(o.group_)) throw std::invalid_argument("group elements belong to different groups");
}

GroupElement GroupElement::canonical() const { return GroupElement(group_, group_.canonical(coords_)); }

GroupElement GroupElement::operator+(const GroupElement& o) const
{
    check_owner(o);
    return GroupElement(group_, add(coords_, o.coords_));
}

GroupElement GroupElement::operator-(const GroupElement& o) const
{
    check_owner(o);
    return GroupElement(group_, sub(coords_, o.coords_));
}

GroupElement GroupElement::operator-() const { return GroupElement(group_, scale(-1, coords_)); }

GroupElement GroupElement::times(const Integer& k) const { return GroupElement(group_, scale(k, coords_)); }

GroupElement operator*(const Integer& k, const GroupElement& x) { return x.times(k); }

bool GroupElement::operator==(const GroupElement& o) const
{
    check_owner(o);
    return group_.equal(coords_, o.coords_);
}

std::string GroupElement::to_string() const { return heapstone::to_string(group_.canonical(coords_)); }

// ---------------------------------------------------------------------------
// GroupHom

GroupHom::GroupHom(FGAbelianGroup source, FGAbelianGroup target, IntMatrix matrix)
    : source_(std::move(source)), target_(std::move(target)), matrix_(std::move(matrix))
{
    if (matrix_.rows() != target_.n_generators() || matrix_.cols() != source_.n_generators())
        throw std::invalid_argument("GroupHom: matrix shape does not match source/target generators");
    IntMatrix img = matrix_ * source_.relations();
    for (std::size_t j = 0; j < img.cols(); ++j)
        if (!target_.is_zero(img.column(j)))
            throw std::invalid_argument("GroupHom: relation " + std::to_string(j) +
                                        " of the source does not map to zero");
}

GroupHom GroupHom::identity(const FGAbelianGroup& g)
{
    return GroupHom(g, g, IntMatrix::identity(g.n_generators()));
}

GroupHom GroupHom::zero(const FGAbelianGroup& s, const FGAbelianGroup& t)
{
    return GroupHom(s, t, IntMatrix(t.n_generators(), s.n_generators()));
}

GroupElement GroupHom::operator()(const GroupElement& x) const
{
    if (!x.group().same_as(source_)) throw std::invalid_argument("GroupHom applied to element of another group");
    return GroupElement(target_, matrix_ * x.coords());
}

GroupHom GroupHom::compose_after(const GroupHom& inner) const
{
    if (!inner.target().same_as(source_)) throw std::invalid_argument("GroupHom composition: groups do not match");
    return GroupHom(inner.source(), target_, matrix_ * inner.matrix());
}

std::optional<GroupElement> GroupHom::preimage(const GroupElement& y) const
{
    if (!y.group().same_as(target_)) throw std::invalid_argument("preimage of element of another group");
    auto sol = solve_linear(matrix_.hconcat(target_.relations()), y.coords());
    if (!sol) return std::nullopt;
    IntVector x(sol->particular.begin(), sol->particular.begin() + static_cast<std::ptrdiff_t>(source_.n_generators()));
    return GroupElement(source_, source_.canonical(x));
}

bool GroupHom::is_zero() const
{
    for (std::size_t j = 0; j < matrix_.cols(); ++j)
        if (!target_.is_zero(matrix_.column(j))) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Kernels, images, cokernels

IntMatrix lattice_basis(const IntMatrix& gens)
{
    SmithTransforms t = smith_transforms(gens);
    IntMatrix b(gens.rows(), t.rank);
    for (std::size_t i = 0; i < t.rank; ++i)
        for (std::size_t r = 0; r < gens.rows(); ++r) b(r, i) = t.S(i, i) * t.P_inv(r, i);
    return b;
}

namespace {

// Spanning set (as columns) of { x : F x ∈ relation lattice of the target }.
IntMatrix preimage_of_relations(const GroupHom& f)
{
    std::size_t ns = f.source().n_generators();
    auto ker = integer_kernel(f.matrix().hconcat(f.target().relations()));
    IntMatrix g(ns, ker.size());
    for (std::size_t j = 0; j < ker.size(); ++j)
        for (std::size_t i = 0; i < ns; ++i) g(i, j) = ker[j][i];
    return g;
}

}  // namespace

Subgroup hom_kernel(const GroupHom& f)
{
    const FGAbelianGroup& src = f.source();
    IntMatrix basis = lattice_basis(preimage_of_relations(f));
    LinearSolver in_basis(basis);
    const IntMatrix& rs = src.relations();
    IntMatrix rel(basis.cols(), rs.cols());
    for (std::size_t j = 0; j < rs.cols(); ++j) {
        auto c = in_basis.solve(rs.column(j));
        if (!c) throw std::logic_error("hom_kernel: source relation outside kernel lattice");
        for (std::size_t i = 0; i < basis.cols(); ++i) rel(i, j) = (*c)[i];
    }
    FGAbelianGroup k(basis.cols(), std::move(rel));
    return Subgroup{k, GroupHom(k, src, basis)};
}

Subgroup hom_image(const GroupHom& f)
{
    IntMatrix rel = lattice_basis(preimage_of_relations(f));
    FGAbelianGroup im(f.source().n_generators(), std::move(rel));
    return Subgroup{im, GroupHom(im, f.target(), f.matrix())};
}

Quotient hom_cokernel(const GroupHom& f)
{
    const FGAbelianGroup& t = f.target();
    FGAbelianGroup c(t.n_generators(), t.relations().hconcat(f.matrix()));
    return Quotient{c, GroupHom(t, c, IntMatrix::identity(t.n_generators()))};
}

namespace {

GroupHom hom_from_elements(const FGAbelianGroup& g, const std::vector<GroupElement>& gens)
{
    std::vector<IntVector> cols;
    for (const auto& x : gens) {
        if (!x.group().same_as(g)) throw std::invalid_argument("generator belongs to another group");
        cols.push_back(x.coords());
    }
    return GroupHom(FGAbelianGroup::free(gens.size()), g, IntMatrix::from_columns(g.n_generators(), cols));
}

}  // namespace

Subgroup generated_subgroup(const FGAbelianGroup& g, const std::vector<GroupElement>& gens)
{
    return hom_image(hom_from_elements(g, gens));
}

Quotient quotient(const FGAbelianGroup& g, const std::vector<GroupElement>& gens)
{
    return hom_cokernel(hom_from_elements(g, gens));
}

// ---------------------------------------------------------------------------
// Cohomology

bool CohomologyGroup::is_cocycle(const IntVector& z) const
{
    return d_out_.target().is_zero(d_out_.apply(z));
}

GroupElement CohomologyGroup::class_of(const IntVector& z) const
{
    if (z.size() != cochains_.n_generators()) throw std::invalid_argument("class_of: wrong cochain length");
    if (!is_cocycle(z)) throw std::invalid_argument("class_of: not a cocycle");
    auto c = solver_->solve(z);
    if (!c) throw std::logic_error("class_of: cocycle not in kernel lattice");
    c->resize(basis_.cols());
    return GroupElement(group_, group_.canonical(*c));
}

IntVector CohomologyGroup::representative(const GroupElement& cls) const
{
    if (!cls.group().same_as(group_)) throw std::invalid_argument("representative: class of another group");
    return basis_ * cls.coords();
}

CohomologyGroup cohomology(const GroupHom& d_in, const GroupHom& d_out)
{
    if (!d_in.target().same_as(d_out.source()))
        throw std::invalid_argument("cohomology: differentials are not composable");
    if (!d_out.compose_after(d_in).is_zero()) throw std::invalid_argument("cohomology: d∘d ≠ 0");
    Subgroup k = hom_kernel(d_out);
    const FGAbelianGroup& c = d_out.source();
    IntMatrix basis = k.inclusion.matrix();
    auto solver = std::make_shared<const LinearSolver>(basis.hconcat(c.relations()));
    const IntMatrix& din = d_in.matrix();
    IntMatrix extra(basis.cols(), din.cols());
    for (std::size_t j = 0; j < din.cols(); ++j) {
        auto sol = solver->solve(din.column(j));
        if (!sol) throw std::logic_error("cohomology: coboundary outside cocycles");
        for (std::size_t i = 0; i < basis.cols(); ++i) extra(i, j) = (*sol)[i];
    }
    CohomologyGroup h;
    h.group_ = FGAbelianGroup(basis.cols(), k.group.relations().hconcat(extra));
    h.cochains_ = c;
    h.d_out_ = d_out;
    h.basis_ = std::move(basis);
    h.solver_ = std::move(solver);
    return h;
}

CohomologyGroup cohomology(const std::vector<GroupHom>& complex, std::size_t degree)
{
    for (std::size_t i = 0; i + 1 < complex.size(); ++i)
        if (!complex[i].target().same_as(complex[i + 1].source()))
            throw std::invalid_argument("cohomology: differentials " + std::to_string(i) + " and " +
                                        std::to_string(i + 1) + " are not composable");
    FGAbelianGroup c;
    if (degree < complex.size())
        c = complex[degree].source();
    else if (degree == complex.size() && !complex.empty())
        c = complex.back().target();
    GroupHom d_in = degree > 0 && degree <= complex.size() ? complex[degree - 1] : GroupHom::zero(FGAbelianGroup(), c);
    GroupHom d_out = degree < complex.size() ? complex[degree] : GroupHom::zero(c, FGAbelianGroup());
    return cohomology(d_in, d_out);
}

}  // namespace heapstone
