#pragma once

#include "heapstone/locally_effective.hpp"

#include <boost/container/small_vector.hpp>

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace heapstone {

/// Monotone map [m] -> [n], stored as its list of values.
using OrderMap = boost::container::small_vector<int, 8>;

OrderMap identity_map(int n);
/// δ^i : [n-1] -> [n], skipping i.
OrderMap coface(int n, int i);
/// σ^j : [n+1] -> [n], hitting j twice.
OrderMap codegeneracy(int n, int j);
/// a ∘ b
OrderMap compose(const OrderMap& a, const OrderMap& b);
/// Inclusion of the sorted vertex list into [n].
OrderMap order_inclusion(const std::vector<int>& vertices);
bool is_surjective(const OrderMap& f, int n);

/// x ∘ η with x nondegenerate of dimension base_dim and η : [dim] -> [base_dim]
/// a monotone surjection (the Eilenberg–Zilber normal form).
struct Simplex {
    int dim = 0;
    int base_dim = 0;
    std::size_t id = 0;
    OrderMap eta{0};

    static Simplex nondegenerate(int dim, std::size_t id) { return Simplex{dim, dim, id, identity_map(dim)}; }
    bool is_nondegenerate() const { return dim == base_dim; }
    /// Indices of the normal form s_{j1} ... s_{jk}, j1 > ... > jk.
    std::vector<int> degeneracy_word() const;
    static Simplex from_word(std::size_t id, int base_dim, const std::vector<int>& word);

    bool operator==(const Simplex& o) const
    {
        return base_dim == o.base_dim && id == o.id && dim == o.dim && eta == o.eta;
    }
    bool operator<(const Simplex& o) const;
    std::string to_string() const;
};

class FiniteSSet;

/// Incremental construction of a finite simplicial set by nondegenerate
/// simplices and their face lists.
class SSetBuilder {
public:
    std::size_t add_vertex();
    /// faces.size() must be dim + 1; each face must already exist.
    std::size_t add_simplex(int dim, std::vector<Simplex> faces);
    std::size_t count(int dim) const;
    FiniteSSet build(bool validate = true);

private:
    std::vector<std::vector<std::vector<Simplex>>> faces_;
};

class FiniteSSet : public LocallyEffectiveSet<Simplex> {
public:
    FiniteSSet();  // empty simplicial set

    /// Top dimension, -1 if empty.
    int dim() const { return static_cast<int>(d_->faces.size()) - 1; }
    std::size_t count(int d) const;
    std::size_t total_cells() const;
    bool empty() const { return dim() < 0; }
    bool same_as(const FiniteSSet& o) const { return d_ == o.d_; }

    /// i-th face of the nondegenerate simplex (d, id).
    const Simplex& face_of(int d, std::size_t id, int i) const { return d_->faces[d][id][i]; }
    /// σ ∘ θ for a monotone θ : [m] -> [σ.dim].
    Simplex apply(const Simplex& s, const OrderMap& theta) const;
    Simplex face(const Simplex& s, int i) const override;
    Simplex degeneracy(const Simplex& s, int j) const override;
    int dimension_of(const Simplex& s) const override { return s.dim; }
    bool equal(const Simplex& a, const Simplex& b) const override { return a == b; }
    /// Vertex ids of σ in order.
    std::vector<std::size_t> vertices(const Simplex& s) const;

    /// Violations of the simplicial identities and normal-form conditions.
    std::vector<std::string> validate() const;
    long long euler_characteristic() const;

    /// All nondegenerate simplices of dimension d.
    std::vector<Simplex> simplices(int d) const;

    /// For sets built from facets: the simplex with the given (monotone,
    /// possibly repeating) vertex sequence. Throws if unavailable.
    Simplex nerve_simplex(const std::vector<std::size_t>& vertex_sequence) const;
    bool has_vertex_index() const { return !d_->vertex_index.empty(); }

private:
    friend class SSetBuilder;
    friend FiniteSSet from_facets(const std::vector<std::vector<int>>& facets);
    struct Data {
        std::vector<std::vector<std::vector<Simplex>>> faces;
        std::map<std::vector<std::size_t>, std::size_t> vertex_index;
    };
    std::shared_ptr<const Data> d_;
};

/// Simplicial map between finite simplicial sets, given on nondegenerate
/// source simplices.
class SimplicialMap {
public:
    SimplicialMap() = default;
    SimplicialMap(FiniteSSet source, FiniteSSet target, std::vector<std::vector<Simplex>> images);

    const FiniteSSet& source() const { return source_; }
    const FiniteSSet& target() const { return target_; }
    Simplex operator()(const Simplex& s) const;
    const Simplex& image(int d, std::size_t id) const { return images_[d][id]; }

    std::vector<std::string> validate() const;
    /// this ∘ inner
    SimplicialMap compose_after(const SimplicialMap& inner) const;

    static SimplicialMap identity(const FiniteSSet& x);
    /// Constant map at a vertex of the target.
    static SimplicialMap constant(const FiniteSSet& source, const FiniteSSet& target, std::size_t vertex);
    /// Builds images by a callback on nondegenerate source simplices.
    static SimplicialMap from_function(const FiniteSSet& source, const FiniteSSet& target,
                                       const std::function<Simplex(const Simplex&)>& f);

private:
    FiniteSSet source_, target_;
    std::vector<std::vector<Simplex>> images_;
};

/// Closed set of nondegenerate simplices of a parent, with its own
/// simplicial set and index maps in both directions.
class Subcomplex {
public:
    Subcomplex() = default;
    /// Throws std::invalid_argument if the mask is not closed under faces.
    Subcomplex(FiniteSSet parent, std::vector<std::vector<char>> mask);
    static Subcomplex empty(const FiniteSSet& parent);
    static Subcomplex full(const FiniteSSet& parent);
    static Subcomplex from_predicate(const FiniteSSet& parent, const std::function<bool(const Simplex&)>& keep);
    /// Smallest subcomplex containing the given simplices.
    static Subcomplex generated_by(const FiniteSSet& parent, const std::vector<Simplex>& simplices);

    const FiniteSSet& parent() const { return parent_; }
    const FiniteSSet& sset() const { return sub_; }
    const SimplicialMap& inclusion() const { return inclusion_; }
    bool contains(const Simplex& s) const { return s.base_dim < static_cast<int>(mask_.size()) && mask_[s.base_dim][s.id]; }
    bool contains(int d, std::size_t id) const { return d < static_cast<int>(mask_.size()) && mask_[d][id]; }
    /// Parent simplex -> subcomplex simplex (requires contains).
    Simplex to_sub(const Simplex& s) const;
    /// Largest dimension of a parent cell outside the subcomplex; -1 if none.
    int complement_dim() const;

    Subcomplex unite(const Subcomplex& o) const;
    Subcomplex intersect(const Subcomplex& o) const;
    /// Preimage along a map into the parent.
    Subcomplex preimage(const SimplicialMap& f) const;

private:
    FiniteSSet parent_;
    std::vector<std::vector<char>> mask_;
    std::vector<std::vector<std::size_t>> to_sub_;
    FiniteSSet sub_;
    SimplicialMap inclusion_;
};

// ---------------------------------------------------------------------------
// Standard models

FiniteSSet point();
FiniteSSet standard_simplex(int n);
/// ∂Δ^n as a simplicial set (the n-1 skeleton of Δ^n).
FiniteSSet boundary(int n);
/// Inclusion of the i-th face Δ^{n-1} -> Δ^n.
SimplicialMap face_inclusion(int n, int i);
/// Inclusion of vertex i: Δ^0 -> Δ^n.
SimplicialMap vertex_inclusion(int n, int i);
/// Subcomplex of Δ^n spanned by a vertex set (a face).
Subcomplex simplex_face(const FiniteSSet& delta_n, const std::vector<int>& vertices);

/// Ordered simplicial complex given by facets (vertex lists); simplices are
/// sorted vertex subsets.
FiniteSSet from_facets(const std::vector<std::vector<int>>& facets);
FiniteSSet real_projective_plane();  // 6-vertex triangulation
FiniteSSet torus();                  // 7-vertex triangulation

// ---------------------------------------------------------------------------
// Products, coproducts, pushouts

/// X_1 × ... × X_k with nondegenerate simplices the jointly injective tuples.
class ProductSSet {
public:
    explicit ProductSSet(std::vector<FiniteSSet> factors);

    const FiniteSSet& sset() const { return sset_; }
    std::size_t arity() const { return factors_.size(); }
    const FiniteSSet& factor(std::size_t i) const { return factors_[i]; }
    const SimplicialMap& projection(std::size_t i) const { return projections_[i]; }
    /// Components (as simplices of the cell's dimension) of a nondegenerate cell.
    const std::vector<Simplex>& components(int d, std::size_t id) const { return components_[d][id]; }
    std::vector<Simplex> components(const Simplex& s) const;
    /// The product simplex with the given components (all of one dimension).
    Simplex tuple(const std::vector<Simplex>& comps) const;
    /// Map S -> product from maps S -> X_i.
    SimplicialMap pairing(const std::vector<SimplicialMap>& maps) const;

private:
    std::vector<FiniteSSet> factors_;
    FiniteSSet sset_;
    std::vector<SimplicialMap> projections_;
    std::vector<std::vector<std::vector<Simplex>>> components_;
    std::map<std::vector<std::pair<std::size_t, OrderMap>>, std::size_t> lookup_;
};

/// f × g : X × Y -> X' × Y'.
SimplicialMap product_map(const ProductSSet& source, const ProductSSet& target, const std::vector<SimplicialMap>& maps);

struct Coproduct {
    FiniteSSet sset;
    std::vector<SimplicialMap> injections;
};
Coproduct coproduct(const std::vector<FiniteSSet>& parts);

/// Z ∪_A X for a subcomplex A ⊆ X and a map f : A -> Z.
struct Pushout {
    FiniteSSet sset;
    SimplicialMap from_z;
    SimplicialMap from_x;
    /// For each cell: the X cell it comes from, or -1 for cells of Z.
    std::vector<std::vector<long>> x_origin;
};
Pushout pushout(const Subcomplex& a_in_x, const SimplicialMap& f);

/// Z ×_B Z' inside Z × Z'.
struct FiberedProduct {
    ProductSSet product;
    Subcomplex sub;
};
FiberedProduct fibered_product(const SimplicialMap& f, const SimplicialMap& g);

/// The k-fold fibred power of p : Z -> B with the subspace δ^{r_1...r_s}
/// where blocks of equal coordinates have sizes r_1, ..., r_s (sum = k).
struct FiberedPower {
    ProductSSet product;
    Subcomplex power;     // Z ×_B ... ×_B Z
    Subcomplex diagonal;  // δ^{pattern}
};
FiberedPower diag_subspace(const SimplicialMap& p, const std::vector<int>& pattern);
/// δ^{pattern} inside an existing k-fold power product of p's source.
Subcomplex diagonal_in(const ProductSSet& power, const SimplicialMap& p, const std::vector<int>& pattern);

/// Subspaces of Δ² × Z^3 (product factor order: Δ², Z, Z, Z).
struct HatDelta {
    ProductSSet product;
    Subcomplex hat111;   // the prism over δ^{111}
    Subcomplex hat2112;  // its part over the edge {0,1}
};
HatDelta hat_delta(const SimplicialMap& p);

/// Membership tests, phrased on a label set L ⊆ {0,1,2} (vertices of Δ²
/// touched) and the equalities x=r, r=y of a triple.
bool hat111_member(unsigned label_mask, bool x_eq_r, bool r_eq_y);
bool hat2112_member(unsigned label_mask, bool x_eq_r, bool r_eq_y);

/// (Δ¹ × A) ∪_{1×A} X with the end inclusion of A at 0 and the projection to X.
struct Cylinder {
    ProductSSet prism;  // Δ¹ × A
    Pushout glued;
    SimplicialMap end_inclusion;  // A -> cylinder
    SimplicialMap projection;     // cylinder -> X
};
Cylinder cylinder_replacement(const SimplicialMap& iota);

/// Σ_B Y: Δ¹ × Y with 0 × Y and 1 × Y each squashed to B along φ.
struct FibrewiseSuspension {
    ProductSSet prism;             // Δ¹ × Y
    Pushout glued;                 // (∂Δ¹ × B) ∪ (Δ¹ × Y)
    SimplicialMap projection;      // Σ_B Y -> B
    SimplicialMap end0, end1;      // B -> Σ_B Y
    SimplicialMap quotient;        // Δ¹ × Y -> Σ_B Y
};
FibrewiseSuspension fibrewise_suspension(const SimplicialMap& phi);

}  // namespace heapstone
