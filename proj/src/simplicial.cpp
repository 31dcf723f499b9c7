#include "heapstone/simplicial.hpp"

#include <algorithm>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>

namespace heapstone {

// ---------------------------------------------------------------------------
// Order maps

OrderMap identity_map(int n)
{
    OrderMap m(static_cast<std::size_t>(n + 1));
    for (int i = 0; i <= n; ++i) m[i] = i;
    return m;
}

OrderMap coface(int n, int i)
{
    OrderMap m;
    for (int t = 0; t <= n; ++t)
        if (t != i) m.push_back(t);
    return m;
}

OrderMap codegeneracy(int n, int j)
{
    OrderMap m;
    for (int t = 0; t <= n + 1; ++t) m.push_back(t <= j ? t : t - 1);
    return m;
}

OrderMap compose(const OrderMap& a, const OrderMap& b)
{
    OrderMap m(b.size());
    for (std::size_t t = 0; t < b.size(); ++t) m[t] = a[b[t]];
    return m;
}

OrderMap order_inclusion(const std::vector<int>& vertices)
{
    return OrderMap(vertices.begin(), vertices.end());
}

bool is_surjective(const OrderMap& f, int n)
{
    if (f.empty() || f.front() != 0 || f.back() != n) return false;
    for (std::size_t t = 0; t + 1 < f.size(); ++t)
        if (f[t + 1] - f[t] > 1 || f[t + 1] < f[t]) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Simplex

std::vector<int> Simplex::degeneracy_word() const
{
    std::vector<int> w;
    for (int t = dim - 1; t >= 0; --t)
        if (eta[t] == eta[t + 1]) w.push_back(t);
    return w;
}

Simplex Simplex::from_word(std::size_t id, int base_dim, const std::vector<int>& word)
{
    for (std::size_t i = 0; i + 1 < word.size(); ++i)
        if (word[i] <= word[i + 1]) throw std::invalid_argument("degeneracy word must be strictly decreasing");
    OrderMap eta = identity_map(base_dim);
    int cur = base_dim;
    for (auto it = word.rbegin(); it != word.rend(); ++it) {
        if (*it < 0 || *it > cur) throw std::invalid_argument("degeneracy index out of range");
        eta = compose(eta, codegeneracy(cur, *it));
        ++cur;
    }
    return Simplex{cur, base_dim, id, eta};
}

bool Simplex::operator<(const Simplex& o) const
{
    if (dim != o.dim) return dim < o.dim;
    if (base_dim != o.base_dim) return base_dim < o.base_dim;
    if (id != o.id) return id < o.id;
    return std::lexicographical_compare(eta.begin(), eta.end(), o.eta.begin(), o.eta.end());
}

std::string Simplex::to_string() const
{
    std::ostringstream os;
    os << "[";
    auto w = degeneracy_word();
    for (std::size_t i = 0; i < w.size(); ++i) os << (i ? " " : "") << "s" << w[i];
    os << "] " << base_dim << ":" << id;
    return os.str();
}

// ---------------------------------------------------------------------------
// Builder and FiniteSSet

std::size_t SSetBuilder::add_vertex() { return add_simplex(0, {}); }

std::size_t SSetBuilder::count(int dim) const
{
    return dim >= 0 && dim < static_cast<int>(faces_.size()) ? faces_[dim].size() : 0;
}

std::size_t SSetBuilder::add_simplex(int dim, std::vector<Simplex> faces)
{
    if (dim < 0) throw std::invalid_argument("negative simplex dimension");
    if (dim == 0 && !faces.empty()) throw std::invalid_argument("vertices have no faces");
    if (dim > 0 && faces.size() != static_cast<std::size_t>(dim + 1))
        throw std::invalid_argument("a " + std::to_string(dim) + "-simplex needs " + std::to_string(dim + 1) + " faces");
    for (const auto& f : faces) {
        if (f.dim != dim - 1) throw std::invalid_argument("face has wrong dimension");
        if (f.base_dim > f.dim || f.id >= count(f.base_dim) || !is_surjective(f.eta, f.base_dim) ||
            static_cast<int>(f.eta.size()) != f.dim + 1)
            throw std::invalid_argument("face refers to a missing simplex or has a malformed degeneracy");
    }
    if (static_cast<int>(faces_.size()) <= dim) faces_.resize(static_cast<std::size_t>(dim) + 1);
    faces_[dim].push_back(std::move(faces));
    return faces_[dim].size() - 1;
}

FiniteSSet SSetBuilder::build(bool validate)
{
    FiniteSSet x;
    auto d = std::make_shared<FiniteSSet::Data>();
    d->faces = std::move(faces_);
    faces_.clear();
    x.d_ = d;
    if (validate) {
        auto bad = x.validate();
        if (!bad.empty()) throw std::invalid_argument("simplicial identities violated: " + bad.front());
    }
    return x;
}

FiniteSSet::FiniteSSet() : d_(std::make_shared<Data>()) {}

std::size_t FiniteSSet::count(int d) const
{
    return d >= 0 && d <= dim() ? d_->faces[d].size() : 0;
}

std::size_t FiniteSSet::total_cells() const
{
    std::size_t n = 0;
    for (const auto& f : d_->faces) n += f.size();
    return n;
}

Simplex FiniteSSet::apply(const Simplex& s, const OrderMap& theta) const
{
    OrderMap phi = compose(s.eta, theta);
    int k = s.base_dim;
    std::size_t id = s.id;
    for (;;) {
        if (is_surjective(phi, k)) return Simplex{static_cast<int>(phi.size()) - 1, k, id, std::move(phi)};
        // drop the largest vertex not hit
        std::vector<char> hit(static_cast<std::size_t>(k + 1), 0);
        for (int v : phi) hit[v] = 1;
        int v = k;
        while (hit[v]) --v;
        const Simplex& f = d_->faces[k][id][v];
        OrderMap reduced(phi.size());
        for (std::size_t t = 0; t < phi.size(); ++t) reduced[t] = phi[t] < v ? phi[t] : phi[t] - 1;
        phi = compose(f.eta, reduced);
        k = f.base_dim;
        id = f.id;
    }
}

Simplex FiniteSSet::face(const Simplex& s, int i) const
{
    if (s.dim == 0 || i < 0 || i > s.dim) throw std::out_of_range("face index out of range");
    return apply(s, coface(s.dim, i));
}

Simplex FiniteSSet::degeneracy(const Simplex& s, int j) const
{
    if (j < 0 || j > s.dim) throw std::out_of_range("degeneracy index out of range");
    return Simplex{s.dim + 1, s.base_dim, s.id, compose(s.eta, codegeneracy(s.dim, j))};
}

std::vector<std::size_t> FiniteSSet::vertices(const Simplex& s) const
{
    std::vector<std::size_t> v;
    for (int j = 0; j <= s.dim; ++j) v.push_back(apply(s, OrderMap{j}).id);
    return v;
}

std::vector<std::string> FiniteSSet::validate() const
{
    std::vector<std::string> bad;
    for (int d = 1; d <= dim(); ++d)
        for (std::size_t id = 0; id < count(d); ++id) {
            const auto& fs = d_->faces[d][id];
            if (fs.size() != static_cast<std::size_t>(d + 1)) {
                bad.push_back("simplex " + std::to_string(d) + ":" + std::to_string(id) + " has wrong face count");
                continue;
            }
            for (const auto& f : fs)
                if (f.dim != d - 1 || f.base_dim > f.dim || f.id >= count(f.base_dim) || !is_surjective(f.eta, f.base_dim))
                    bad.push_back("simplex " + std::to_string(d) + ":" + std::to_string(id) + " has a malformed face");
            if (d < 2) continue;
            Simplex s = Simplex::nondegenerate(d, id);
            for (int j = 1; j <= d; ++j)
                for (int i = 0; i < j; ++i)
                    if (!(face(face(s, j), i) == face(face(s, i), j - 1)))
                        bad.push_back("d" + std::to_string(i) + "d" + std::to_string(j) + " fails on " +
                                      std::to_string(d) + ":" + std::to_string(id));
        }
    return bad;
}

long long FiniteSSet::euler_characteristic() const
{
    long long chi = 0;
    for (int d = 0; d <= dim(); ++d) chi += (d % 2 == 0 ? 1 : -1) * static_cast<long long>(count(d));
    return chi;
}

std::vector<Simplex> FiniteSSet::simplices(int d) const
{
    std::vector<Simplex> out;
    for (std::size_t id = 0; id < count(d); ++id) out.push_back(Simplex::nondegenerate(d, id));
    return out;
}

Simplex FiniteSSet::nerve_simplex(const std::vector<std::size_t>& seq) const
{
    if (d_->vertex_index.empty()) throw std::logic_error("simplicial set has no vertex index");
    if (seq.empty()) throw std::invalid_argument("empty vertex sequence");
    std::vector<std::size_t> distinct;
    OrderMap eta;
    for (std::size_t t = 0; t < seq.size(); ++t) {
        if (t > 0 && seq[t] < seq[t - 1]) throw std::invalid_argument("vertex sequence must be monotone");
        if (distinct.empty() || distinct.back() != seq[t]) distinct.push_back(seq[t]);
        eta.push_back(static_cast<int>(distinct.size()) - 1);
    }
    auto it = d_->vertex_index.find(distinct);
    if (it == d_->vertex_index.end()) throw std::invalid_argument("no simplex on the given vertices");
    return Simplex{static_cast<int>(seq.size()) - 1, static_cast<int>(distinct.size()) - 1, it->second, eta};
}

// ---------------------------------------------------------------------------
// SimplicialMap

SimplicialMap::SimplicialMap(FiniteSSet source, FiniteSSet target, std::vector<std::vector<Simplex>> images)
    : source_(std::move(source)), target_(std::move(target)), images_(std::move(images))
{
    images_.resize(static_cast<std::size_t>(std::max(source_.dim() + 1, 0)));
    for (int d = 0; d <= source_.dim(); ++d) {
        if (images_[d].size() != source_.count(d)) throw std::invalid_argument("SimplicialMap: image table size mismatch");
        for (const auto& s : images_[d])
            if (s.dim != d || s.base_dim > target_.dim() || s.id >= target_.count(s.base_dim))
                throw std::invalid_argument("SimplicialMap: image is not a simplex of the target");
    }
}

Simplex SimplicialMap::operator()(const Simplex& s) const
{
    const Simplex& im = images_.at(s.base_dim).at(s.id);
    if (s.is_nondegenerate()) return im;
    return target_.apply(im, s.eta);
}

std::vector<std::string> SimplicialMap::validate() const
{
    std::vector<std::string> bad;
    for (int d = 1; d <= source_.dim(); ++d)
        for (std::size_t id = 0; id < source_.count(d); ++id)
            for (int i = 0; i <= d; ++i)
                if (!((*this)(source_.face_of(d, id, i)) == target_.face(images_[d][id], i)))
                    bad.push_back("map does not commute with d" + std::to_string(i) + " on " + std::to_string(d) + ":" +
                                  std::to_string(id));
    return bad;
}

SimplicialMap SimplicialMap::compose_after(const SimplicialMap& inner) const
{
    if (inner.target_.total_cells() != source_.total_cells() || inner.target_.dim() != source_.dim())
        throw std::invalid_argument("SimplicialMap composition: incompatible sets");
    std::vector<std::vector<Simplex>> im(inner.images_.size());
    for (std::size_t d = 0; d < inner.images_.size(); ++d)
        for (const auto& s : inner.images_[d]) im[d].push_back((*this)(s));
    return SimplicialMap(inner.source_, target_, std::move(im));
}

SimplicialMap SimplicialMap::identity(const FiniteSSet& x)
{
    return from_function(x, x, [](const Simplex& s) { return s; });
}

SimplicialMap SimplicialMap::constant(const FiniteSSet& source, const FiniteSSet& target, std::size_t vertex)
{
    return from_function(source, target,
                         [vertex](const Simplex& s) { return Simplex{s.dim, 0, vertex, OrderMap(static_cast<std::size_t>(s.dim + 1), 0)}; });
}

SimplicialMap SimplicialMap::from_function(const FiniteSSet& source, const FiniteSSet& target,
                                           const std::function<Simplex(const Simplex&)>& f)
{
    std::vector<std::vector<Simplex>> im(static_cast<std::size_t>(std::max(source.dim() + 1, 0)));
    for (int d = 0; d <= source.dim(); ++d)
        for (std::size_t id = 0; id < source.count(d); ++id) im[d].push_back(f(Simplex::nondegenerate(d, id)));
    return SimplicialMap(source, target, std::move(im));
}

// ---------------------------------------------------------------------------
// Subcomplex

Subcomplex::Subcomplex(FiniteSSet parent, std::vector<std::vector<char>> mask)
    : parent_(std::move(parent)), mask_(std::move(mask))
{
    mask_.resize(static_cast<std::size_t>(std::max(parent_.dim() + 1, 0)));
    for (int d = 0; d <= parent_.dim(); ++d) mask_[d].resize(parent_.count(d), 0);
    to_sub_.resize(mask_.size());
    SSetBuilder b;
    for (int d = 0; d <= parent_.dim(); ++d) {
        to_sub_[d].assign(parent_.count(d), static_cast<std::size_t>(-1));
        for (std::size_t id = 0; id < parent_.count(d); ++id) {
            if (!mask_[d][id]) continue;
            std::vector<Simplex> faces;
            for (int i = 0; d > 0 && i <= d; ++i) {
                Simplex f = parent_.face_of(d, id, i);
                if (!mask_[f.base_dim][f.id])
                    throw std::invalid_argument("Subcomplex: mask is not closed under faces at " + std::to_string(d) +
                                                ":" + std::to_string(id));
                f.id = to_sub_[f.base_dim][f.id];
                faces.push_back(f);
            }
            to_sub_[d][id] = b.add_simplex(d, std::move(faces));
        }
        if (b.count(d) == 0) {
            // no cells in this dimension; higher ones cannot exist either
            bool higher = false;
            for (int e = d + 1; e <= parent_.dim(); ++e)
                for (char c : mask_[e]) higher = higher || c;
            if (!higher) {
                for (int e = d + 1; e <= parent_.dim(); ++e) to_sub_[e].assign(parent_.count(e), static_cast<std::size_t>(-1));
                break;
            }
        }
    }
    sub_ = b.build(false);
    std::vector<std::vector<Simplex>> im(static_cast<std::size_t>(std::max(sub_.dim() + 1, 0)));
    for (int d = 0; d <= parent_.dim(); ++d)
        for (std::size_t id = 0; id < parent_.count(d); ++id)
            if (mask_[d][id]) im[d].push_back(Simplex::nondegenerate(d, id));
    inclusion_ = SimplicialMap(sub_, parent_, std::move(im));
}

Subcomplex Subcomplex::empty(const FiniteSSet& parent) { return Subcomplex(parent, {}); }

Subcomplex Subcomplex::full(const FiniteSSet& parent)
{
    return from_predicate(parent, [](const Simplex&) { return true; });
}

Subcomplex Subcomplex::from_predicate(const FiniteSSet& parent, const std::function<bool(const Simplex&)>& keep)
{
    std::vector<std::vector<char>> mask(static_cast<std::size_t>(std::max(parent.dim() + 1, 0)));
    for (int d = 0; d <= parent.dim(); ++d)
        for (std::size_t id = 0; id < parent.count(d); ++id) mask[d].push_back(keep(Simplex::nondegenerate(d, id)) ? 1 : 0);
    return Subcomplex(parent, std::move(mask));
}

Subcomplex Subcomplex::generated_by(const FiniteSSet& parent, const std::vector<Simplex>& simplices)
{
    std::vector<std::vector<char>> mask(static_cast<std::size_t>(std::max(parent.dim() + 1, 0)));
    for (int d = 0; d <= parent.dim(); ++d) mask[d].assign(parent.count(d), 0);
    for (const auto& s : simplices) mask.at(s.base_dim).at(s.id) = 1;
    for (int d = parent.dim(); d >= 1; --d)
        for (std::size_t id = 0; id < parent.count(d); ++id)
            if (mask[d][id])
                for (int i = 0; i <= d; ++i) {
                    const Simplex& f = parent.face_of(d, id, i);
                    mask[f.base_dim][f.id] = 1;
                }
    return Subcomplex(parent, std::move(mask));
}

Simplex Subcomplex::to_sub(const Simplex& s) const
{
    if (!contains(s)) throw std::invalid_argument("simplex is not in the subcomplex");
    Simplex r = s;
    r.id = to_sub_[s.base_dim][s.id];
    return r;
}

int Subcomplex::complement_dim() const
{
    for (int d = parent_.dim(); d >= 0; --d)
        for (std::size_t id = 0; id < parent_.count(d); ++id)
            if (!mask_[d][id]) return d;
    return -1;
}

Subcomplex Subcomplex::unite(const Subcomplex& o) const
{
    if (!parent_.same_as(o.parent_)) throw std::invalid_argument("subcomplexes of different parents");
    auto m = mask_;
    for (std::size_t d = 0; d < m.size(); ++d)
        for (std::size_t i = 0; i < m[d].size(); ++i) m[d][i] = m[d][i] || o.mask_[d][i];
    return Subcomplex(parent_, std::move(m));
}

Subcomplex Subcomplex::intersect(const Subcomplex& o) const
{
    if (!parent_.same_as(o.parent_)) throw std::invalid_argument("subcomplexes of different parents");
    auto m = mask_;
    for (std::size_t d = 0; d < m.size(); ++d)
        for (std::size_t i = 0; i < m[d].size(); ++i) m[d][i] = m[d][i] && o.mask_[d][i];
    return Subcomplex(parent_, std::move(m));
}

Subcomplex Subcomplex::preimage(const SimplicialMap& f) const
{
    return from_predicate(f.source(), [&](const Simplex& s) { return contains(f(s)); });
}

// ---------------------------------------------------------------------------
// Standard models

FiniteSSet from_facets(const std::vector<std::vector<int>>& facets)
{
    std::vector<std::set<std::vector<std::size_t>>> cells;
    for (const auto& f : facets) {
        std::vector<std::size_t> v(f.begin(), f.end());
        std::sort(v.begin(), v.end());
        if (std::adjacent_find(v.begin(), v.end()) != v.end()) throw std::invalid_argument("facet repeats a vertex");
        if (v.size() > 20) throw std::invalid_argument("facet too large");
        std::size_t n = v.size();
        for (unsigned long mask = 1; mask < (1ul << n); ++mask) {
            std::vector<std::size_t> s;
            for (std::size_t i = 0; i < n; ++i)
                if (mask & (1ul << i)) s.push_back(v[i]);
            if (cells.size() < s.size()) cells.resize(s.size());
            cells[s.size() - 1].insert(s);
        }
    }
    std::map<std::vector<std::size_t>, std::size_t> index;
    std::map<std::size_t, std::size_t> vertex_id;
    SSetBuilder b;
    for (std::size_t d = 0; d < cells.size(); ++d)
        for (const auto& s : cells[d]) {
            std::vector<Simplex> faces;
            if (d > 0)
                for (std::size_t i = 0; i <= d; ++i) {
                    auto f = s;
                    f.erase(f.begin() + static_cast<std::ptrdiff_t>(i));
                    faces.push_back(Simplex::nondegenerate(static_cast<int>(d - 1), index.at(f)));
                }
            index[s] = b.add_simplex(static_cast<int>(d), std::move(faces));
        }
    FiniteSSet x = b.build(false);
    auto data = std::make_shared<FiniteSSet::Data>(*x.d_);
    // vertex ids are positions among the sorted vertex labels
    std::map<std::size_t, std::size_t> relabel;
    if (!cells.empty())
        for (const auto& s : cells[0]) relabel[s[0]] = index.at(s);
    for (const auto& [verts, id] : index) {
        std::vector<std::size_t> ids;
        for (auto v : verts) ids.push_back(relabel.at(v));
        data->vertex_index[ids] = id;
    }
    x.d_ = data;
    return x;
}

namespace {

std::mutex cache_mutex;

template <class F>
FiniteSSet cached(std::map<int, FiniteSSet>& cache, int n, F make)
{
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    FiniteSSet x = make();
    cache.emplace(n, x);
    return x;
}

}  // namespace

FiniteSSet point() { return standard_simplex(0); }

FiniteSSet standard_simplex(int n)
{
    if (n < 0) throw std::invalid_argument("standard_simplex: negative dimension");
    static std::map<int, FiniteSSet> cache;
    return cached(cache, n, [n] {
        std::vector<int> f;
        for (int i = 0; i <= n; ++i) f.push_back(i);
        return from_facets({f});
    });
}

FiniteSSet boundary(int n)
{
    if (n < 0) throw std::invalid_argument("boundary: negative dimension");
    static std::map<int, FiniteSSet> cache;
    return cached(cache, n, [n] {
        if (n == 0) return FiniteSSet();
        std::vector<std::vector<int>> facets;
        for (int skip = 0; skip <= n; ++skip) {
            std::vector<int> f;
            for (int i = 0; i <= n; ++i)
                if (i != skip) f.push_back(i);
            facets.push_back(f);
        }
        return from_facets(facets);
    });
}

SimplicialMap face_inclusion(int n, int i)
{
    if (n < 1 || i < 0 || i > n) throw std::out_of_range("face_inclusion: index out of range");
    FiniteSSet src = standard_simplex(n - 1), dst = standard_simplex(n);
    return SimplicialMap::from_function(src, dst, [&](const Simplex& s) {
        std::vector<std::size_t> v;
        for (auto x : src.vertices(s)) v.push_back(x < static_cast<std::size_t>(i) ? x : x + 1);
        return dst.nerve_simplex(v);
    });
}

SimplicialMap vertex_inclusion(int n, int i)
{
    if (n < 0 || i < 0 || i > n) throw std::out_of_range("vertex_inclusion: index out of range");
    return SimplicialMap::constant(point(), standard_simplex(n), static_cast<std::size_t>(i));
}

Subcomplex simplex_face(const FiniteSSet& delta_n, const std::vector<int>& vertices)
{
    std::vector<std::size_t> v(vertices.begin(), vertices.end());
    std::sort(v.begin(), v.end());
    return Subcomplex::generated_by(delta_n, {delta_n.nerve_simplex(v)});
}

FiniteSSet real_projective_plane()
{
    return from_facets({{0, 1, 3}, {0, 1, 5}, {0, 2, 4}, {0, 2, 5}, {0, 3, 4},
                        {1, 2, 3}, {1, 2, 4}, {1, 4, 5}, {2, 3, 5}, {3, 4, 5}});
}

FiniteSSet torus()
{
    std::vector<std::vector<int>> f;
    for (int i = 0; i < 7; ++i) {
        f.push_back({i, (i + 1) % 7, (i + 3) % 7});
        f.push_back({i, (i + 2) % 7, (i + 3) % 7});
    }
    return from_facets(f);
}

// ---------------------------------------------------------------------------
// Products

namespace {

using Point = boost::container::small_vector<int, 4>;

void enumerate_paths(const std::vector<int>& dims, std::vector<Point>& path, std::vector<std::vector<Point>>& out)
{
    const Point cur = path.back();
    bool done = true;
    for (std::size_t i = 0; i < dims.size(); ++i) done = done && cur[i] == dims[i];
    if (done) {
        out.push_back(path);
        return;
    }
    std::size_t k = dims.size();
    for (unsigned long step = 1; step < (1ul << k); ++step) {
        Point next = cur;
        bool ok = true;
        for (std::size_t i = 0; i < k && ok; ++i)
            if (step & (1ul << i)) {
                if (++next[i] > dims[i]) ok = false;
            }
        if (!ok) continue;
        path.push_back(next);
        enumerate_paths(dims, path, out);
        path.pop_back();
    }
}

}  // namespace

ProductSSet::ProductSSet(std::vector<FiniteSSet> factors) : factors_(std::move(factors))
{
    if (factors_.empty()) throw std::invalid_argument("ProductSSet: need at least one factor");
    const std::size_t k = factors_.size();
    bool any_empty = false;
    int total_dim = 0;
    for (const auto& f : factors_) {
        any_empty = any_empty || f.empty();
        total_dim += std::max(f.dim(), 0);
    }
    // cells: per dimension, component lists
    std::vector<std::vector<std::vector<Simplex>>> cells(any_empty ? 0 : static_cast<std::size_t>(total_dim + 1));
    if (!any_empty) {
        std::vector<std::size_t> choice(k, 0);
        std::vector<int> cdim(k, 0);
        // iterate all tuples of nondegenerate simplices
        std::function<void(std::size_t)> rec = [&](std::size_t i) {
            if (i == k) {
                std::vector<std::vector<Point>> paths;
                std::vector<Point> path{Point(k, 0)};
                enumerate_paths(cdim, path, paths);
                for (const auto& p : paths) {
                    int m = static_cast<int>(p.size()) - 1;
                    std::vector<Simplex> comps;
                    for (std::size_t j = 0; j < k; ++j) {
                        OrderMap eta;
                        for (const auto& pt : p) eta.push_back(pt[j]);
                        comps.push_back(Simplex{m, cdim[j], choice[j], eta});
                    }
                    cells[m].push_back(std::move(comps));
                }
                return;
            }
            for (int d = 0; d <= factors_[i].dim(); ++d)
                for (std::size_t id = 0; id < factors_[i].count(d); ++id) {
                    choice[i] = id;
                    cdim[i] = d;
                    rec(i + 1);
                }
        };
        rec(0);
    }
    while (!cells.empty() && cells.back().empty()) cells.pop_back();
    for (std::size_t d = 0; d < cells.size(); ++d) {
        std::sort(cells[d].begin(), cells[d].end());
        for (std::size_t id = 0; id < cells[d].size(); ++id) {
            std::vector<std::pair<std::size_t, OrderMap>> key;
            for (const auto& c : cells[d][id]) key.emplace_back(c.id, c.eta);
            lookup_.emplace(std::move(key), id);
        }
    }
    components_ = cells;
    SSetBuilder b;
    for (std::size_t d = 0; d < cells.size(); ++d)
        for (std::size_t id = 0; id < cells[d].size(); ++id) {
            std::vector<Simplex> faces;
            for (int i = 0; d > 0 && i <= static_cast<int>(d); ++i) {
                std::vector<Simplex> fc;
                for (std::size_t j = 0; j < k; ++j) fc.push_back(factors_[j].face(cells[d][id][j], i));
                faces.push_back(tuple(fc));
            }
            b.add_simplex(static_cast<int>(d), std::move(faces));
        }
    sset_ = b.build(false);
    for (std::size_t j = 0; j < k; ++j) {
        std::vector<std::vector<Simplex>> im(cells.size());
        for (std::size_t d = 0; d < cells.size(); ++d)
            for (const auto& c : cells[d]) im[d].push_back(c[j]);
        projections_.emplace_back(sset_, factors_[j], std::move(im));
    }
}

std::vector<Simplex> ProductSSet::components(const Simplex& s) const
{
    std::vector<Simplex> out;
    for (std::size_t j = 0; j < factors_.size(); ++j) out.push_back(projections_[j](s));
    return out;
}

Simplex ProductSSet::tuple(const std::vector<Simplex>& comps) const
{
    if (comps.size() != factors_.size()) throw std::invalid_argument("tuple: wrong number of components");
    int m = comps.front().dim;
    for (const auto& c : comps)
        if (c.dim != m) throw std::invalid_argument("tuple: components of different dimensions");
    OrderMap zeta{0};
    std::vector<char> keep_step(static_cast<std::size_t>(m), 0);
    for (int t = 0; t < m; ++t) {
        bool common = true;
        for (const auto& c : comps) common = common && c.eta[t] == c.eta[t + 1];
        keep_step[t] = !common;
        zeta.push_back(zeta.back() + (common ? 0 : 1));
    }
    int mr = zeta.back();
    std::vector<std::pair<std::size_t, OrderMap>> key;
    for (const auto& c : comps) {
        OrderMap eta{c.eta[0]};
        for (int t = 0; t < m; ++t)
            if (keep_step[t]) eta.push_back(c.eta[t + 1]);
        key.emplace_back(c.id, std::move(eta));
    }
    auto it = lookup_.find(key);
    if (it == lookup_.end()) throw std::logic_error("tuple: product cell not found");
    return Simplex{m, mr, it->second, zeta};
}

SimplicialMap ProductSSet::pairing(const std::vector<SimplicialMap>& maps) const
{
    if (maps.size() != factors_.size()) throw std::invalid_argument("pairing: wrong number of maps");
    const FiniteSSet& src = maps.front().source();
    return SimplicialMap::from_function(src, sset_, [&](const Simplex& s) {
        std::vector<Simplex> c;
        for (const auto& f : maps) c.push_back(f(s));
        return tuple(c);
    });
}

SimplicialMap product_map(const ProductSSet& source, const ProductSSet& target, const std::vector<SimplicialMap>& maps)
{
    if (maps.size() != source.arity() || maps.size() != target.arity())
        throw std::invalid_argument("product_map: arity mismatch");
    return SimplicialMap::from_function(source.sset(), target.sset(), [&](const Simplex& s) {
        const auto& comps = source.components(s.base_dim, s.id);
        std::vector<Simplex> c;
        for (std::size_t j = 0; j < maps.size(); ++j) c.push_back(maps[j](comps[j]));
        return target.tuple(c);
    });
}

Coproduct coproduct(const std::vector<FiniteSSet>& parts)
{
    SSetBuilder b;
    int top = -1;
    for (const auto& p : parts) top = std::max(top, p.dim());
    std::vector<std::vector<std::size_t>> offset(parts.size(), std::vector<std::size_t>(static_cast<std::size_t>(top + 1), 0));
    for (int d = 0; d <= top; ++d)
        for (std::size_t k = 0; k < parts.size(); ++k) {
            offset[k][d] = b.count(d);
            for (std::size_t id = 0; id < parts[k].count(d); ++id) {
                std::vector<Simplex> faces;
                for (int i = 0; d > 0 && i <= d; ++i) {
                    Simplex f = parts[k].face_of(d, id, i);
                    f.id += offset[k][f.base_dim];
                    faces.push_back(f);
                }
                b.add_simplex(d, std::move(faces));
            }
        }
    Coproduct c{b.build(false), {}};
    for (std::size_t k = 0; k < parts.size(); ++k)
        c.injections.push_back(SimplicialMap::from_function(parts[k], c.sset, [&](const Simplex& s) {
            Simplex r = s;
            r.id += offset[k][s.base_dim];
            return r;
        }));
    return c;
}

Pushout pushout(const Subcomplex& a_in_x, const SimplicialMap& f)
{
    const FiniteSSet& x = a_in_x.parent();
    const FiniteSSet& z = f.target();
    if (f.source().total_cells() != a_in_x.sset().total_cells())
        throw std::invalid_argument("pushout: map is not defined on the subcomplex");
    int top = std::max(x.dim(), z.dim());
    std::vector<std::vector<std::size_t>> new_id(static_cast<std::size_t>(std::max(x.dim() + 1, 0)));
    std::vector<std::vector<long>> origin(static_cast<std::size_t>(top + 1));
    SSetBuilder b;
    auto x_to_p = [&](const Simplex& s) -> Simplex {
        if (a_in_x.contains(s)) return f(a_in_x.to_sub(s));
        Simplex r = s;
        r.id = new_id[s.base_dim][s.id];
        return r;
    };
    for (int d = 0; d <= top; ++d) {
        for (std::size_t id = 0; id < z.count(d); ++id) {
            std::vector<Simplex> faces;
            for (int i = 0; d > 0 && i <= d; ++i) faces.push_back(z.face_of(d, id, i));
            b.add_simplex(d, std::move(faces));
            origin[d].push_back(-1);
        }
        if (d <= x.dim()) {
            new_id[d].assign(x.count(d), static_cast<std::size_t>(-1));
            for (std::size_t id = 0; id < x.count(d); ++id) {
                if (a_in_x.contains(d, id)) continue;
                std::vector<Simplex> faces;
                for (int i = 0; d > 0 && i <= d; ++i) faces.push_back(x_to_p(x.face_of(d, id, i)));
                new_id[d][id] = b.add_simplex(d, std::move(faces));
                origin[d].push_back(static_cast<long>(id));
            }
        }
    }
    while (!origin.empty() && origin.back().empty()) origin.pop_back();
    Pushout p;
    p.sset = b.build(false);
    p.x_origin = std::move(origin);
    p.from_z = SimplicialMap::from_function(z, p.sset, [](const Simplex& s) { return s; });
    p.from_x = SimplicialMap::from_function(x, p.sset, x_to_p);
    return p;
}

FiberedProduct fibered_product(const SimplicialMap& f, const SimplicialMap& g)
{
    ProductSSet prod({f.source(), g.source()});
    Subcomplex sub = Subcomplex::from_predicate(prod.sset(), [&](const Simplex& s) {
        const auto& c = prod.components(s.base_dim, s.id);
        return f(c[0]) == g(c[1]);
    });
    return FiberedProduct{std::move(prod), std::move(sub)};
}

namespace {

bool over_same_base(const SimplicialMap& p, const std::vector<Simplex>& c)
{
    Simplex b0 = p(c[0]);
    for (std::size_t j = 1; j < c.size(); ++j)
        if (!(p(c[j]) == b0)) return false;
    return true;
}

}  // namespace

Subcomplex diagonal_in(const ProductSSet& prod, const SimplicialMap& p, const std::vector<int>& pattern)
{
    std::size_t k = 0;
    for (int r : pattern) {
        if (r <= 0) throw std::invalid_argument("diag_subspace: pattern entries must be positive");
        k += static_cast<std::size_t>(r);
    }
    if (k != prod.arity()) throw std::invalid_argument("diag_subspace: pattern does not match the power");
    return Subcomplex::from_predicate(prod.sset(), [&](const Simplex& s) {
        const auto& c = prod.components(s.base_dim, s.id);
        if (!over_same_base(p, c)) return false;
        std::size_t pos = 0;
        for (int r : pattern) {
            for (int j = 1; j < r; ++j)
                if (!(c[pos + j] == c[pos])) return false;
            pos += static_cast<std::size_t>(r);
        }
        return true;
    });
}

FiberedPower diag_subspace(const SimplicialMap& p, const std::vector<int>& pattern)
{
    std::size_t k = 0;
    for (int r : pattern) k += static_cast<std::size_t>(std::max(r, 0));
    ProductSSet prod(std::vector<FiniteSSet>(k, p.source()));
    Subcomplex power = Subcomplex::from_predicate(prod.sset(), [&](const Simplex& s) {
        return over_same_base(p, prod.components(s.base_dim, s.id));
    });
    Subcomplex diag = diagonal_in(prod, p, pattern);
    return FiberedPower{std::move(prod), std::move(power), std::move(diag)};
}

bool hat111_member(unsigned L, bool x_eq_r, bool r_eq_y)
{
    if (x_eq_r && r_eq_y) return true;
    if ((L & ~0b101u) == 0 && x_eq_r) return true;
    if ((L & ~0b110u) == 0 && r_eq_y) return true;
    return (L & ~0b100u) == 0;
}

bool hat2112_member(unsigned L, bool x_eq_r, bool r_eq_y)
{
    if ((L & ~0b011u) != 0) return false;
    if (x_eq_r && r_eq_y) return true;
    if (L == 0b001u && x_eq_r) return true;
    return L == 0b010u && r_eq_y;
}

HatDelta hat_delta(const SimplicialMap& p)
{
    FiniteSSet d2 = standard_simplex(2);
    const FiniteSSet& z = p.source();
    ProductSSet prod({d2, z, z, z});
    auto classify = [&](const Simplex& s, bool& ok, unsigned& L, bool& xr, bool& ry) {
        const auto& c = prod.components(s.base_dim, s.id);
        Simplex b = p(c[1]);
        ok = p(c[2]) == b && p(c[3]) == b;
        L = 0;
        for (auto v : d2.vertices(c[0])) L |= 1u << v;
        xr = c[1] == c[2];
        ry = c[2] == c[3];
    };
    Subcomplex h111 = Subcomplex::from_predicate(prod.sset(), [&](const Simplex& s) {
        bool ok, xr, ry;
        unsigned L;
        classify(s, ok, L, xr, ry);
        return ok && hat111_member(L, xr, ry);
    });
    Subcomplex h2112 = Subcomplex::from_predicate(prod.sset(), [&](const Simplex& s) {
        bool ok, xr, ry;
        unsigned L;
        classify(s, ok, L, xr, ry);
        return ok && hat2112_member(L, xr, ry);
    });
    return HatDelta{std::move(prod), std::move(h111), std::move(h2112)};
}

Cylinder cylinder_replacement(const SimplicialMap& iota)
{
    FiniteSSet d1 = standard_simplex(1);
    const FiniteSSet& a = iota.source();
    const FiniteSSet& x = iota.target();
    ProductSSet prism({d1, a});
    auto at_end = [&](const Simplex& s, std::size_t e) {
        const auto& c = prism.components(s.base_dim, s.id);
        return c[0].base_dim == 0 && c[0].id == e;
    };
    Subcomplex one = Subcomplex::from_predicate(prism.sset(), [&](const Simplex& s) { return at_end(s, 1); });
    SimplicialMap f = SimplicialMap::from_function(one.sset(), x, [&](const Simplex& s) {
        Simplex ps = one.inclusion()(s);
        return iota(prism.components(ps.base_dim, ps.id)[1]);
    });
    Pushout glued = pushout(one, f);
    SimplicialMap end = SimplicialMap::from_function(a, glued.sset, [&](const Simplex& s) {
        Simplex zero{s.dim, 0, 0, OrderMap(static_cast<std::size_t>(s.dim + 1), 0)};
        return glued.from_x(prism.tuple({zero, s}));
    });
    SimplicialMap proj = SimplicialMap::from_function(glued.sset, x, [&](const Simplex& s) {
        long o = glued.x_origin[s.base_dim][s.id];
        if (o < 0) return s;
        return iota(prism.components(s.base_dim, static_cast<std::size_t>(o))[1]);
    });
    return Cylinder{std::move(prism), std::move(glued), std::move(end), std::move(proj)};
}

FibrewiseSuspension fibrewise_suspension(const SimplicialMap& phi)
{
    FiniteSSet d1 = standard_simplex(1);
    const FiniteSSet& y = phi.source();
    const FiniteSSet& b = phi.target();
    ProductSSet prism({d1, y});
    Subcomplex ends = Subcomplex::from_predicate(prism.sset(), [&](const Simplex& s) {
        return prism.components(s.base_dim, s.id)[0].base_dim == 0;
    });
    Coproduct two = coproduct({b, b});
    SimplicialMap f = SimplicialMap::from_function(ends.sset(), two.sset, [&](const Simplex& s) {
        Simplex ps = ends.inclusion()(s);
        const auto& c = prism.components(ps.base_dim, ps.id);
        return two.injections[c[0].id](phi(c[1]));
    });
    Pushout glued = pushout(ends, f);
    // cells of the coproduct come first; the second copy of B follows the first
    std::vector<std::size_t> first_count;
    for (int d = 0; d <= b.dim(); ++d) first_count.push_back(b.count(d));
    SimplicialMap proj = SimplicialMap::from_function(glued.sset, b, [&](const Simplex& s) {
        long o = glued.x_origin[s.base_dim][s.id];
        if (o >= 0) return phi(prism.components(s.base_dim, static_cast<std::size_t>(o))[1]);
        Simplex r = s;
        if (r.id >= first_count[s.base_dim]) r.id -= first_count[s.base_dim];
        return r;
    });
    SimplicialMap e0 = glued.from_z.compose_after(two.injections[0]);
    SimplicialMap e1 = glued.from_z.compose_after(two.injections[1]);
    SimplicialMap q = glued.from_x;
    return FibrewiseSuspension{std::move(prism), std::move(glued), std::move(proj), std::move(e0), std::move(e1), std::move(q)};
}

}  // namespace heapstone
