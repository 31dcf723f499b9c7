#include "heapstone/cochain.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <tuple>

namespace heapstone {

namespace {

IntVector zeros(std::size_t p) { return IntVector(p); }

void axpy(IntVector& y, const Integer& k, const IntVector& x)
{
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += k * x[i];
}

OrderMap interval(int from, int to)
{
    OrderMap m;
    for (int v = from; v <= to; ++v) m.push_back(v);
    return m;
}

}  // namespace

// ---------------------------------------------------------------------------
// Cochain

Cochain::Cochain(FiniteSSet space, int degree, FGAbelianGroup pi, std::vector<IntVector> values)
    : space_(std::move(space)), degree_(degree), pi_(std::move(pi)), values_(std::move(values))
{
    if (degree_ < 0) throw std::invalid_argument("Cochain: negative degree");
    std::size_t cells = degree_ <= space_.dim() ? space_.count(degree_) : 0;
    if (values_.size() != cells) throw std::invalid_argument("Cochain: wrong number of values");
    for (const auto& v : values_)
        if (v.size() != pi_.n_generators()) throw std::invalid_argument("Cochain: value has wrong length");
}

Cochain Cochain::zero(FiniteSSet space, int degree, FGAbelianGroup pi)
{
    std::size_t cells = degree <= space.dim() ? space.count(degree) : 0;
    std::size_t p = pi.n_generators();
    return Cochain(std::move(space), degree, std::move(pi), std::vector<IntVector>(cells, zeros(p)));
}

void Cochain::set(std::size_t id, IntVector v)
{
    if (v.size() != pi_.n_generators()) throw std::invalid_argument("Cochain::set: value has wrong length");
    values_.at(id) = std::move(v);
}

void Cochain::add_to(std::size_t id, const IntVector& v)
{
    auto& dst = values_.at(id);
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += v[i];
}

IntVector Cochain::at(const Simplex& s) const
{
    if (s.dim != degree_) throw std::invalid_argument("Cochain::at: simplex has the wrong dimension");
    if (!s.is_nondegenerate()) return zeros(pi_.n_generators());
    return values_.at(s.id);
}

Cochain Cochain::canonical() const
{
    Cochain out = *this;
    for (auto& v : out.values_) v = pi_.canonical(v);
    return out;
}

bool Cochain::is_zero() const
{
    for (const auto& v : values_)
        if (!pi_.is_zero(v)) return false;
    return true;
}

bool Cochain::equals(const Cochain& o) const
{
    check_compatible(o);
    for (std::size_t i = 0; i < values_.size(); ++i)
        if (!pi_.equal(values_[i], o.values_[i])) return false;
    return true;
}

std::string Cochain::to_string() const
{
    std::string s = "{";
    bool first = true;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        IntVector v = pi_.canonical(values_[i]);
        if (heapstone::is_zero(v)) continue;
        if (!first) s += ", ";
        first = false;
        s += std::to_string(i) + ":" + heapstone::to_string(v);
    }
    return s + "}";
}

void Cochain::check_compatible(const Cochain& o) const
{
    if (!space_.same_as(o.space_) || degree_ != o.degree_ || !pi_.same_as(o.pi_))
        throw std::invalid_argument("cochains live on different spaces, degrees or groups");
}

Cochain Cochain::operator+(const Cochain& o) const
{
    check_compatible(o);
    Cochain out = *this;
    for (std::size_t i = 0; i < values_.size(); ++i) out.values_[i] = add(values_[i], o.values_[i]);
    return out;
}

Cochain Cochain::operator-(const Cochain& o) const
{
    check_compatible(o);
    Cochain out = *this;
    for (std::size_t i = 0; i < values_.size(); ++i) out.values_[i] = sub(values_[i], o.values_[i]);
    return out;
}

Cochain Cochain::operator-() const { return times(-1); }

Cochain Cochain::times(const Integer& k) const
{
    Cochain out = *this;
    for (auto& v : out.values_) v = scale(k, v);
    return out;
}

// ---------------------------------------------------------------------------
// Pullbacks

Cochain coboundary(const Cochain& c)
{
    const FiniteSSet& x = c.space();
    int d = c.degree() + 1;
    Cochain out = Cochain::zero(x, d, c.coefficients());
    if (d > x.dim()) return out;
    for (std::size_t id = 0; id < x.count(d); ++id) {
        IntVector acc = zeros(c.coefficients().n_generators());
        for (int i = 0; i <= d; ++i) {
            const Simplex& f = x.face_of(d, id, i);
            if (!f.is_nondegenerate()) continue;
            axpy(acc, i % 2 ? -1 : 1, c.value(f.id));
        }
        out.set(id, std::move(acc));
    }
    return out;
}

Cochain pullback(const SimplicialMap& f, const Cochain& c)
{
    if (!f.target().same_as(c.space())) throw std::invalid_argument("pullback: cochain is not on the target");
    Cochain out = Cochain::zero(f.source(), c.degree(), c.coefficients());
    if (c.degree() > f.source().dim()) return out;
    for (std::size_t id = 0; id < f.source().count(c.degree()); ++id) out.set(id, c.at(f.image(c.degree(), id)));
    return out;
}

const std::vector<std::pair<std::size_t, OrderMap>>& delta_faces(int q, int n)
{
    static std::mutex m;
    static std::map<std::pair<int, int>, std::vector<std::pair<std::size_t, OrderMap>>> cache;
    std::lock_guard<std::mutex> lock(m);
    auto key = std::make_pair(q, n);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    std::vector<std::pair<std::size_t, OrderMap>> faces;
    if (n >= 0 && n <= q) {
        FiniteSSet d = standard_simplex(q);
        for (std::size_t id = 0; id < d.count(n); ++id) {
            OrderMap theta;
            for (auto v : d.vertices(Simplex::nondegenerate(n, id))) theta.push_back(static_cast<int>(v));
            faces.emplace_back(id, std::move(theta));
        }
    }
    return cache.emplace(key, std::move(faces)).first->second;
}

Cochain pullback_simplex(const Cochain& c, const Simplex& sigma)
{
    int q = sigma.dim, n = c.degree();
    Cochain out = Cochain::zero(standard_simplex(q), n, c.coefficients());
    for (const auto& [id, theta] : delta_faces(q, n)) {
        IntVector v = c.at(c.space().apply(sigma, theta));
        if (!is_zero(v)) out.set(id, std::move(v));
    }
    return out;
}

Cochain pullback_order(const Cochain& c, const OrderMap& theta)
{
    int q = c.space().dim();
    if (!c.space().same_as(standard_simplex(q))) throw std::invalid_argument("pullback_order: cochain is not on a standard simplex");
    Simplex top = Simplex::nondegenerate(q, 0);
    return pullback_simplex(c, c.space().apply(top, theta));
}

Cochain restrict_to(const Cochain& c, const Subcomplex& a) { return pullback(a.inclusion(), c); }

Cochain extend_by_zero(const Cochain& c, const Subcomplex& a)
{
    if (!c.space().same_as(a.sset())) throw std::invalid_argument("extend_by_zero: cochain is not on the subcomplex");
    Cochain out = Cochain::zero(a.parent(), c.degree(), c.coefficients());
    if (c.degree() > a.parent().dim()) return out;
    for (std::size_t id = 0; id < a.parent().count(c.degree()); ++id)
        if (a.contains(c.degree(), id)) out.set(id, c.value(a.to_sub(Simplex::nondegenerate(c.degree(), id)).id));
    return out;
}

Cochain apply_hom(const GroupHom& h, const Cochain& c)
{
    if (!h.source().same_as(c.coefficients())) throw std::invalid_argument("apply_hom: coefficient group mismatch");
    Cochain out = Cochain::zero(c.space(), c.degree(), h.target());
    for (std::size_t id = 0; id < c.size(); ++id)
        if (!is_zero(c.value(id))) out.set(id, h.apply(c.value(id)));
    return out;
}

SimplicialMap simplex_map(const FiniteSSet& x, const Simplex& sigma)
{
    FiniteSSet d = standard_simplex(sigma.dim);
    std::vector<std::vector<Simplex>> images(static_cast<std::size_t>(sigma.dim + 1));
    for (int n = 0; n <= sigma.dim; ++n)
        for (const auto& [id, theta] : delta_faces(sigma.dim, n)) {
            if (images[n].size() <= id) images[n].resize(id + 1);
            images[n][id] = x.apply(sigma, theta);
        }
    return SimplicialMap(d, x, std::move(images));
}

// ---------------------------------------------------------------------------
// Products

Integer ring_modulus(const FGAbelianGroup& pi)
{
    if (pi.n_generators() != 1) throw std::invalid_argument("products need cyclic coefficients Z or Z/m");
    Integer m = 0;
    const IntMatrix& r = pi.relations();
    for (std::size_t j = 0; j < r.cols(); ++j) m = gcd(m, r(0, j));
    return abs(m);
}

namespace {

void check_ring(const Cochain& a, const Cochain& b)
{
    if (!a.space().same_as(b.space())) throw std::invalid_argument("products need cochains on one simplicial set");
    if (ring_modulus(a.coefficients()) != ring_modulus(b.coefficients()))
        throw std::invalid_argument("products need equal coefficient rings");
}

Integer reduce(const Integer& v, const Integer& m) { return m == 0 ? v : mod_floor(v, m); }

OrderMap from_vertices(const std::vector<int>& v)
{
    OrderMap m;
    for (int x : v) m.push_back(x);
    return m;
}

}  // namespace

Cochain cup(const Cochain& a, const Cochain& b)
{
    check_ring(a, b);
    int p = a.degree(), q = b.degree(), n = p + q;
    const FiniteSSet& x = a.space();
    Integer m = ring_modulus(a.coefficients());
    Cochain out = Cochain::zero(x, n, a.coefficients());
    if (n > x.dim()) return out;
    OrderMap front = interval(0, p), back = interval(p, n);
    for (std::size_t id = 0; id < x.count(n); ++id) {
        Simplex s = Simplex::nondegenerate(n, id);
        IntVector u = a.at(x.apply(s, front));
        if (u[0] == 0) continue;
        IntVector v = b.at(x.apply(s, back));
        out.set(id, {reduce(u[0] * v[0], m)});
    }
    return out;
}

int cup1_sign(int p, int q, int i) { return ((p - i) * (q + 1)) % 2 ? -1 : 1; }

Cochain cup1(const Cochain& a, const Cochain& b)
{
    check_ring(a, b);
    int p = a.degree(), q = b.degree(), n = p + q - 1;
    const FiniteSSet& x = a.space();
    Integer m = ring_modulus(a.coefficients());
    if (n < 0) throw std::invalid_argument("cup1 of two 0-cochains");
    Cochain out = Cochain::zero(x, n, a.coefficients());
    if (n > x.dim()) return out;
    std::vector<std::tuple<int, OrderMap, OrderMap>> terms;
    for (int i = 0; i < p; ++i) {
        OrderMap left = interval(0, i);
        for (int v = i + q; v <= p + q - 1; ++v) left.push_back(v);
        terms.emplace_back(cup1_sign(p, q, i), left, interval(i, i + q));
    }
    for (std::size_t id = 0; id < x.count(n); ++id) {
        Simplex s = Simplex::nondegenerate(n, id);
        Integer acc = 0;
        for (const auto& [sign, left, right] : terms) {
            IntVector u = a.at(x.apply(s, left));
            if (u[0] == 0) continue;
            acc += sign * u[0] * b.at(x.apply(s, right))[0];
        }
        if (acc != 0) out.set(id, {reduce(acc, m)});
    }
    return out;
}

Cochain cup_i(int i, const Cochain& a, const Cochain& b)
{
    if (i < 0) throw std::invalid_argument("cup_i: negative index");
    if (i == 0) return cup(a, b);
    if (i == 1) return cup1(a, b);
    check_ring(a, b);
    if (ring_modulus(a.coefficients()) != 2) throw std::invalid_argument("cup_i for i >= 2 is only available mod 2");
    int p = a.degree(), q = b.degree(), n = p + q - i;
    if (n < 0) throw std::invalid_argument("cup_i: negative result degree");
    const FiniteSSet& x = a.space();
    Cochain out = Cochain::zero(x, n, a.coefficients());
    if (n > x.dim() || n - i < 0) return out;
    std::vector<std::pair<OrderMap, OrderMap>> terms;
    std::vector<int> u(static_cast<std::size_t>(n - i));
    // enumerate subsets U of [n] of size n - i
    std::vector<char> pick(static_cast<std::size_t>(n + 1), 0);
    std::fill(pick.end() - (n - i), pick.end(), 1);
    do {
        std::vector<char> in_minus(pick.size(), 0), in_plus(pick.size(), 0);
        int j = 0;
        for (int v = 0; v <= n; ++v)
            if (pick[v]) {
                ++j;
                (v % 2 == j % 2 ? in_minus : in_plus)[v] = 1;
            }
        std::vector<int> left, right;
        for (int v = 0; v <= n; ++v) {
            if (!in_minus[v]) left.push_back(v);
            if (!in_plus[v]) right.push_back(v);
        }
        if (static_cast<int>(left.size()) == p + 1 && static_cast<int>(right.size()) == q + 1)
            terms.emplace_back(from_vertices(left), from_vertices(right));
    } while (std::next_permutation(pick.begin(), pick.end()));
    for (std::size_t id = 0; id < x.count(n); ++id) {
        Simplex s = Simplex::nondegenerate(n, id);
        Integer acc = 0;
        for (const auto& [left, right] : terms) {
            IntVector va = a.at(x.apply(s, left));
            if (va[0] == 0) continue;
            acc += va[0] * b.at(x.apply(s, right))[0];
        }
        if (mod_floor(acc, 2) != 0) out.set(id, {1});
    }
    return out;
}

// ---------------------------------------------------------------------------
// RelativeComplex

RelativeComplex::RelativeComplex(FiniteSSet x, Subcomplex a) : x_(std::move(x)), a_(std::move(a))
{
    if (!a_.parent().same_as(x_)) throw std::invalid_argument("RelativeComplex: subcomplex of a different space");
    int dim = x_.dim();
    cells_.resize(static_cast<std::size_t>(dim + 1));
    pos_.resize(static_cast<std::size_t>(dim + 1));
    for (int d = 0; d <= dim; ++d) {
        pos_[d].assign(x_.count(d), -1);
        for (std::size_t id = 0; id < x_.count(d); ++id)
            if (!a_.contains(d, id)) {
                pos_[d][id] = static_cast<long>(cells_[d].size());
                cells_[d].push_back(id);
            }
    }
    reduce();
}

bool RelativeComplex::relative_cell(int d, std::size_t id) const
{
    return d >= 0 && d <= x_.dim() && pos_[d][id] >= 0;
}

std::vector<std::size_t> RelativeComplex::reduced_sizes() const
{
    std::vector<std::size_t> out;
    for (const auto& l : alive_list_) out.push_back(l.size());
    return out;
}

void RelativeComplex::reduce()
{
    int dim = x_.dim();
    using Line = std::map<std::size_t, Integer>;
    // rows[k][b]: entries of δ^k in row b (cells of degree k+1); cols[k][a] likewise.
    std::vector<std::vector<Line>> rows(static_cast<std::size_t>(std::max(dim, 0))),
        cols(static_cast<std::size_t>(std::max(dim, 0)));
    for (int k = 0; k < dim; ++k) {
        rows[k].resize(cells_[k + 1].size());
        cols[k].resize(cells_[k].size());
        for (std::size_t b = 0; b < cells_[k + 1].size(); ++b) {
            std::size_t id = cells_[k + 1][b];
            for (int i = 0; i <= k + 1; ++i) {
                const Simplex& f = x_.face_of(k + 1, id, i);
                if (!f.is_nondegenerate() || pos_[k][f.id] < 0) continue;
                rows[k][b][static_cast<std::size_t>(pos_[k][f.id])] += i % 2 ? -1 : 1;
            }
            for (auto it = rows[k][b].begin(); it != rows[k][b].end();)
                it = it->second == 0 ? rows[k][b].erase(it) : std::next(it);
            for (const auto& [a, v] : rows[k][b]) cols[k][a][b] = v;
        }
    }
    alive_.assign(static_cast<std::size_t>(dim + 1), {});
    for (int d = 0; d <= dim; ++d) alive_[d].assign(cells_[d].size(), 1);

    using Key = std::tuple<std::size_t, int, std::size_t>;  // (row size, k, b)
    std::set<Key> queue;
    std::vector<std::vector<std::size_t>> queued(static_cast<std::size_t>(std::max(dim, 0)));
    auto requeue = [&](int k, std::size_t b, std::size_t old_size) {
        queue.erase(Key{old_size, k, b});
        if (alive_[k + 1][b] && !rows[k][b].empty()) queue.insert(Key{rows[k][b].size(), k, b});
    };
    for (int k = 0; k < dim; ++k)
        for (std::size_t b = 0; b < rows[k].size(); ++b)
            if (!rows[k][b].empty()) queue.insert(Key{rows[k][b].size(), k, b});

    while (!queue.empty()) {
        auto [size, k, b] = *queue.begin();
        queue.erase(queue.begin());
        if (!alive_[k + 1][b]) continue;
        std::size_t best = 0;
        bool found = false;
        for (const auto& [a, v] : rows[k][b])
            if ((v == 1 || v == -1) && (!found || cols[k][a].size() < cols[k][best].size())) {
                best = a;
                found = true;
            }
        if (!found) continue;
        std::size_t a = best;
        int eps = rows[k][b].at(a) == 1 ? 1 : -1;
        Step st{k, a, b, eps, {}, {}};
        for (const auto& [x, v] : rows[k][b])
            if (x != a) st.beta.emplace_back(x, v);
        for (const auto& [y, v] : cols[k][a])
            if (y != b) st.alpha.emplace_back(y, v);
        // δ'_{y,x} = δ_{y,x} - δ_{y,a} ε δ_{b,x}
        for (const auto& [y, ya] : st.alpha) {
            std::size_t old = rows[k][y].size();
            for (const auto& [x, bx] : st.beta) {
                Integer nv = rows[k][y][x] - ya * eps * bx;
                if (nv == 0) {
                    rows[k][y].erase(x);
                    cols[k][x].erase(y);
                } else {
                    rows[k][y][x] = nv;
                    cols[k][x][y] = nv;
                }
            }
            rows[k][y].erase(a);
            requeue(k, y, old);
        }
        for (const auto& [x, bx] : st.beta) cols[k][x].erase(b);
        rows[k][b].clear();
        cols[k][a].clear();
        // row a of δ^{k-1} and column b of δ^{k+1} disappear
        if (k >= 1) {
            for (const auto& [w, v] : rows[k - 1][a]) cols[k - 1][w].erase(a);
            queue.erase(Key{rows[k - 1][a].size(), k - 1, a});
            rows[k - 1][a].clear();
        }
        if (k + 1 < dim) {
            for (const auto& [v, val] : cols[k + 1][b]) {
                std::size_t old = rows[k + 1][v].size();
                rows[k + 1][v].erase(b);
                requeue(k + 1, v, old);
            }
            cols[k + 1][b].clear();
        }
        alive_[k][a] = 0;
        alive_[k + 1][b] = 0;
        steps_.push_back(std::move(st));
    }

    alive_list_.assign(static_cast<std::size_t>(dim + 1), {});
    alive_pos_.assign(static_cast<std::size_t>(dim + 1), {});
    for (int d = 0; d <= dim; ++d) {
        alive_pos_[d].assign(cells_[d].size(), -1);
        for (std::size_t i = 0; i < cells_[d].size(); ++i)
            if (alive_[d][i]) {
                alive_pos_[d][i] = static_cast<long>(alive_list_[d].size());
                alive_list_[d].push_back(i);
            }
    }
    reduced_.clear();
    for (int k = 0; k < dim; ++k) {
        IntMatrix m(alive_list_[k + 1].size(), alive_list_[k].size());
        for (std::size_t r = 0; r < alive_list_[k + 1].size(); ++r)
            for (const auto& [a, v] : rows[k][alive_list_[k + 1][r]]) {
                if (alive_pos_[k][a] < 0) throw std::logic_error("reduction left an entry in a dead column");
                m(r, static_cast<std::size_t>(alive_pos_[k][a])) = v;
            }
        reduced_.push_back(std::move(m));
    }
}

bool RelativeComplex::vanishes_on_subcomplex(const Cochain& c) const
{
    if (!c.space().same_as(x_)) throw std::invalid_argument("cochain on a different space");
    int d = c.degree();
    if (d > x_.dim()) return true;
    for (std::size_t id = 0; id < x_.count(d); ++id)
        if (pos_[d][id] < 0 && !c.coefficients().is_zero(c.value(id))) return false;
    return true;
}

bool RelativeComplex::is_relative_cocycle(const Cochain& c) const
{
    return vanishes_on_subcomplex(c) && coboundary(c).is_zero();
}

RelativeComplex::Vec RelativeComplex::to_relative(const Cochain& c) const
{
    int d = c.degree();
    Vec v;
    if (d > x_.dim()) return v;
    for (std::size_t id : cells_[d]) v.push_back(c.value(id));
    return v;
}

Cochain RelativeComplex::from_relative(int d, const Vec& v, const FGAbelianGroup& pi) const
{
    Cochain out = Cochain::zero(x_, d, pi);
    if (d > x_.dim()) return out;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (!is_zero(v[i])) out.set(cells_[d][i], pi.canonical(v[i]));
    return out;
}

void RelativeComplex::forward(int d, Vec& v, std::vector<std::pair<std::size_t, IntVector>>* h_contrib) const
{
    for (std::size_t i = 0; i < steps_.size(); ++i) {
        const Step& s = steps_[i];
        if (s.k == d) {
            for (auto& e : v[s.a]) e = 0;
        } else if (s.k + 1 == d) {
            if (is_zero(v[s.b])) continue;
            IntVector vb = v[s.b];
            if (h_contrib) h_contrib->emplace_back(i, scale(s.eps, vb));
            for (const auto& [y, coef] : s.alpha) axpy(v[y], -(s.eps * coef), vb);
            for (auto& e : v[s.b]) e = 0;
        }
    }
}

void RelativeComplex::backward_g(int d, Vec& v) const
{
    for (std::size_t i = steps_.size(); i-- > 0;) {
        const Step& s = steps_[i];
        if (s.k != d) continue;
        IntVector acc(v[s.a].size());
        for (const auto& [x, coef] : s.beta) axpy(acc, coef, v[x]);
        v[s.a] = scale(-s.eps, acc);
    }
}

IntVector RelativeComplex::to_dense(int d, const Vec& v, std::size_t p) const
{
    IntVector out;
    if (d > x_.dim()) return out;
    out.reserve(alive_list_[d].size() * p);
    for (std::size_t i : alive_list_[d])
        for (std::size_t j = 0; j < p; ++j) out.push_back(v[i][j]);
    return out;
}

RelativeComplex::Vec RelativeComplex::from_dense(int d, const IntVector& y, std::size_t p) const
{
    Vec v(cells_[d].size(), zeros(p));
    for (std::size_t r = 0; r < alive_list_[d].size(); ++r)
        for (std::size_t j = 0; j < p; ++j) v[alive_list_[d][r]][j] = y[r * p + j];
    return v;
}

FGAbelianGroup RelativeComplex::reduced_group(int d, const FGAbelianGroup& pi) const
{
    if (d < 0 || d > x_.dim()) return FGAbelianGroup();
    std::size_t m = alive_list_[d].size(), p = pi.n_generators();
    const IntMatrix& rel = pi.relations();
    IntMatrix r(m * p, m * rel.cols());
    for (std::size_t c = 0; c < m; ++c)
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = 0; j < rel.cols(); ++j) r(c * p + i, c * rel.cols() + j) = rel(i, j);
    return FGAbelianGroup(m * p, std::move(r));
}

namespace {

IntMatrix kron_identity(const IntMatrix& m, std::size_t p)
{
    IntMatrix out(m.rows() * p, m.cols() * p);
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c)
            if (m(r, c) != 0)
                for (std::size_t j = 0; j < p; ++j) out(r * p + j, c * p + j) = m(r, c);
    return out;
}

}  // namespace

std::optional<Cochain> RelativeComplex::solve(const Cochain& t) const
{
    if (!t.space().same_as(x_)) throw std::invalid_argument("solve: cochain on a different space");
    if (!is_relative_cocycle(t)) throw std::invalid_argument("solve: right-hand side is not a relative cocycle");
    int d = t.degree();
    if (d == 0) throw std::invalid_argument("solve: a 0-cochain is never a coboundary target");
    const FGAbelianGroup& pi = t.coefficients();
    std::size_t p = pi.n_generators();
    if (d > x_.dim()) return Cochain::zero(x_, d - 1, pi);

    Vec v = to_relative(t);
    std::vector<std::pair<std::size_t, IntVector>> contrib;
    forward(d, v, &contrib);
    IntVector rhs = to_dense(d, v, p);

    std::size_t unknowns = alive_list_[d - 1].size() * p;
    IntVector y(unknowns);
    if (!is_zero(rhs)) {
        std::shared_ptr<const LinearSolver> solver;
        {
            std::lock_guard<std::mutex> lock(cache_mutex_);
            for (const auto& e : solvers_)
                if (e.k == d - 1 && e.pi.same_as(pi)) solver = e.solver;
        }
        if (!solver) {
            IntMatrix a = kron_identity(reduced_[d - 1], p).hconcat(reduced_group(d, pi).relations());
            solver = std::make_shared<const LinearSolver>(a);
            std::lock_guard<std::mutex> lock(cache_mutex_);
            solvers_.push_back({d - 1, pi, solver});
        }
        auto sol = solver->solve(rhs);
        if (!sol) return std::nullopt;
        std::copy(sol->begin(), sol->begin() + static_cast<std::ptrdiff_t>(unknowns), y.begin());
    }

    // c = g(y) + H(t), one backward pass over the steps
    Vec c = from_dense(d - 1, y, p);
    auto it = contrib.rbegin();
    for (std::size_t i = steps_.size(); i-- > 0;) {
        const Step& s = steps_[i];
        if (s.k != d - 1) continue;
        IntVector acc(p);
        for (const auto& [x, coef] : s.beta) axpy(acc, coef, c[x]);
        c[s.a] = scale(-s.eps, acc);
        while (it != contrib.rend() && it->first > i) ++it;
        if (it != contrib.rend() && it->first == i) c[s.a] = add(c[s.a], it->second);
    }
    Cochain out = from_relative(d - 1, c, pi);
    if (!coboundary(out).equals(t)) throw std::logic_error("RelativeComplex::solve produced a wrong cobounding cochain");
    return out;
}

GroupElement RelativeComplex::Cohomology::class_of(const Cochain& z) const
{
    if (z.degree() != degree_ || !z.coefficients().same_as(pi_)) throw std::invalid_argument("class_of: wrong degree or group");
    if (!owner_->is_relative_cocycle(z)) throw std::invalid_argument("class_of: not a relative cocycle");
    Vec v = owner_->to_relative(z);
    owner_->forward(degree_, v, nullptr);
    return dense_->class_of(owner_->to_dense(degree_, v, pi_.n_generators()));
}

Cochain RelativeComplex::Cohomology::representative(const GroupElement& cls) const
{
    if (!cls.group().same_as(group_)) throw std::invalid_argument("representative: class of another group");
    if (degree_ > owner_->x_.dim()) return Cochain::zero(owner_->x_, degree_, pi_);
    Vec v = owner_->from_dense(degree_, dense_->representative(cls), pi_.n_generators());
    owner_->backward_g(degree_, v);
    return owner_->from_relative(degree_, v, pi_);
}

std::vector<Cochain> RelativeComplex::Cohomology::generator_representatives() const
{
    std::vector<Cochain> out;
    for (std::size_t i = 0; i < group_.n_generators(); ++i) out.push_back(representative(group_.generator(i)));
    return out;
}

std::shared_ptr<const RelativeComplex::Cohomology> RelativeComplex::cohomology(int k, const FGAbelianGroup& pi) const
{
    if (k < 0) throw std::invalid_argument("cohomology: negative degree");
    {
        std::lock_guard<std::mutex> lock(cache_mutex_);
        for (const auto& c : cohomologies_)
            if (c->degree_ == k && c->pi_.same_as(pi)) return c;
    }
    std::size_t p = pi.n_generators();
    FGAbelianGroup below = reduced_group(k - 1, pi), mid = reduced_group(k, pi), above = reduced_group(k + 1, pi);
    auto differential = [&](int d, const FGAbelianGroup& s, const FGAbelianGroup& t) {
        if (d < 0 || d >= static_cast<int>(reduced_.size())) return GroupHom::zero(s, t);
        return GroupHom(s, t, kron_identity(reduced_[d], p));
    };
    auto c = std::make_shared<Cohomology>();
    c->owner_ = this;
    c->degree_ = k;
    c->pi_ = pi;
    c->dense_ = std::make_shared<const CohomologyGroup>(
        heapstone::cohomology(differential(k - 1, below, mid), differential(k, mid, above)));
    c->group_ = c->dense_->group();
    std::lock_guard<std::mutex> lock(cache_mutex_);
    cohomologies_.push_back(c);
    return c;
}

}  // namespace heapstone
