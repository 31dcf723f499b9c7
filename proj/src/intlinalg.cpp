#include "heapstone/intlinalg.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace heapstone {

Integer mod_floor(const Integer& a, const Integer& m)
{
    Integer mm = boost::multiprecision::abs(m);
    Integer r = a % mm;
    if (r < 0) r += mm;
    return r;
}

Integer floor_div(const Integer& a, const Integer& b)
{
    Integer q = a / b;
    Integer r = a % b;
    if (r != 0 && ((r < 0) != (b < 0))) --q;
    return q;
}

Integer gcd(Integer a, Integer b)
{
    a = boost::multiprecision::abs(a);
    b = boost::multiprecision::abs(b);
    while (b != 0) {
        Integer t = a % b;
        a = std::move(b);
        b = std::move(t);
    }
    return a;
}

std::string to_string(const Integer& x) { return x.str(); }

std::string to_string(const IntVector& v)
{
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) os << ",";
        os << v[i];
    }
    os << ")";
    return os.str();
}

bool is_zero(const IntVector& v)
{
    return std::all_of(v.begin(), v.end(), [](const Integer& x) { return x == 0; });
}

IntVector add(const IntVector& a, const IntVector& b)
{
    if (a.size() != b.size()) throw std::invalid_argument("vector length mismatch");
    IntVector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

IntVector sub(const IntVector& a, const IntVector& b)
{
    if (a.size() != b.size()) throw std::invalid_argument("vector length mismatch");
    IntVector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

IntVector scale(const Integer& k, const IntVector& a)
{
    IntVector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = k * a[i];
    return r;
}

IntVector unit_vector(std::size_t n, std::size_t i)
{
    IntVector r(n);
    r.at(i) = 1;
    return r;
}

// ---------------------------------------------------------------------------
// IntMatrix

IntMatrix::IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

IntMatrix::IntMatrix(std::size_t rows, std::size_t cols, IntVector entries)
    : rows_(rows), cols_(cols), data_(std::move(entries))
{
    if (data_.size() != rows * cols) throw std::invalid_argument("IntMatrix: entry count must equal rows*cols");
}

IntMatrix IntMatrix::from_rows(const std::vector<IntVector>& rows, std::size_t cols_if_empty)
{
    std::size_t c = rows.empty() ? cols_if_empty : rows.front().size();
    IntMatrix m(rows.size(), c);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != c) throw std::invalid_argument("IntMatrix: ragged rows");
        for (std::size_t j = 0; j < c; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

IntMatrix IntMatrix::from_columns(std::size_t rows, const std::vector<IntVector>& cols)
{
    IntMatrix m(rows, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
        if (cols[j].size() != rows) throw std::invalid_argument("IntMatrix: column length mismatch");
        for (std::size_t i = 0; i < rows; ++i) m(i, j) = cols[j][i];
    }
    return m;
}

IntMatrix IntMatrix::identity(std::size_t n)
{
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

IntVector IntMatrix::column(std::size_t j) const
{
    IntVector c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
}

IntVector IntMatrix::row(std::size_t i) const
{
    return IntVector(data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
                     data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_));
}

IntMatrix IntMatrix::transpose() const
{
    IntMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

IntMatrix IntMatrix::hconcat(const IntMatrix& other) const
{
    if (rows_ != other.rows_) throw std::invalid_argument("hconcat: row mismatch");
    IntMatrix m(rows_, cols_ + other.cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) m(i, j) = (*this)(i, j);
        for (std::size_t j = 0; j < other.cols_; ++j) m(i, cols_ + j) = other(i, j);
    }
    return m;
}

IntMatrix IntMatrix::operator*(const IntMatrix& other) const
{
    if (cols_ != other.rows_) throw std::invalid_argument("matrix product: dimension mismatch");
    IntMatrix m(rows_, other.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t k = 0; k < cols_; ++k) {
            const Integer& a = (*this)(i, k);
            if (a == 0) continue;
            for (std::size_t j = 0; j < other.cols_; ++j) m(i, j) += a * other(k, j);
        }
    return m;
}

IntVector IntMatrix::operator*(const IntVector& v) const
{
    if (cols_ != v.size()) throw std::invalid_argument("matrix-vector product: dimension mismatch");
    IntVector r(rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            if (v[j] != 0) r[i] += (*this)(i, j) * v[j];
    return r;
}

bool IntMatrix::is_zero() const { return heapstone::is_zero(data_); }

Integer IntMatrix::determinant() const
{
    if (rows_ != cols_) throw std::invalid_argument("determinant of non-square matrix");
    std::size_t n = rows_;
    if (n == 0) return 1;
    IntMatrix m = *this;
    Integer sign = 1;
    Integer prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m(k, k) == 0) {
            std::size_t p = k + 1;
            while (p < n && m(p, k) == 0) ++p;
            if (p == n) return 0;
            m.swap_rows(k, p);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j)
                m(i, j) = (m(i, j) * m(k, k) - m(i, k) * m(k, j)) / prev;
        prev = m(k, k);
    }
    return sign * m(n - 1, n - 1);
}

std::string IntMatrix::to_string() const
{
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < rows_; ++i) {
        if (i) os << ",";
        os << "[";
        for (std::size_t j = 0; j < cols_; ++j) {
            if (j) os << ",";
            os << (*this)(i, j);
        }
        os << "]";
    }
    os << "]";
    return os.str();
}

void IntMatrix::swap_rows(std::size_t a, std::size_t b)
{
    if (a == b) return;
    for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
}

void IntMatrix::swap_cols(std::size_t a, std::size_t b)
{
    if (a == b) return;
    for (std::size_t i = 0; i < rows_; ++i) std::swap((*this)(i, a), (*this)(i, b));
}

void IntMatrix::add_row_multiple(std::size_t dst, std::size_t src, const Integer& k)
{
    if (k == 0) return;
    for (std::size_t j = 0; j < cols_; ++j)
        if ((*this)(src, j) != 0) (*this)(dst, j) += k * (*this)(src, j);
}

void IntMatrix::add_col_multiple(std::size_t dst, std::size_t src, const Integer& k)
{
    if (k == 0) return;
    for (std::size_t i = 0; i < rows_; ++i)
        if ((*this)(i, src) != 0) (*this)(i, dst) += k * (*this)(i, src);
}

void IntMatrix::negate_row(std::size_t i)
{
    for (std::size_t j = 0; j < cols_; ++j) (*this)(i, j) = -(*this)(i, j);
}

void IntMatrix::negate_col(std::size_t j)
{
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = -(*this)(i, j);
}

// ---------------------------------------------------------------------------
// Smith normal form

IntVector SNFDecomposition::invariant_factors() const
{
    IntVector f;
    for (std::size_t i = 0; i < rank; ++i) f.push_back(S(i, i));
    return f;
}

namespace {

// Keeps P*A*Q == S and the two inverse transforms in sync.
struct SmithWork {
    SmithTransforms t;

    void row_add(std::size_t dst, std::size_t src, const Integer& k)
    {
        t.S.add_row_multiple(dst, src, k);
        t.P.add_row_multiple(dst, src, k);
        t.P_inv.add_col_multiple(src, dst, -k);
    }
    void col_add(std::size_t dst, std::size_t src, const Integer& k)
    {
        t.S.add_col_multiple(dst, src, k);
        t.Q.add_col_multiple(dst, src, k);
        t.Q_inv.add_row_multiple(src, dst, -k);
    }
    void row_swap(std::size_t a, std::size_t b)
    {
        t.S.swap_rows(a, b);
        t.P.swap_rows(a, b);
        t.P_inv.swap_cols(a, b);
    }
    void col_swap(std::size_t a, std::size_t b)
    {
        t.S.swap_cols(a, b);
        t.Q.swap_cols(a, b);
        t.Q_inv.swap_rows(a, b);
    }
    void row_negate(std::size_t i)
    {
        t.S.negate_row(i);
        t.P.negate_row(i);
        t.P_inv.negate_col(i);
    }
};

}  // namespace

SmithTransforms smith_transforms(const IntMatrix& A)
{
    const std::size_t m = A.rows(), n = A.cols();
    SmithWork w{SmithTransforms{IntMatrix::identity(m), IntMatrix::identity(m), IntMatrix::identity(n),
                                IntMatrix::identity(n), A, 0}};
    auto& S = w.t.S;
    std::size_t t = 0;
    while (t < m && t < n) {
        // Smallest |entry| in the trailing block; ties: lowest row, then lowest column.
        std::size_t pi = m, pj = n;
        for (std::size_t i = t; i < m; ++i)
            for (std::size_t j = t; j < n; ++j) {
                if (S(i, j) == 0) continue;
                if (pi == m || boost::multiprecision::abs(S(i, j)) < boost::multiprecision::abs(S(pi, pj))) {
                    pi = i;
                    pj = j;
                }
            }
        if (pi == m) break;
        w.row_swap(t, pi);
        w.col_swap(t, pj);

        for (;;) {
            bool clean = true;
            for (std::size_t i = t + 1; i < m; ++i)
                if (S(i, t) != 0) {
                    w.row_add(i, t, -floor_div(S(i, t), S(t, t)));
                    if (S(i, t) != 0) clean = false;
                }
            for (std::size_t j = t + 1; j < n; ++j)
                if (S(t, j) != 0) {
                    w.col_add(j, t, -floor_div(S(t, j), S(t, t)));
                    if (S(t, j) != 0) clean = false;
                }
            if (!clean) {
                std::size_t bi = m, bj = n;
                Integer best = boost::multiprecision::abs(S(t, t));
                for (std::size_t i = t + 1; i < m; ++i)
                    if (S(i, t) != 0 && boost::multiprecision::abs(S(i, t)) < best) {
                        best = boost::multiprecision::abs(S(i, t));
                        bi = i;
                        bj = n;
                    }
                for (std::size_t j = t + 1; j < n; ++j)
                    if (S(t, j) != 0 && boost::multiprecision::abs(S(t, j)) < best) {
                        best = boost::multiprecision::abs(S(t, j));
                        bi = m;
                        bj = j;
                    }
                if (bi < m) w.row_swap(t, bi);
                if (bj < n) w.col_swap(t, bj);
                continue;
            }
            // Divisibility chain: fold an offending row into the pivot row.
            std::size_t oi = m;
            for (std::size_t i = t + 1; i < m && oi == m; ++i)
                for (std::size_t j = t + 1; j < n; ++j)
                    if (S(i, j) % S(t, t) != 0) {
                        oi = i;
                        break;
                    }
            if (oi == m) break;
            w.row_add(t, oi, 1);
        }
        if (S(t, t) < 0) w.row_negate(t);
        ++t;
    }
    w.t.rank = t;
    return w.t;
}

SNFDecomposition smith_normal_form(const IntMatrix& A)
{
    SmithTransforms t = smith_transforms(A);
    return SNFDecomposition{std::move(t.P_inv), std::move(t.S), std::move(t.Q_inv), t.rank};
}

std::optional<LinearSolution> solve_linear(const IntMatrix& A, const IntVector& b)
{
    if (b.size() != A.rows())
        throw std::invalid_argument("solve_linear: right-hand side length " + std::to_string(b.size()) +
                                    " does not match " + std::to_string(A.rows()) + " rows");
    SmithTransforms t = smith_transforms(A);
    IntVector c = t.P * b;
    IntVector y(A.cols());
    for (std::size_t i = 0; i < A.rows(); ++i) {
        if (i < t.rank) {
            if (c[i] % t.S(i, i) != 0) return std::nullopt;
            y[i] = c[i] / t.S(i, i);
        } else if (c[i] != 0) {
            return std::nullopt;
        }
    }
    LinearSolution sol;
    sol.particular = t.Q * y;
    for (std::size_t j = t.rank; j < A.cols(); ++j) sol.kernel_basis.push_back(t.Q.column(j));
    return sol;
}

LinearSolver::LinearSolver(const IntMatrix& A) : rows_(A.rows()), cols_(A.cols()), t_(smith_transforms(A)) {}

std::optional<IntVector> LinearSolver::solve(const IntVector& b) const
{
    if (b.size() != rows_) throw std::invalid_argument("LinearSolver: right-hand side length mismatch");
    IntVector c = t_.P * b;
    IntVector y(cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
        if (i < t_.rank) {
            if (c[i] % t_.S(i, i) != 0) return std::nullopt;
            y[i] = c[i] / t_.S(i, i);
        } else if (c[i] != 0) {
            return std::nullopt;
        }
    }
    return t_.Q * y;
}

std::vector<IntVector> LinearSolver::kernel_basis() const
{
    std::vector<IntVector> basis;
    for (std::size_t j = t_.rank; j < cols_; ++j) basis.push_back(t_.Q.column(j));
    return basis;
}

std::vector<IntVector> integer_kernel(const IntMatrix& A)
{
    SmithTransforms t = smith_transforms(A);
    std::vector<IntVector> basis;
    for (std::size_t j = t.rank; j < A.cols(); ++j) basis.push_back(t.Q.column(j));
    return basis;
}

// ---------------------------------------------------------------------------
// SparseSystem

std::size_t SparseSystem::add_variable() { return n_vars_++; }

void SparseSystem::add_equation(std::map<std::size_t, Integer> coeffs, Integer rhs)
{
    for (auto it = coeffs.begin(); it != coeffs.end();) {
        if (it->first >= n_vars_) throw std::invalid_argument("SparseSystem: variable index out of range");
        if (it->second == 0)
            it = coeffs.erase(it);
        else
            ++it;
    }
    rows_.push_back(Row{std::move(coeffs), std::move(rhs)});
}

std::optional<IntVector> SparseSystem::solve() const
{
    std::vector<Row> rows = rows_;
    std::vector<bool> alive(rows.size(), true);
    std::vector<std::set<std::size_t>> occurs(n_vars_);
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (const auto& [v, c] : rows[r].coeffs) occurs[v].insert(r);

    struct Substitution {
        std::size_t var;
        Row row;
        Integer unit;
    };
    std::vector<Substitution> subs;

    bool progress = true;
    while (progress) {
        progress = false;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (!alive[r]) continue;
            std::size_t best = n_vars_;
            for (const auto& [v, c] : rows[r].coeffs)
                if ((c == 1 || c == -1) && (best == n_vars_ || occurs[v].size() < occurs[best].size())) best = v;
            if (best == n_vars_) continue;
            progress = true;
            Row pivot = rows[r];
            Integer unit = pivot.coeffs.at(best);
            alive[r] = false;
            for (const auto& [v, c] : pivot.coeffs) occurs[v].erase(r);
            std::vector<std::size_t> targets(occurs[best].begin(), occurs[best].end());
            for (std::size_t r2 : targets) {
                Row& row = rows[r2];
                Integer factor = row.coeffs.at(best) * unit;
                for (const auto& [v, c] : pivot.coeffs) {
                    Integer& entry = row.coeffs[v];
                    bool was_zero = entry == 0;
                    entry -= factor * c;
                    if (entry == 0) {
                        row.coeffs.erase(v);
                        occurs[v].erase(r2);
                    } else if (was_zero) {
                        occurs[v].insert(r2);
                    }
                }
                row.rhs -= factor * pivot.rhs;
            }
            subs.push_back(Substitution{best, std::move(pivot), unit});
        }
    }

    IntVector x(n_vars_);
    std::vector<std::size_t> dense_rows;
    std::map<std::size_t, std::size_t> dense_index;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (!alive[r]) continue;
        if (rows[r].coeffs.empty()) {
            if (rows[r].rhs != 0) return std::nullopt;
            continue;
        }
        dense_rows.push_back(r);
        for (const auto& [v, c] : rows[r].coeffs) dense_index.emplace(v, 0);
    }
    if (!dense_rows.empty()) {
        std::vector<std::size_t> vars;
        for (auto& [v, idx] : dense_index) {
            idx = vars.size();
            vars.push_back(v);
        }
        IntMatrix A(dense_rows.size(), vars.size());
        IntVector b(dense_rows.size());
        for (std::size_t i = 0; i < dense_rows.size(); ++i) {
            const Row& row = rows[dense_rows[i]];
            for (const auto& [v, c] : row.coeffs) A(i, dense_index.at(v)) = c;
            b[i] = row.rhs;
        }
        auto sol = solve_linear(A, b);
        if (!sol) return std::nullopt;
        for (std::size_t k = 0; k < vars.size(); ++k) x[vars[k]] = sol->particular[k];
    }
    for (auto it = subs.rbegin(); it != subs.rend(); ++it) {
        Integer acc = it->row.rhs;
        for (const auto& [v, c] : it->row.coeffs)
            if (v != it->var) acc -= c * x[v];
        x[it->var] = acc * it->unit;
    }
    return x;
}

}  // namespace heapstone
