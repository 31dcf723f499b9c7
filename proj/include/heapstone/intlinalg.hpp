#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace heapstone {

using Integer = boost::multiprecision::cpp_int;
using IntVector = std::vector<Integer>;

/// Remainder in [0, |m|).
Integer mod_floor(const Integer& a, const Integer& m);
/// Quotient rounded towards negative infinity.
Integer floor_div(const Integer& a, const Integer& b);
Integer gcd(Integer a, Integer b);

std::string to_string(const Integer& x);
std::string to_string(const IntVector& v);

bool is_zero(const IntVector& v);
IntVector add(const IntVector& a, const IntVector& b);
IntVector sub(const IntVector& a, const IntVector& b);
IntVector scale(const Integer& k, const IntVector& a);
IntVector unit_vector(std::size_t n, std::size_t i);

/// Dense integer matrix, row-major, arbitrary precision.
class IntMatrix {
public:
    IntMatrix() = default;
    IntMatrix(std::size_t rows, std::size_t cols);
    IntMatrix(std::size_t rows, std::size_t cols, IntVector entries);
    /// Rows given as nested lists; all rows must have equal length.
    static IntMatrix from_rows(const std::vector<IntVector>& rows, std::size_t cols_if_empty = 0);
    static IntMatrix from_columns(std::size_t rows, const std::vector<IntVector>& cols);
    static IntMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Integer& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Integer& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    IntVector column(std::size_t j) const;
    IntVector row(std::size_t i) const;
    IntMatrix transpose() const;
    /// Horizontal concatenation [this | other]; row counts must agree.
    IntMatrix hconcat(const IntMatrix& other) const;

    IntMatrix operator*(const IntMatrix& other) const;
    IntVector operator*(const IntVector& v) const;
    bool operator==(const IntMatrix& other) const = default;

    bool is_zero() const;
    /// Exact determinant by fraction-free elimination (square matrices only).
    Integer determinant() const;

    std::string to_string() const;

    void swap_rows(std::size_t a, std::size_t b);
    void swap_cols(std::size_t a, std::size_t b);
    /// row[dst] += k * row[src]
    void add_row_multiple(std::size_t dst, std::size_t src, const Integer& k);
    void add_col_multiple(std::size_t dst, std::size_t src, const Integer& k);
    void negate_row(std::size_t i);
    void negate_col(std::size_t j);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    IntVector data_;
};

/// A = U * S * V with U, V unimodular and S in Smith normal form.
struct SNFDecomposition {
    IntMatrix U;
    IntMatrix S;
    IntMatrix V;
    std::size_t rank = 0;

    /// Nonzero diagonal entries s_1 | s_2 | ... | s_rank.
    IntVector invariant_factors() const;
};

/// Smith normal form together with the inverse transforms: P * A * Q = S.
struct SmithTransforms {
    IntMatrix P, P_inv, Q, Q_inv, S;
    std::size_t rank = 0;
};

SmithTransforms smith_transforms(const IntMatrix& A);
SNFDecomposition smith_normal_form(const IntMatrix& A);

struct LinearSolution {
    IntVector particular;
    std::vector<IntVector> kernel_basis;
};

/// Integer solutions of A x = b. Throws std::invalid_argument when b has the
/// wrong length; returns nullopt when no integer solution exists.
std::optional<LinearSolution> solve_linear(const IntMatrix& A, const IntVector& b);

/// Solver for A x = b with the Smith transforms of A computed once.
class LinearSolver {
public:
    LinearSolver() = default;
    explicit LinearSolver(const IntMatrix& A);
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    /// One integer solution, or nullopt.
    std::optional<IntVector> solve(const IntVector& b) const;
    std::vector<IntVector> kernel_basis() const;

private:
    std::size_t rows_ = 0, cols_ = 0;
    SmithTransforms t_;
};

/// Integer kernel basis of A (columns of the returned list span ker A over Z).
std::vector<IntVector> integer_kernel(const IntMatrix& A);

/// Sparse system sum_j a_ij x_j = b_i over Z. Unit pivots are eliminated
/// sparsely; what remains is handed to the dense Smith solver. Only a
/// particular solution is produced.
class SparseSystem {
public:
    explicit SparseSystem(std::size_t n_vars) : n_vars_(n_vars) {}

    std::size_t add_variable();
    std::size_t variable_count() const { return n_vars_; }
    /// Adds a row; zero coefficients are dropped.
    void add_equation(std::map<std::size_t, Integer> coeffs, Integer rhs);
    std::size_t equation_count() const { return rows_.size(); }

    std::optional<IntVector> solve() const;

private:
    struct Row {
        std::map<std::size_t, Integer> coeffs;
        Integer rhs;
    };
    std::size_t n_vars_;
    std::vector<Row> rows_;
};

}  // namespace heapstone
