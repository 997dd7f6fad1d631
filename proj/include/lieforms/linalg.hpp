#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace lieforms {

using Vector = std::vector<double>;

struct Triplet {
    int row;
    int col;
    double value;
};

/// Compressed sparse row matrix. Column indices are sorted and unique per row.
class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(int rows, int cols);

    /// Duplicate entries are summed; explicit zeros produced by cancellation are kept
    /// unless `drop_zeros` is set.
    static SparseMatrix from_triplets(int rows, int cols, std::vector<Triplet> triplets,
                                      bool drop_zeros = false);
    static SparseMatrix identity(int n);
    static SparseMatrix diagonal(std::span<const double> d);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::size_t nonzeros() const { return values_.size(); }

    std::span<const int> row_offsets() const { return offsets_; }
    std::span<const int> col_indices() const { return cols_idx_; }
    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

    /// Entry lookup by binary search; 0 for structural zeros.
    double coeff(int row, int col) const;

    Vector multiply(std::span<const double> x) const;
    /// y = A^T x without forming the transpose.
    Vector multiply_transpose(std::span<const double> x) const;

    SparseMatrix transpose() const;
    SparseMatrix operator*(const SparseMatrix& other) const;
    SparseMatrix scaled(double s) const;
    Vector diagonal_entries() const;
    std::vector<Triplet> triplets() const;

    /// Rows `keep_rows` and columns `keep_cols` (both given as old indices, in order).
    SparseMatrix submatrix(std::span<const int> keep_rows, std::span<const int> keep_cols) const;

    double max_abs() const;
    std::vector<std::vector<double>> to_dense() const;

private:
    int rows_{0};
    int cols_{0};
    std::vector<int> offsets_{0};
    std::vector<int> cols_idx_;
    std::vector<double> values_;
};

/// alpha*A + beta*B; shapes must agree.
SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, double alpha = 1.0, double beta = 1.0);

/// max |A - B| over all entries.
double max_abs_difference(const SparseMatrix& a, const SparseMatrix& b);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double norm_inf(std::span<const double> a);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

struct SolveStats {
    int iterations{0};
    double relative_residual{0.0};
    std::vector<double> residual_history;
};

/// Jacobi-preconditioned conjugate gradients. Throws SolverError carrying the
/// residual history when `max_iter` is exhausted.
Vector solve_spd(const SparseMatrix& a, std::span<const double> b, double tol, int max_iter,
                 SolveStats* stats = nullptr, std::span<const double> x0 = {});

/// Reusable sparse LU factorisation with partial pivoting.
class SparseLU {
public:
    SparseLU();
    explicit SparseLU(const SparseMatrix& a);
    ~SparseLU();
    SparseLU(SparseLU&&) noexcept;
    SparseLU& operator=(SparseLU&&) noexcept;

    void factorize(const SparseMatrix& a);
    Vector solve(std::span<const double> b) const;
    bool factorized() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// One-shot nonsymmetric solve. Relative residual above `tol` raises SolverError;
/// a numerically singular matrix raises SingularMatrixError.
Vector solve_general(const SparseMatrix& a, std::span<const double> b, double tol = 1e-10,
                     SolveStats* stats = nullptr);

/// Matrix Market coordinate format (real, general or symmetric).
void write_matrix_market(std::ostream& os, const SparseMatrix& a, bool symmetric = false);
void write_matrix_market(const std::string& path, const SparseMatrix& a, bool symmetric = false);
SparseMatrix read_matrix_market(std::istream& is);
SparseMatrix read_matrix_market(const std::string& path);

} // namespace lieforms
