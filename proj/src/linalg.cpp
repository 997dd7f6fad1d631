#include "lieforms/linalg.hpp"

#include "lieforms/errors.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace lieforms {

SparseMatrix::SparseMatrix(int rows, int cols)
    : rows_(rows), cols_(cols), offsets_(static_cast<std::size_t>(rows) + 1, 0) {
    if (rows < 0 || cols < 0) throw InvalidArgument("SparseMatrix: negative dimension");
}

SparseMatrix SparseMatrix::from_triplets(int rows, int cols, std::vector<Triplet> triplets,
                                         bool drop_zeros) {
    SparseMatrix m(rows, cols);
    for (const auto& t : triplets) {
        if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
            throw InvalidArgument("SparseMatrix::from_triplets: index out of range");
    }
    std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    m.cols_idx_.reserve(triplets.size());
    m.values_.reserve(triplets.size());
    std::size_t k = 0;
    while (k < triplets.size()) {
        const int r = triplets[k].row;
        const int c = triplets[k].col;
        double v = 0.0;
        while (k < triplets.size() && triplets[k].row == r && triplets[k].col == c) {
            v += triplets[k].value;
            ++k;
        }
        if (drop_zeros && v == 0.0) continue;
        m.cols_idx_.push_back(c);
        m.values_.push_back(v);
        ++m.offsets_[static_cast<std::size_t>(r) + 1];
    }
    for (int r = 0; r < rows; ++r) m.offsets_[r + 1] += m.offsets_[r];
    return m;
}

SparseMatrix SparseMatrix::identity(int n) {
    std::vector<double> d(static_cast<std::size_t>(n), 1.0);
    return diagonal(d);
}

SparseMatrix SparseMatrix::diagonal(std::span<const double> d) {
    const int n = static_cast<int>(d.size());
    SparseMatrix m(n, n);
    m.cols_idx_.resize(d.size());
    m.values_.assign(d.begin(), d.end());
    for (int i = 0; i < n; ++i) {
        m.cols_idx_[i] = i;
        m.offsets_[i + 1] = i + 1;
    }
    return m;
}

double SparseMatrix::coeff(int row, int col) const {
    const auto first = cols_idx_.begin() + offsets_[row];
    const auto last = cols_idx_.begin() + offsets_[row + 1];
    const auto it = std::lower_bound(first, last, col);
    if (it == last || *it != col) return 0.0;
    return values_[static_cast<std::size_t>(it - cols_idx_.begin())];
}

Vector SparseMatrix::multiply(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != cols_) throw InvalidArgument("SparseMatrix::multiply: size mismatch");
    Vector y(static_cast<std::size_t>(rows_), 0.0);
    for (int r = 0; r < rows_; ++r) {
        double s = 0.0;
        for (int k = offsets_[r]; k < offsets_[r + 1]; ++k) s += values_[k] * x[cols_idx_[k]];
        y[r] = s;
    }
    return y;
}

Vector SparseMatrix::multiply_transpose(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != rows_)
        throw InvalidArgument("SparseMatrix::multiply_transpose: size mismatch");
    Vector y(static_cast<std::size_t>(cols_), 0.0);
    for (int r = 0; r < rows_; ++r) {
        const double xr = x[r];
        if (xr == 0.0) continue;
        for (int k = offsets_[r]; k < offsets_[r + 1]; ++k) y[cols_idx_[k]] += values_[k] * xr;
    }
    return y;
}

std::vector<Triplet> SparseMatrix::triplets() const {
    std::vector<Triplet> t;
    t.reserve(values_.size());
    for (int r = 0; r < rows_; ++r)
        for (int k = offsets_[r]; k < offsets_[r + 1]; ++k) t.push_back({r, cols_idx_[k], values_[k]});
    return t;
}

SparseMatrix SparseMatrix::transpose() const {
    auto t = triplets();
    for (auto& e : t) std::swap(e.row, e.col);
    return from_triplets(cols_, rows_, std::move(t));
}

SparseMatrix SparseMatrix::operator*(const SparseMatrix& other) const {
    if (cols_ != other.rows_) throw InvalidArgument("SparseMatrix product: shape mismatch");
    std::vector<Triplet> t;
    std::vector<double> acc(static_cast<std::size_t>(other.cols_), 0.0);
    std::vector<int> marker(static_cast<std::size_t>(other.cols_), -1);
    std::vector<int> touched;
    for (int r = 0; r < rows_; ++r) {
        touched.clear();
        for (int k = offsets_[r]; k < offsets_[r + 1]; ++k) {
            const int mid = cols_idx_[k];
            const double v = values_[k];
            for (int q = other.offsets_[mid]; q < other.offsets_[mid + 1]; ++q) {
                const int c = other.cols_idx_[q];
                if (marker[c] != r) {
                    marker[c] = r;
                    acc[c] = 0.0;
                    touched.push_back(c);
                }
                acc[c] += v * other.values_[q];
            }
        }
        for (int c : touched) t.push_back({r, c, acc[c]});
    }
    return from_triplets(rows_, other.cols_, std::move(t));
}

SparseMatrix SparseMatrix::scaled(double s) const {
    SparseMatrix m = *this;
    for (auto& v : m.values_) v *= s;
    return m;
}

Vector SparseMatrix::diagonal_entries() const {
    const int n = std::min(rows_, cols_);
    Vector d(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) d[i] = coeff(i, i);
    return d;
}

SparseMatrix SparseMatrix::submatrix(std::span<const int> keep_rows, std::span<const int> keep_cols) const {
    std::vector<int> col_map(static_cast<std::size_t>(cols_), -1);
    for (std::size_t j = 0; j < keep_cols.size(); ++j) col_map[keep_cols[j]] = static_cast<int>(j);
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < keep_rows.size(); ++i) {
        const int r = keep_rows[i];
        for (int k = offsets_[r]; k < offsets_[r + 1]; ++k) {
            const int c = col_map[cols_idx_[k]];
            if (c >= 0) t.push_back({static_cast<int>(i), c, values_[k]});
        }
    }
    return from_triplets(static_cast<int>(keep_rows.size()), static_cast<int>(keep_cols.size()),
                         std::move(t));
}

double SparseMatrix::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

std::vector<std::vector<double>> SparseMatrix::to_dense() const {
    std::vector<std::vector<double>> d(static_cast<std::size_t>(rows_),
                                       std::vector<double>(static_cast<std::size_t>(cols_), 0.0));
    for (int r = 0; r < rows_; ++r)
        for (int k = offsets_[r]; k < offsets_[r + 1]; ++k) d[r][cols_idx_[k]] += values_[k];
    return d;
}

SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, double alpha, double beta) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw InvalidArgument("add: shape mismatch");
    auto t = a.triplets();
    for (auto& e : t) e.value *= alpha;
    for (auto e : b.triplets()) {
        e.value *= beta;
        t.push_back(e);
    }
    return SparseMatrix::from_triplets(a.rows(), a.cols(), std::move(t));
}

double max_abs_difference(const SparseMatrix& a, const SparseMatrix& b) {
    return add(a, b, 1.0, -1.0).max_abs();
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double norm_inf(std::span<const double> a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

namespace {

void check_sampled_symmetry(const SparseMatrix& a) {
    const double scale = std::max(a.max_abs(), 1e-300);
    const auto offsets = a.row_offsets();
    const auto cols = a.col_indices();
    const auto vals = a.values();
    const std::size_t nnz = vals.size();
    const std::size_t stride = std::max<std::size_t>(1, nnz / 256);
    int row = 0;
    for (std::size_t k = 0; k < nnz; k += stride) {
        while (offsets[row + 1] <= static_cast<int>(k)) ++row;
        if (std::abs(vals[k] - a.coeff(cols[k], row)) > 1e-12 * scale)
            throw InvalidArgument("solve_spd: matrix is not symmetric");
    }
}

} // namespace

Vector solve_spd(const SparseMatrix& a, std::span<const double> b, double tol, int max_iter,
                 SolveStats* stats, std::span<const double> x0) {
    const int n = a.rows();
    if (a.cols() != n || static_cast<int>(b.size()) != n) throw InvalidArgument("solve_spd: shape mismatch");
    for (double v : b)
        if (!std::isfinite(v)) throw InvalidArgument("solve_spd: non-finite right-hand side");
    check_sampled_symmetry(a);

    Vector inv_diag = a.diagonal_entries();
    for (auto& d : inv_diag) {
        if (!(d > 0.0)) throw SolverError("solve_spd: non-positive diagonal entry");
        d = 1.0 / d;
    }

    Vector x(static_cast<std::size_t>(n), 0.0);
    if (!x0.empty()) x.assign(x0.begin(), x0.end());
    Vector r(b.begin(), b.end());
    if (!x0.empty()) axpy(-1.0, a.multiply(x), r);

    const double bnorm = norm2(b);
    SolveStats local;
    if (bnorm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        if (stats) *stats = local;
        return x;
    }

    Vector z(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    Vector p = z;
    double rz = dot(r, z);
    double rel = norm2(r) / bnorm;
    local.residual_history.push_back(rel);
    int it = 0;
    while (rel > tol) {
        if (it >= max_iter) {
            throw SolverError("solve_spd: no convergence after " + std::to_string(max_iter) +
                                  " iterations (relative residual " + std::to_string(rel) + ")",
                              local.residual_history);
        }
        const Vector ap = a.multiply(p);
        const double pap = dot(p, ap);
        if (!(pap > 0.0)) throw SolverError("solve_spd: matrix is not positive definite", local.residual_history);
        const double alpha = rz / pap;
        axpy(alpha, p, x);
        axpy(-alpha, ap, r);
        for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
        ++it;
        rel = norm2(r) / bnorm;
        local.residual_history.push_back(rel);
    }
    local.iterations = it;
    local.relative_residual = rel;
    if (stats) *stats = std::move(local);
    return x;
}

struct SparseLU::Impl {
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    int n{0};
    bool ok{false};
};

SparseLU::SparseLU() : impl_(std::make_unique<Impl>()) {}
SparseLU::SparseLU(const SparseMatrix& a) : SparseLU() { factorize(a); }
SparseLU::~SparseLU() = default;
SparseLU::SparseLU(SparseLU&&) noexcept = default;
SparseLU& SparseLU::operator=(SparseLU&&) noexcept = default;

namespace {

int parse_trailing_index(const std::string& msg) {
    const auto pos = msg.find_last_of("0123456789");
    if (pos == std::string::npos) return -1;
    auto start = pos;
    while (start > 0 && std::isdigit(static_cast<unsigned char>(msg[start - 1]))) --start;
    return std::stoi(msg.substr(start, pos - start + 1));
}

} // namespace

void SparseLU::factorize(const SparseMatrix& a) {
    if (a.rows() != a.cols()) throw InvalidArgument("SparseLU: matrix must be square");
    const int n = a.rows();
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(a.nonzeros());
    for (const auto& e : a.triplets()) t.emplace_back(e.row, e.col, e.value);
    Eigen::SparseMatrix<double> m(n, n);
    m.setFromTriplets(t.begin(), t.end());
    m.makeCompressed();
    impl_->n = n;
    impl_->ok = false;
    impl_->lu.analyzePattern(m);
    impl_->lu.factorize(m);
    if (impl_->lu.info() != Eigen::Success) {
        const std::string msg = impl_->lu.lastErrorMessage();
        throw SingularMatrixError("SparseLU: singular matrix (" + msg + ")", parse_trailing_index(msg));
    }
    impl_->ok = true;
}

bool SparseLU::factorized() const { return impl_ && impl_->ok; }

Vector SparseLU::solve(std::span<const double> b) const {
    if (!factorized()) throw SolverError("SparseLU::solve called before a successful factorize");
    if (static_cast<int>(b.size()) != impl_->n) throw InvalidArgument("SparseLU::solve: size mismatch");
    Eigen::Map<const Eigen::VectorXd> rhs(b.data(), impl_->n);
    Eigen::VectorXd x = impl_->lu.solve(rhs);
    return Vector(x.data(), x.data() + x.size());
}

Vector solve_general(const SparseMatrix& a, std::span<const double> b, double tol, SolveStats* stats) {
    SparseLU lu(a);
    Vector x = lu.solve(b);
    Vector r(b.begin(), b.end());
    axpy(-1.0, a.multiply(x), r);
    const double bnorm = norm2(b);
    const double rel = bnorm > 0.0 ? norm2(r) / bnorm : norm2(r);
    for (double v : x)
        if (!std::isfinite(v)) throw SingularMatrixError("solve_general: non-finite solution", -1);
    if (rel > tol)
        throw SolverError("solve_general: relative residual " + std::to_string(rel) + " exceeds tolerance",
                          {rel});
    if (stats) {
        stats->iterations = 1;
        stats->relative_residual = rel;
        stats->residual_history = {rel};
    }
    return x;
}

void write_matrix_market(std::ostream& os, const SparseMatrix& a, bool symmetric) {
    os << "%%MatrixMarket matrix coordinate real " << (symmetric ? "symmetric" : "general") << '\n';
    std::vector<Triplet> t = a.triplets();
    if (symmetric) std::erase_if(t, [](const Triplet& e) { return e.col > e.row; });
    os << a.rows() << ' ' << a.cols() << ' ' << t.size() << '\n';
    os << std::setprecision(17);
    for (const auto& e : t) os << e.row + 1 << ' ' << e.col + 1 << ' ' << e.value << '\n';
}

void write_matrix_market(const std::string& path, const SparseMatrix& a, bool symmetric) {
    std::ofstream os(path);
    if (!os) throw InvalidArgument("cannot open " + path + " for writing");
    write_matrix_market(os, a, symmetric);
}

SparseMatrix read_matrix_market(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("%%MatrixMarket", 0) != 0)
        throw InvalidArgument("read_matrix_market: missing banner");
    std::istringstream banner(line);
    std::string tag, object, format, field, symmetry;
    banner >> tag >> object >> format >> field >> symmetry;
    if (object != "matrix" || format != "coordinate" || (field != "real" && field != "integer"))
        throw InvalidArgument("read_matrix_market: only real coordinate matrices are supported");
    const bool symmetric = symmetry == "symmetric";
    if (!symmetric && symmetry != "general")
        throw InvalidArgument("read_matrix_market: unsupported symmetry '" + symmetry + "'");
    while (std::getline(is, line))
        if (!line.empty() && line[0] != '%') break;
    std::istringstream header(line);
    int rows = 0, cols = 0;
    std::size_t nnz = 0;
    if (!(header >> rows >> cols >> nnz)) throw InvalidArgument("read_matrix_market: bad size line");
    std::vector<Triplet> t;
    t.reserve(symmetric ? 2 * nnz : nnz);
    for (std::size_t k = 0; k < nnz; ++k) {
        int r = 0, c = 0;
        double v = 0.0;
        if (!(is >> r >> c >> v)) throw InvalidArgument("read_matrix_market: truncated entries");
        t.push_back({r - 1, c - 1, v});
        if (symmetric && r != c) t.push_back({c - 1, r - 1, v});
    }
    return SparseMatrix::from_triplets(rows, cols, std::move(t));
}

SparseMatrix read_matrix_market(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw InvalidArgument("cannot open " + path);
    return read_matrix_market(is);
}

} // namespace lieforms
