#include "rmab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

namespace rmab {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.front().size();
    Matrix m(r, c);
    for (std::size_t i = 0; i < r; ++i) {
        if (rows[i].size() != c) {
            throw std::invalid_argument("ragged matrix: row " + std::to_string(i) + " has " +
                                        std::to_string(rows[i].size()) + " entries, expected " +
                                        std::to_string(c));
        }
        std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
    }
    return m;
}

std::vector<std::vector<double>> Matrix::to_rows() const {
    std::vector<std::vector<double>> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out[i].assign(row(i).begin(), row(i).end());
    return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

Vector row_times(std::span<const double> v, const Matrix& m) {
    if (v.size() != m.rows()) throw std::invalid_argument("row_times: size mismatch");
    Vector out(m.cols(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const double vi = v[i];
        if (vi == 0.0) continue;
        const auto r = m.row(i);
        for (std::size_t j = 0; j < m.cols(); ++j) out[j] += vi * r[j];
    }
    return out;
}

Vector times_column(const Matrix& m, std::span<const double> v) {
    if (v.size() != m.cols()) throw std::invalid_argument("times_column: size mismatch");
    Vector out(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) out[i] = dot(m.row(i), v);
    return out;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matrix product: size mismatch");
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
        }
    }
    return out;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument("matrix difference: size mismatch");
    }
    Matrix out = a;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) -= b(i, j);
    return out;
}

Matrix operator*(double s, const Matrix& m) {
    Matrix out = m;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) *= s;
    return out;
}

Matrix matrix_power(const Matrix& m, std::uint64_t k) {
    if (!m.square()) throw std::invalid_argument("matrix_power: matrix is not square");
    Matrix result = Matrix::identity(m.rows());
    Matrix base = m;
    while (k > 0) {
        if (k & 1u) result = result * base;
        k >>= 1u;
        if (k > 0) base = base * base;
    }
    return result;
}

double norm_inf(const Matrix& m) {
    double best = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double s = 0.0;
        for (double x : m.row(i)) s += std::abs(x);
        best = std::max(best, s);
    }
    return best;
}

LuFactorization::LuFactorization(Matrix a, double pivot_tolerance) : lu_(std::move(a)) {
    if (!lu_.square()) throw std::invalid_argument("LU: matrix is not square");
    const std::size_t n = lu_.rows();
    perm_.resize(n);
    std::iota(perm_.begin(), perm_.end(), std::size_t{0});
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t i = col + 1; i < n; ++i) {
            if (std::abs(lu_(i, col)) > std::abs(lu_(pivot, col))) pivot = i;
        }
        if (std::abs(lu_(pivot, col)) < pivot_tolerance) {
            throw SingularMatrixError("LU: pivot " + std::to_string(lu_(pivot, col)) + " in column " +
                                      std::to_string(col) + " below tolerance");
        }
        if (pivot != col) {
            std::swap_ranges(lu_.row(pivot).begin(), lu_.row(pivot).end(), lu_.row(col).begin());
            std::swap(perm_[pivot], perm_[col]);
        }
        const double diag = lu_(col, col);
        for (std::size_t i = col + 1; i < n; ++i) {
            const double factor = lu_(i, col) / diag;
            lu_(i, col) = factor;
            if (factor == 0.0) continue;
            for (std::size_t j = col + 1; j < n; ++j) lu_(i, j) -= factor * lu_(col, j);
        }
    }
}

Vector LuFactorization::solve(std::span<const double> b) const {
    const std::size_t n = lu_.rows();
    if (b.size() != n) throw std::invalid_argument("LU solve: size mismatch");
    Vector x(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[perm_[i]];
        for (std::size_t j = 0; j < i; ++j) s -= lu_(i, j) * x[j];
        x[i] = s;
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = x[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= lu_(i, j) * x[j];
        x[i] = s / lu_(i, i);
    }
    return x;
}

Matrix LuFactorization::inverse() const {
    const std::size_t n = lu_.rows();
    Matrix inv(n, n);
    Vector e(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        std::fill(e.begin(), e.end(), 0.0);
        e[j] = 1.0;
        const Vector col = solve(e);
        for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
    }
    return inv;
}

std::size_t numerical_rank(Matrix a, double pivot_tolerance) {
    const std::size_t rows = a.rows();
    const std::size_t cols = a.cols();
    std::size_t rank = 0;
    std::vector<bool> used_col(cols, false);
    std::vector<bool> used_row(rows, false);
    for (std::size_t step = 0; step < std::min(rows, cols); ++step) {
        double best = 0.0;
        std::size_t pr = 0;
        std::size_t pc = 0;
        for (std::size_t i = 0; i < rows; ++i) {
            if (used_row[i]) continue;
            for (std::size_t j = 0; j < cols; ++j) {
                if (used_col[j]) continue;
                if (std::abs(a(i, j)) > best) {
                    best = std::abs(a(i, j));
                    pr = i;
                    pc = j;
                }
            }
        }
        if (best < pivot_tolerance) break;
        ++rank;
        used_row[pr] = true;
        used_col[pc] = true;
        for (std::size_t i = 0; i < rows; ++i) {
            if (used_row[i]) continue;
            const double factor = a(i, pc) / a(pr, pc);
            for (std::size_t j = 0; j < cols; ++j) a(i, j) -= factor * a(pr, j);
        }
    }
    return rank;
}

}  // namespace rmab
