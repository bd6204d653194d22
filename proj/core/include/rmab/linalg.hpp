#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace rmab {

using Vector = std::vector<double>;

// Row-major dense matrix. Sizes here are tiny (K <= 10), so no expression templates.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

    static Matrix identity(std::size_t n);
    static Matrix from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }

    std::vector<std::vector<double>> to_rows() const;

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

class SingularMatrixError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

double dot(std::span<const double> a, std::span<const double> b);

// v * M for a row vector v.
Vector row_times(std::span<const double> v, const Matrix& m);
// M * v for a column vector v.
Vector times_column(const Matrix& m, std::span<const double> v);

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& m);

Matrix matrix_power(const Matrix& m, std::uint64_t k);
double norm_inf(const Matrix& m);

// LU with partial pivoting. Throws SingularMatrixError when a pivot falls
// below the tolerance.
class LuFactorization {
public:
    explicit LuFactorization(Matrix a, double pivot_tolerance = 1e-13);

    Vector solve(std::span<const double> b) const;
    Matrix inverse() const;
    std::size_t size() const noexcept { return lu_.rows(); }

private:
    Matrix lu_;
    std::vector<std::size_t> perm_;
};

// Rank via Gaussian elimination with complete pivoting.
std::size_t numerical_rank(Matrix a, double pivot_tolerance);

}  // namespace rmab
