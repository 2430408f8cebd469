#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "jackson/errors.hpp"

namespace jackson {

/// Dense row-major matrix. Sized for networks of at most a few dozen queues;
/// anything large enough to want sparse storage is out of scope.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<const double> row(std::size_t i) const {
        return {data_.data() + i * cols_, cols_};
    }

    Matrix transposed() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    Matrix operator*(const Matrix& rhs) const {
        Matrix out(rows_, rhs.cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                const double a = (*this)(i, k);
                if (a == 0.0) continue;
                for (std::size_t j = 0; j < rhs.cols_; ++j) out(i, j) += a * rhs(k, j);
            }
        return out;
    }

    std::vector<double> operator*(std::span<const double> v) const {
        std::vector<double> out(rows_, 0.0);
        for (std::size_t i = 0; i < rows_; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < cols_; ++j) acc += (*this)(i, j) * v[j];
            out[i] = acc;
        }
        return out;
    }

    Matrix operator-(const Matrix& rhs) const {
        Matrix out(rows_, cols_);
        for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] = data_[i] - rhs.data_[i];
        return out;
    }

    Matrix operator+(const Matrix& rhs) const {
        Matrix out(rows_, cols_);
        for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] = data_[i] + rhs.data_[i];
        return out;
    }

    bool operator==(const Matrix& rhs) const = default;

    double max_abs() const {
        double m = 0.0;
        for (double v : data_) m = std::max(m, std::abs(v));
        return m;
    }

    double row_sum(std::size_t i) const {
        double s = 0.0;
        for (std::size_t j = 0; j < cols_; ++j) s += (*this)(i, j);
        return s;
    }

    double min_value() const {
        double m = data_.empty() ? 0.0 : data_.front();
        for (double v : data_) m = std::min(m, v);
        return m;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    return (a - b).max_abs();
}

/// Block extraction by explicit index lists (rows and cols need not be contiguous).
inline Matrix submatrix(const Matrix& a, std::span<const std::size_t> rows,
                        std::span<const std::size_t> cols) {
    Matrix out(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = a(rows[i], cols[j]);
    return out;
}

/// LU factorization with partial pivoting. A pivot whose magnitude falls
/// below `pivot_tol` raises SingularSystem; for I - R' that threshold
/// separates a genuinely closed recurrent class from conditioning noise.
class LuSolver {
public:
    explicit LuSolver(Matrix a, double pivot_tol = 1e-12)
        : lu_(std::move(a)), perm_(lu_.rows()) {
        const std::size_t n = lu_.rows();
        for (std::size_t i = 0; i < n; ++i) perm_[i] = i;
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t p = k;
            for (std::size_t i = k + 1; i < n; ++i)
                if (std::abs(lu_(i, k)) > std::abs(lu_(p, k))) p = i;
            if (std::abs(lu_(p, k)) < pivot_tol) throw SingularSystem(k, std::abs(lu_(p, k)));
            if (p != k) {
                std::swap(perm_[p], perm_[k]);
                for (std::size_t j = 0; j < n; ++j) std::swap(lu_(p, j), lu_(k, j));
            }
            const double pivot = lu_(k, k);
            for (std::size_t i = k + 1; i < n; ++i) {
                const double factor = lu_(i, k) / pivot;
                lu_(i, k) = factor;
                if (factor == 0.0) continue;
                for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= factor * lu_(k, j);
            }
        }
    }

    std::size_t size() const { return lu_.rows(); }

    std::vector<double> solve(std::span<const double> b) const {
        const std::size_t n = size();
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = b[perm_[i]];
        for (std::size_t i = 1; i < n; ++i) {
            double acc = x[i];
            for (std::size_t j = 0; j < i; ++j) acc -= lu_(i, j) * x[j];
            x[i] = acc;
        }
        for (std::size_t ii = n; ii-- > 0;) {
            double acc = x[ii];
            for (std::size_t j = ii + 1; j < n; ++j) acc -= lu_(ii, j) * x[j];
            x[ii] = acc / lu_(ii, ii);
        }
        return x;
    }

    /// Column-by-column solve of A X = B.
    Matrix solve(const Matrix& b) const {
        const std::size_t n = size();
        Matrix x(n, b.cols());
        std::vector<double> col(n);
        for (std::size_t j = 0; j < b.cols(); ++j) {
            for (std::size_t i = 0; i < n; ++i) col[i] = b(i, j);
            const std::vector<double> sol = solve(col);
            for (std::size_t i = 0; i < n; ++i) x(i, j) = sol[i];
        }
        return x;
    }

    Matrix inverse() const { return solve(Matrix::identity(size())); }

private:
    Matrix lu_;
    std::vector<std::size_t> perm_;
};

}  // namespace jackson
