#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rescost {

/// Operand shapes do not conform.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// An iterative scheme exhausted its iteration budget.
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Network width is too small to host the requested map.
struct WidthError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A tracked singular value vanished where a ratio is required.
struct DegenerateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Evaluation point sits on a ReLU activation boundary.
struct BoundaryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Layer budget cannot accommodate the requested construction.
struct BudgetError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Dense real matrix, row-major storage.
class Matrix {
public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
        : rows_(rows), cols_(cols), data_(std::move(entries)) {
        if (data_.size() != rows_ * cols_) {
            throw DimensionError("Matrix: entry count does not match rows*cols");
        }
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            m(i, i) = 1.0;
        }
        return m;
    }

    /// Square diagonal matrix from the given values.
    static Matrix diagonal(std::span<const double> values) {
        Matrix m(values.size(), values.size());
        for (std::size_t i = 0; i < values.size(); ++i) {
            m(i, i) = values[i];
        }
        return m;
    }

    /// Rectangular matrix with `values` on the main diagonal, zero elsewhere.
    static Matrix diagonal(std::size_t rows, std::size_t cols, std::span<const double> values) {
        Matrix m(rows, cols);
        const std::size_t k = std::min(std::min(rows, cols), values.size());
        for (std::size_t i = 0; i < k; ++i) {
            m(i, i) = values[i];
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

    std::span<const double> entries() const { return data_; }
    std::span<double> entries() { return data_; }

    bool same_shape(const Matrix& other) const { return rows_ == other.rows_ && cols_ == other.cols_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline bool all_finite(const Matrix& m) {
    for (double v : m.entries()) {
        if (!std::isfinite(v)) {
            return false;
        }
    }
    return true;
}

inline void require_finite(const Matrix& m, const char* what) {
    if (!all_finite(m)) {
        throw std::invalid_argument(std::string(what) + ": non-finite entries");
    }
}

inline Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw DimensionError("matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                             " times " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    }
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) {
                continue;
            }
            for (std::size_t j = 0; j < b.cols(); ++j) {
                c(i, j) += aik * b(k, j);
            }
        }
    }
    return c;
}

inline Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            t(j, i) = a(i, j);
        }
    }
    return t;
}

inline Matrix operator+(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) {
        throw DimensionError("operator+: shape mismatch");
    }
    Matrix c = a;
    for (std::size_t i = 0; i < c.size(); ++i) {
        c.entries()[i] += b.entries()[i];
    }
    return c;
}

inline Matrix operator-(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) {
        throw DimensionError("operator-: shape mismatch");
    }
    Matrix c = a;
    for (std::size_t i = 0; i < c.size(); ++i) {
        c.entries()[i] -= b.entries()[i];
    }
    return c;
}

inline Matrix operator*(double s, const Matrix& a) {
    Matrix c = a;
    for (double& v : c.entries()) {
        v *= s;
    }
    return c;
}

/// Sum of squared entries; equals the sum of squared singular values.
inline double frobenius_sq(const Matrix& a) {
    double s = 0.0;
    for (double v : a.entries()) {
        s += v * v;
    }
    return s;
}

inline double frobenius_norm(const Matrix& a) { return std::sqrt(frobenius_sq(a)); }

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) {
        throw DimensionError("max_abs_diff: shape mismatch");
    }
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(a.entries()[i] - b.entries()[i]));
    }
    return m;
}

inline std::vector<double> matvec(const Matrix& a, std::span<const double> x) {
    if (a.cols() != x.size()) {
        throw DimensionError("matvec: shape mismatch");
    }
    std::vector<double> y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) {
            s += a(i, j) * x[j];
        }
        y[i] = s;
    }
    return y;
}

}  // namespace rescost
