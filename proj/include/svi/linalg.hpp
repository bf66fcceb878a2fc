#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "svi/errors.hpp"

namespace svi {

/// Dense vector of doubles. Problem sizes in this library are tiny
/// (stage systems of at most a few dozen unknowns), so plain
/// std::vector storage is used throughout.
using vec = std::vector<double>;

/// Dense row-major matrix.
class mat {
public:
    mat() = default;
    mat(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    const vec& data() const { return data_; }
    vec& data() { return data_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    vec data_;
};

inline double dot(const vec& a, const vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double inf_norm(const vec& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

/// Matrix infinity norm (maximum absolute row sum).
inline double inf_norm(const mat& a) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) row += std::abs(a(i, j));
        m = std::max(m, row);
    }
    return m;
}

inline vec operator+(vec a, const vec& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    return a;
}

inline vec operator-(vec a, const vec& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
    return a;
}

inline vec operator*(double s, vec a) {
    for (double& x : a) x *= s;
    return a;
}

/// Solves A x = b by LU factorization with partial pivoting. A and b are
/// overwritten; the solution is returned in b's storage. Throws
/// singular_jacobian when a pivot underflows.
inline vec lu_solve(mat a, vec b) {
    const std::size_t n = a.rows();
    std::vector<std::size_t> piv(n);
    for (std::size_t i = 0; i < n; ++i) piv[i] = i;

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t imax = k;
        double amax = std::abs(a(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(a(i, k)) > amax) {
                amax = std::abs(a(i, k));
                imax = i;
            }
        }
        if (!(amax >= std::numeric_limits<double>::min()))
            throw singular_jacobian("LU pivot underflow at column " + std::to_string(k));
        if (imax != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(imax, j));
            std::swap(b[k], b[imax]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a(i, k) / a(k, k);
            a(i, k) = f;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
            b[i] -= f * b[k];
        }
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= a(i, j) * b[j];
        b[i] = s / a(i, i);
    }
    return b;
}

}  // namespace svi
