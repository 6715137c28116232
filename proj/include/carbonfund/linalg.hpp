#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "carbonfund/errors.hpp"

namespace carbonfund {

using Vec = std::vector<double>;

// Small dense square matrix, row-major. Dimensions here are the number of
// assets (or chain states), so no blocking or pivoting is needed.
struct Mat {
    std::size_t n = 0;
    std::vector<double> a;

    Mat() = default;
    explicit Mat(std::size_t n_) : n(n_), a(n_ * n_, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

inline double dot(const Vec& x, const Vec& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

inline Vec matvec(const Mat& m, const Vec& x) {
    Vec y(m.n, 0.0);
    for (std::size_t i = 0; i < m.n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < m.n; ++j) s += m(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

// x' M y for square M.
inline double quad_form(const Vec& x, const Mat& m, const Vec& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < m.n; ++j) row += m(i, j) * y[j];
        s += x[i] * row;
    }
    return s;
}

// Lower Cholesky factor of a symmetric positive definite matrix.
inline Mat cholesky(const Mat& m) {
    Mat l(m.n);
    for (std::size_t i = 0; i < m.n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = m(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            if (i == j) {
                if (s <= 0.0) throw NumericalError("cholesky: matrix is not positive definite");
                l(i, i) = std::sqrt(s);
            } else {
                l(i, j) = s / l(j, j);
            }
        }
    }
    return l;
}

// Solve L y = b with L lower triangular (forward substitution).
inline Vec solve_lower(const Mat& l, const Vec& b) {
    Vec y(b);
    for (std::size_t i = 0; i < l.n; ++i) {
        double s = y[i];
        for (std::size_t j = 0; j < i; ++j) s -= l(i, j) * y[j];
        y[i] = s / l(i, i);
    }
    return y;
}

// Solve L' x = y with L lower triangular (back substitution on the transpose).
inline Vec solve_lower_transpose(const Mat& l, const Vec& y) {
    Vec x(y);
    for (std::size_t ii = l.n; ii-- > 0;) {
        double s = x[ii];
        for (std::size_t j = ii + 1; j < l.n; ++j) s -= l(j, ii) * x[j];
        x[ii] = s / l(ii, ii);
    }
    return x;
}

// Solve A x = b for symmetric positive definite A via its Cholesky factor.
inline Vec spd_solve(const Mat& a, const Vec& b) {
    Mat l = cholesky(a);
    return solve_lower_transpose(l, solve_lower(l, b));
}

} // namespace carbonfund
