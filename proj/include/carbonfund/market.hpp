#pragma once

#include <cstddef>

#include "carbonfund/linalg.hpp"

namespace carbonfund {

// Frictionless market of d correlated geometric Brownian stocks and a bank
// account: dS = diag(S)(mu dt + Sigma dZ), bank account growth r.
// Sigma = diag(sigma) * L with L the lower Cholesky factor of rho, so
// Sigma Sigma' = diag(sigma) rho diag(sigma).
struct Market {
    Vec mu;     // drifts, 1/year
    Vec sigma;  // volatilities, 1/sqrt(year)
    Mat rho;    // correlation matrix
    double r;   // risk-free rate, 1/year

    // cached at validation
    std::size_t d = 0;
    Mat chol_rho;   // L
    Mat sigma_mat;  // diag(sigma) * L, lower triangular
    Mat cov;        // Sigma Sigma'
    Vec excess;     // mu - r
    Vec theta;      // market price of risk, Sigma theta = mu - r
};

// Validates shapes, positivity and the correlation structure, and fills the
// cached factors. Throws ConfigError on invalid input.
Market make_market(Vec mu, Vec sigma, Mat rho, double r);

} // namespace carbonfund
