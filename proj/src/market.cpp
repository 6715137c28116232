#include "carbonfund/market.hpp"

#include <cmath>
#include <string>

#include "carbonfund/errors.hpp"

namespace carbonfund {

Market make_market(Vec mu, Vec sigma, Mat rho, double r) {
    Market m;
    m.d = mu.size();
    if (m.d == 0) throw ConfigError("market: at least one asset required");
    if (sigma.size() != m.d || rho.n != m.d)
        throw ConfigError("market: mu, sigma and rho dimensions disagree");
    if (r < 0.0) throw ConfigError("market: negative risk-free rate");
    for (std::size_t i = 0; i < m.d; ++i) {
        if (!(sigma[i] > 0.0))
            throw ConfigError("market: volatility of asset " + std::to_string(i + 1) +
                              " must be positive");
        if (std::abs(rho(i, i) - 1.0) > 1e-12)
            throw ConfigError("market: correlation diagonal must be 1");
        for (std::size_t j = 0; j < i; ++j) {
            if (std::abs(rho(i, j) - rho(j, i)) > 1e-12)
                throw ConfigError("market: correlation matrix must be symmetric");
            if (std::abs(rho(i, j)) > 1.0)
                throw ConfigError("market: correlation entries must lie in [-1, 1]");
        }
    }
    try {
        m.chol_rho = cholesky(rho);
    } catch (const NumericalError&) {
        throw ConfigError("market: correlation matrix is not positive definite");
    }
    // Reject near-singular correlation rather than propagate it silently.
    for (std::size_t i = 0; i < m.d; ++i)
        if (m.chol_rho(i, i) < 1e-6)
            throw ConfigError("market: correlation matrix is numerically singular");

    m.sigma_mat = Mat(m.d);
    for (std::size_t i = 0; i < m.d; ++i)
        for (std::size_t j = 0; j <= i; ++j) m.sigma_mat(i, j) = sigma[i] * m.chol_rho(i, j);

    m.cov = Mat(m.d);
    for (std::size_t i = 0; i < m.d; ++i)
        for (std::size_t j = 0; j < m.d; ++j) m.cov(i, j) = sigma[i] * sigma[j] * rho(i, j);

    m.excess.resize(m.d);
    for (std::size_t i = 0; i < m.d; ++i) m.excess[i] = mu[i] - r;

    // Sigma is lower triangular, so the price of risk comes from one forward
    // substitution.
    m.theta = solve_lower(m.sigma_mat, m.excess);

    m.mu = std::move(mu);
    m.sigma = std::move(sigma);
    m.rho = std::move(rho);
    m.r = r;
    return m;
}

} // namespace carbonfund
