#include "carbonfund/strategy.hpp"

#include <cmath>

#include "carbonfund/errors.hpp"

namespace carbonfund {

Vec carbon_aversion(double t, const Vec& carbon, const StrategySpec& spec) {
    Vec eps(carbon.size(), 0.0);
    for (std::size_t i = 0; i < carbon.size(); ++i)
        if (carbon[i] > 0.0) eps[i] = spec.alpha_at(i, t) * carbon[i];
    return eps;
}

WeightSolver::WeightSolver(const Market& m, const StrategySpec& spec)
    : m_(&m), spec_(&spec), a_(m.d), pi_(m.d, 0.0) {
    if (!(spec.delta > 0.0)) throw ConfigError("strategy: risk aversion must be positive");
    if (spec.alpha.size() != m.d)
        throw ConfigError("strategy: one penalty slope per asset required");
    for (double a : spec.alpha)
        if (a < 0.0) throw ConfigError("strategy: penalty slopes must be nonnegative");
}

const Vec& WeightSolver::solve(double t, const Vec& carbon) {
    const std::size_t d = m_->d;
    // Build delta Cov + diag(eps_i sigma_i^2) in the lower triangle and factor
    // it in place.
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j <= i; ++j) a_(i, j) = spec_->delta * m_->cov(i, j);
        if (carbon[i] > 0.0)
            a_(i, i) += spec_->alpha_at(i, t) * carbon[i] * m_->sigma[i] * m_->sigma[i];
    }
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = a_(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= a_(i, k) * a_(j, k);
            if (i == j) {
                if (s <= 0.0) throw NumericalError("weights: penalized matrix lost definiteness");
                a_(i, i) = std::sqrt(s);
            } else {
                a_(i, j) = s / a_(j, j);
            }
        }
    }
    // Forward then backward substitution on the factored matrix.
    for (std::size_t i = 0; i < d; ++i) {
        double s = m_->excess[i];
        for (std::size_t j = 0; j < i; ++j) s -= a_(i, j) * pi_[j];
        pi_[i] = s / a_(i, i);
    }
    for (std::size_t ii = d; ii-- > 0;) {
        double s = pi_[ii];
        for (std::size_t j = ii + 1; j < d; ++j) s -= a_(j, ii) * pi_[j];
        pi_[ii] = s / a_(ii, ii);
    }
    return pi_;
}

Vec optimal_weights(double t, const Vec& carbon, const Market& m, const StrategySpec& spec) {
    WeightSolver solver(m, spec);
    return solver.solve(t, carbon);
}

Vec merton_weights(const Market& m, double delta) {
    Vec pi = spd_solve(m.cov, m.excess);
    for (double& x : pi) x /= delta;
    return pi;
}

double cash_weight(const Vec& pi) {
    double s = 1.0;
    for (double x : pi) s -= x;
    return s;
}

double portfolio_carbon_index(const Vec& pi, const Vec& carbon) {
    double s = 0.0;
    for (std::size_t i = 0; i < pi.size(); ++i) s += std::abs(pi[i]) * carbon[i];
    return s;
}

} // namespace carbonfund
