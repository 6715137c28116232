#pragma once

#include <cstddef>

#include "carbonfund/linalg.hpp"
#include "carbonfund/market.hpp"

namespace carbonfund {

// Investor preferences: relative risk aversion delta and per-asset carbon
// penalty slopes alpha_i (constant in time; the hook for time dependence is
// the t argument threaded through the evaluation calls).
struct StrategySpec {
    double delta = 1.0;
    Vec alpha;

    // alpha_i at time t (constant schedules).
    double alpha_at(std::size_t i, double /*t*/) const { return alpha[i]; }
};

// Penalty per asset: eps_i = alpha_i(t) * c_i, active only while c_i > 0, so
// net-negative emitters are not rewarded.
Vec carbon_aversion(double t, const Vec& carbon, const StrategySpec& spec);

// Reusable workspace for the optimal-weight solve. The weights satisfy
//   (delta Cov + diag(eps_i sigma_i^2)) pi = mu - r,
// a symmetric positive definite system solved by Cholesky. One instance per
// thread; solve() reuses the internal factor storage across calls.
class WeightSolver {
  public:
    WeightSolver(const Market& m, const StrategySpec& spec);

    // Optimal weights at (t, c). The returned reference stays valid until the
    // next call on this instance.
    const Vec& solve(double t, const Vec& carbon);

    // pi' Cov pi, the instantaneous variance rate of the risky allocation.
    double variance_rate(const Vec& pi) const { return quad_form(pi, m_->cov, pi); }

    // pi' (mu - r), the instantaneous excess drift rate.
    double drift_rate(const Vec& pi) const { return dot(pi, m_->excess); }

    const Market& market() const { return *m_; }
    const StrategySpec& spec() const { return *spec_; }

  private:
    const Market* m_;
    const StrategySpec* spec_;
    Mat a_;   // penalized system matrix, overwritten by its Cholesky factor
    Vec pi_;
};

// Convenience one-shot evaluation of the optimal weights.
Vec optimal_weights(double t, const Vec& carbon, const Market& m, const StrategySpec& spec);

// Penalty-free solution (1/delta) (Sigma Sigma')^{-1} (mu - r).
Vec merton_weights(const Market& m, double delta);

// Weight of the bank account: 1 - sum_i pi_i.
double cash_weight(const Vec& pi);

// Portfolio carbon intensity index: sum_i |pi_i| c_i.
double portfolio_carbon_index(const Vec& pi, const Vec& carbon);

} // namespace carbonfund
