#pragma once

#include <cstdint>
#include <vector>

#include "carbonfund/carbon.hpp"
#include "carbonfund/fund.hpp"
#include "carbonfund/market.hpp"
#include "carbonfund/strategy.hpp"

namespace carbonfund {

// Coefficients of the reduced value-factor equation. With pi the optimal
// weights at (t, c):
//   H = (1 - delta) [r + (1/2) (mu - r)' pi],  zero when delta = 1;
//   f = -[r + (1/2) (mu - r)' pi],             zero unless delta = 1.
struct HF {
    double H = 0.0;
    double f = 0.0;
};

HF h_and_f(double t, const Vec& carbon, WeightSolver& solver);

// Value factor of the chain regime model on a dense time grid:
//   d phi_k/dt + sum_l q_kl phi_l + H_k phi_k = f_k,  phi_k(T) = 1{delta != 1}.
// The sum runs over the whole generator row; the diagonal rate -q_k enters
// through it. Solved backward by classical RK4 on substeps of at most h_ode,
// with a step-halving accuracy check.
struct ChainValueSolution {
    SimGrid grid;
    std::size_t n_states = 0;
    std::vector<double> phi;  // (N+1) x K, phi[j*K + k] = phi_k(j h)

    double at(int j, std::size_t k) const {
        return phi[static_cast<std::size_t>(j) * n_states + k];
    }
};

ChainValueSolution solve_chain_value_odes(const ChainCarbon& chain, const Market& m,
                                          const StrategySpec& spec, SimGrid grid,
                                          double h_ode = 0.01, double halving_tol = 1e-8);

// Single backward RK4 sweep of the same system over [t0, T] with n equal
// steps; returns phi(t0) for all regimes. Exposed so convergence-order
// diagnostics can drive the step directly.
Vec rk4_chain_phi0(const ChainCarbon& chain, const Market& m, const StrategySpec& spec,
                   double t0, double T, int n_steps);

// Monte Carlo value factor from the probabilistic representation
//   phi(t0, c0) = E[ e^{I(T)} 1{delta != 1} - integral_t0^T e^{I(s)} f(s) ds ],
//   I(s) = integral_t0^s H du along the carbon path.
// Diffusion paths integrate by trapezoid on the grid; chain paths integrate
// exactly over the constant stretches between jumps.
struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

McEstimate feynman_kac_phi(const CarbonModel& model, double t0, const Market& m,
                           const StrategySpec& spec, SimGrid grid, std::size_t n_paths,
                           std::uint64_t seed, unsigned threads = 1);

// v(t, x, c) assembled from the factor: x^{1-delta}/(1-delta) phi for
// delta != 1, log x + phi for delta = 1.
double value_function_eval(double delta, double x, double phi);

} // namespace carbonfund
