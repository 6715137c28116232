#pragma once

#include <cstdint>
#include <vector>

#include "carbonfund/carbon.hpp"
#include "carbonfund/rng.hpp"
#include "carbonfund/strategy.hpp"

namespace carbonfund {

// Uniform time grid with N steps of size h = T/N.
struct SimGrid {
    double T = 0.0;
    int N = 0;
    double h = 0.0;

    static SimGrid make(double T, int N);
    double node(int j) const { return h * j; }
};

// Default grid-density rule: five steps per year.
int default_step_count(double T);

enum class Measure { pricing, physical };

// Optimal weights sampled along one carbon path, with the running quadratic
// variation of the risky allocation. v[j] is the trapezoid of s over [0, jh];
// everything the fund schemes and the conditional closed forms need.
struct WeightPath {
    SimGrid grid;
    std::size_t d = 0;
    std::vector<double> pi;     // (N+1) x d
    std::vector<double> s;      // N+1 values of pi' Cov pi
    std::vector<double> v;      // N+1 ladder, v[0] = 0
    std::vector<double> drift;  // N+1 values of pi' (mu - r)

    const double* weights_at(int j) const { return pi.data() + static_cast<std::size_t>(j) * d; }
};

// Evaluate the optimal weights at every node of a simulated carbon grid and
// fill the variance-rate ladder.
WeightPath discretize_weights(const CarbonGrid& carbon, SimGrid grid, WeightSolver& solver);

// Conditional-lognormal fund scheme over the whole grid: each step grows at
// the risk-free rate and draws one Gaussian with variance (h/2)(s_j + s_{j+1})
// from a stream independent of the carbon path. Under the physical measure
// each step gains the extra drift (h/2)(pi_j + pi_{j+1})'(mu - r).
std::vector<double> simulate_fund_path(const WeightPath& w, double x0, double r,
                                       Measure measure, Philox& g);

// Terminal value in one lognormal draw from the full ladder v[N]; equal in
// law to the pathwise terminal value given the weights.
double simulate_fund_terminal(const WeightPath& w, double x0, double r, Philox& g);

} // namespace carbonfund
