#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "carbonfund/linalg.hpp"
#include "carbonfund/rng.hpp"

namespace carbonfund {

// State of one simulated carbon trajectory. The continuous values live in c;
// chain models additionally track the discrete regime index.
struct CarbonState {
    Vec c;
    int regime = -1;
};

// Per-asset carbon-intensity dynamics. Instances are cheap value objects; the
// diffusion models cache per-step-size constants, so clone one instance per
// thread instead of sharing.
class CarbonModel {
  public:
    virtual ~CarbonModel() = default;
    virtual std::size_t dim() const = 0;
    virtual void init(CarbonState& s, Philox& g) const = 0;
    // Advance from t to t+h, consuming randomness from g.
    virtual void step(double t, double h, CarbonState& s, Philox& g) = 0;
    virtual std::unique_ptr<CarbonModel> clone() const = 0;
};

// Mean-reverting Gaussian dynamics dC = kappa (cbar - C) dt + lambda dW,
// advanced by the exact normal transition. Negative values are allowed and
// left unclamped; the penalty ignores them.
class OuCarbon final : public CarbonModel {
  public:
    OuCarbon(Vec c0, Vec cbar, Vec kappa, Vec lambda);
    std::size_t dim() const override { return c0_.size(); }
    void init(CarbonState& s, Philox&) const override;
    void step(double t, double h, CarbonState& s, Philox& g) override;
    std::unique_ptr<CarbonModel> clone() const override {
        return std::make_unique<OuCarbon>(*this);
    }

  private:
    Vec c0_, cbar_, kappa_, lambda_;
    double cached_h_ = -1.0;
    Vec decay_, sd_;
};

// Square-root dynamics dC = kappa (cbar - C) dt + lambda sqrt(C) dW, advanced
// by a weak-second-order splitting step that stays nonnegative. Requires
// lambda^2 <= 4 kappa cbar so the bracket under the square root cannot turn
// negative.
class SquareRootCarbon final : public CarbonModel {
  public:
    SquareRootCarbon(Vec c0, Vec cbar, Vec kappa, Vec lambda);
    std::size_t dim() const override { return c0_.size(); }
    void init(CarbonState& s, Philox&) const override;
    void step(double t, double h, CarbonState& s, Philox& g) override;
    std::unique_ptr<CarbonModel> clone() const override {
        return std::make_unique<SquareRootCarbon>(*this);
    }

  private:
    Vec c0_, cbar_, kappa_, lambda_;
    double cached_h_ = -1.0;
    Vec shift_, decay_;  // per-asset (kappa cbar - lambda^2/4) psi(h/2) and e^{-kappa h/2}
};

// Strictly positive dynamics: log C follows the exact mean-reverting Gaussian
// transition with log-scale level log_mean, then is exponentiated. Exact in
// law at the grid nodes.
class ExpOuCarbon final : public CarbonModel {
  public:
    ExpOuCarbon(Vec c0, Vec log_mean, Vec kappa, Vec lambda);
    std::size_t dim() const override { return c0_.size(); }
    void init(CarbonState& s, Philox&) const override;
    void step(double t, double h, CarbonState& s, Philox& g) override;
    std::unique_ptr<CarbonModel> clone() const override {
        return std::make_unique<ExpOuCarbon>(*this);
    }

  private:
    Vec c0_, log_mean_, kappa_, lambda_;
    double cached_h_ = -1.0;
    Vec decay_, sd_;
};

// Finite-state Markov regime process: the carbon vector jumps between K
// profiles a_1..a_K with generator Q (off-diagonal rates, zero row sums).
// Jumps are simulated by competing exponential clocks.
class ChainCarbon final : public CarbonModel {
  public:
    ChainCarbon(std::vector<Vec> states, Mat q, Vec initial_dist);
    std::size_t dim() const override { return states_[0].size(); }
    std::size_t n_states() const { return states_.size(); }
    const Vec& state_values(std::size_t k) const { return states_[k]; }
    const Mat& generator() const { return q_; }
    void init(CarbonState& s, Philox& g) const override;
    void step(double t, double h, CarbonState& s, Philox& g) override;
    std::unique_ptr<CarbonModel> clone() const override {
        return std::make_unique<ChainCarbon>(*this);
    }

    // Time spent in the current regime before the next jump, Exp(-q_kk);
    // infinity when the regime is absorbing.
    double sojourn_time(int k, Philox& g) const;
    // Destination regime of a jump out of k, chosen with probability
    // q_kl / (-q_kk).
    int jump_target(int k, Philox& g) const;

  private:
    std::vector<Vec> states_;
    Mat q_;
    Vec initial_dist_;
};

// One weak-second-order step of the square-root diffusion, exposed for
// direct testing: g is a standard normal draw.
double square_root_step(double c, double kappa, double cbar, double lambda, double h, double g);

// Conditional mean and variance of the square-root diffusion at horizon t.
struct Moments {
    double mean;
    double variance;
};
Moments square_root_moments(double c0, double cbar, double kappa, double lambda, double t);

// Conditional moments of the mean-reverting Gaussian model at horizon t.
Moments ou_moments(double c0, double cbar, double kappa, double lambda, double t);

// Simulated values at the N+1 nodes of a uniform grid, row j holding the
// d-vector at time j*h.
struct CarbonGrid {
    std::size_t d = 0;
    std::vector<double> values;  // (N+1) x d
    double* at(std::size_t j) { return values.data() + j * d; }
    const double* at(std::size_t j) const { return values.data() + j * d; }
};

CarbonGrid simulate_carbon_grid(CarbonModel& model, double T, int n_steps, Philox& g);

} // namespace carbonfund
