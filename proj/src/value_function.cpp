#include "carbonfund/value_function.hpp"

#include <cmath>
#include <vector>

#include "carbonfund/errors.hpp"
#include "carbonfund/parallel.hpp"
#include "carbonfund/stats.hpp"

namespace carbonfund {

namespace {

// Per-regime coefficient tables for the chain system.
struct ChainCoeffs {
    std::size_t k = 0;
    Vec H, f;
    double terminal = 0.0;
};

ChainCoeffs chain_coeffs(const ChainCarbon& chain, const Market& m, const StrategySpec& spec) {
    ChainCoeffs cc;
    cc.k = chain.n_states();
    cc.H.resize(cc.k);
    cc.f.resize(cc.k);
    WeightSolver solver(m, spec);
    for (std::size_t k = 0; k < cc.k; ++k) {
        const HF hf = h_and_f(0.0, chain.state_values(k), solver);
        cc.H[k] = hf.H;
        cc.f[k] = hf.f;
    }
    cc.terminal = spec.delta == 1.0 ? 0.0 : 1.0;
    return cc;
}

// dphi/dt = f - (Q + diag(H)) phi. In time-to-go s the system reads
// dpsi/ds = (Q + diag(H)) psi - f, integrated forward from psi(0) = terminal.
void chain_rhs(const ChainCarbon& chain, const ChainCoeffs& cc, const Vec& psi, Vec& out) {
    const Mat& q = chain.generator();
    for (std::size_t k = 0; k < cc.k; ++k) {
        double s = cc.H[k] * psi[k] - cc.f[k];
        for (std::size_t l = 0; l < cc.k; ++l) s += q(k, l) * psi[l];
        out[k] = s;
    }
}

void rk4_step(const ChainCarbon& chain, const ChainCoeffs& cc, double hs, Vec& psi, Vec& k1,
              Vec& k2, Vec& k3, Vec& k4, Vec& tmp) {
    const std::size_t n = psi.size();
    chain_rhs(chain, cc, psi, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = psi[i] + hs / 2.0 * k1[i];
    chain_rhs(chain, cc, tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = psi[i] + hs / 2.0 * k2[i];
    chain_rhs(chain, cc, tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = psi[i] + hs * k3[i];
    chain_rhs(chain, cc, tmp, k4);
    for (std::size_t i = 0; i < n; ++i)
        psi[i] += hs / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

// Integrate backward across the output grid; n_sub RK4 substeps per grid step.
std::vector<double> integrate_grid(const ChainCarbon& chain, const ChainCoeffs& cc, SimGrid grid,
                                   int n_sub) {
    const std::size_t k = cc.k;
    const auto nodes = static_cast<std::size_t>(grid.N) + 1;
    std::vector<double> out(nodes * k);
    Vec psi(k, cc.terminal), k1(k), k2(k), k3(k), k4(k), tmp(k);
    for (std::size_t i = 0; i < k; ++i) out[(nodes - 1) * k + i] = psi[i];
    const double hs = grid.h / n_sub;
    for (std::size_t j = nodes - 1; j-- > 0;) {
        for (int ss = 0; ss < n_sub; ++ss) rk4_step(chain, cc, hs, psi, k1, k2, k3, k4, tmp);
        for (std::size_t i = 0; i < k; ++i) out[j * k + i] = psi[i];
    }
    return out;
}

} // namespace

HF h_and_f(double t, const Vec& carbon, WeightSolver& solver) {
    const Vec& pi = solver.solve(t, carbon);
    const double q = solver.market().r + 0.5 * solver.drift_rate(pi);
    const double delta = solver.spec().delta;
    if (delta == 1.0) return {0.0, -q};
    return {(1.0 - delta) * q, 0.0};
}

ChainValueSolution solve_chain_value_odes(const ChainCarbon& chain, const Market& m,
                                          const StrategySpec& spec, SimGrid grid, double h_ode,
                                          double halving_tol) {
    const ChainCoeffs cc = chain_coeffs(chain, m, spec);
    const int n_sub = std::max(1, static_cast<int>(std::ceil(grid.h / h_ode)));
    std::vector<double> coarse = integrate_grid(chain, cc, grid, n_sub);
    std::vector<double> fine = integrate_grid(chain, cc, grid, 2 * n_sub);
    double worst = 0.0;
    for (std::size_t i = 0; i < coarse.size(); ++i)
        worst = std::max(worst, std::abs(coarse[i] - fine[i]));
    if (worst > halving_tol)
        throw StepTooCoarse("value factor: halving the ODE step moved the solution by " +
                            std::to_string(worst));
    ChainValueSolution sol;
    sol.grid = grid;
    sol.n_states = cc.k;
    sol.phi = std::move(fine);
    return sol;
}

Vec rk4_chain_phi0(const ChainCarbon& chain, const Market& m, const StrategySpec& spec,
                   double t0, double T, int n_steps) {
    const ChainCoeffs cc = chain_coeffs(chain, m, spec);
    const std::size_t k = cc.k;
    Vec psi(k, cc.terminal), k1(k), k2(k), k3(k), k4(k), tmp(k);
    const double hs = (T - t0) / n_steps;
    for (int ss = 0; ss < n_steps; ++ss) rk4_step(chain, cc, hs, psi, k1, k2, k3, k4, tmp);
    return psi;
}

McEstimate feynman_kac_phi(const CarbonModel& model, double t0, const Market& m,
                           const StrategySpec& spec, SimGrid grid, std::size_t n_paths,
                           std::uint64_t seed, unsigned threads) {
    const double T = grid.T;
    const double indicator = spec.delta == 1.0 ? 0.0 : 1.0;
    const auto* chain = dynamic_cast<const ChainCarbon*>(&model);

    std::vector<RunningStat> partials(chunk_count(n_paths, threads));
    parallel_chunks(n_paths, threads, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        RunningStat stat;
        if (chain != nullptr) {
            const ChainCoeffs cc = chain_coeffs(*chain, m, spec);
            for (std::size_t p = begin; p < end; ++p) {
                Philox g(seed, stream_id(StreamPurpose::carbon, p));
                CarbonState s;
                chain->init(s, g);
                // Between jumps H and f are constant, so both the exponent
                // and the source integral have elementary antiderivatives.
                double t = t0, expo = 0.0, acc = 0.0;
                while (t < T) {
                    const auto k = static_cast<std::size_t>(s.regime);
                    const double wait = chain->sojourn_time(s.regime, g);
                    const double piece = std::min(wait, T - t);
                    const double hk = cc.H[k];
                    const double ef = std::exp(expo) * cc.f[k];
                    acc += hk == 0.0 ? ef * piece : ef * std::expm1(hk * piece) / hk;
                    expo += hk * piece;
                    t += piece;
                    if (wait < T - t + piece) s.regime = chain->jump_target(s.regime, g);
                }
                stat.add(std::exp(expo) * indicator - acc);
            }
        } else {
            auto local = model.clone();
            WeightSolver solver(m, spec);
            for (std::size_t p = begin; p < end; ++p) {
                Philox g(seed, stream_id(StreamPurpose::carbon, p));
                CarbonState s;
                local->init(s, g);
                HF prev = h_and_f(t0, s.c, solver);
                double expo = 0.0, acc = 0.0, t = t0;
                const int steps = std::max(1, static_cast<int>(std::ceil((T - t0) / grid.h)));
                const double h = (T - t0) / steps;
                for (int j = 0; j < steps; ++j) {
                    local->step(t, h, s, g);
                    t += h;
                    const HF cur = h_and_f(t, s.c, solver);
                    const double expo_next = expo + h / 2.0 * (prev.H + cur.H);
                    acc += h / 2.0 * (std::exp(expo) * prev.f + std::exp(expo_next) * cur.f);
                    expo = expo_next;
                    prev = cur;
                }
                stat.add(std::exp(expo) * indicator - acc);
            }
        }
        partials[chunk] = stat;
    });

    RunningStat total;
    for (const RunningStat& s : partials) total.merge(s);
    return {total.mean, total.std_error()};
}

double value_function_eval(double delta, double x, double phi) {
    if (!(x > 0.0)) throw ConfigError("value: wealth must be positive");
    if (delta == 1.0) return std::log(x) + phi;
    return std::pow(x, 1.0 - delta) / (1.0 - delta) * phi;
}

} // namespace carbonfund
