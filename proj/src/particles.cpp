#include "fpc/particles.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fpc/errors.hpp"
#include "fpc/rng.hpp"

namespace fpc {

namespace {

// piecewise-constant in time, linear in space, clamped at the domain ends
double control_at(const ControlField& gamma, const Grid& g, int k, double x) {
    const double s = (x - g.node(0)) / g.dx;
    if (s <= 0.0) return gamma.at(k, 0);
    if (s >= g.n_x - 1) return gamma.at(k, g.n_x - 1);
    const int j = static_cast<int>(s);
    const double frac = s - j;
    return (1.0 - frac) * gamma.at(k, j) + frac * gamma.at(k, j + 1);
}

constexpr std::uint64_t kInitStep = 0xffffffffULL;   // counter tag for X_0 draws
constexpr std::uint64_t kClockStep = 0xfffffffeULL;  // counter tag for Exp(1) clocks

} // namespace

ParticleTrajectory simulate(const BailoutParams& p, const ControlField& gamma,
                            const NoisePath& wpath, int n, std::uint64_t seed, const Grid& g,
                            SimulateOptions opts) {
    if (n < 1) throw std::invalid_argument("simulate: need at least one particle");
    if (gamma.n_t != g.n_t || gamma.n_x != g.n_x)
        throw DimensionMismatch("simulate: control field does not match grid");
    if (static_cast<int>(wpath.values.size()) != g.n_t + 1)
        throw TimeGridMismatch("simulate: noise path does not match the time grid");

    ParticleTrajectory out;
    ParticleEnsemble& e = out.final_state;
    e.n = n;
    e.seed = seed;
    e.positions.resize(n);
    e.cum_intensity.assign(n, 0.0);
    e.weights.assign(n, 1.0);

    std::vector<double> clocks;
    if (opts.hard_killing) {
        clocks.resize(n);
        for (int i = 0; i < n; ++i) clocks[i] = counter_exponential(seed, i, kClockStep, 0);
    }

    for (int i = 0; i < n; ++i)
        e.positions[i] = p.initial_mean + p.initial_sd * counter_normal(seed, i, kInitStep, 0);

    auto record = [&](int k) {
        double mass = 0.0, mx = 0.0, rate = 0.0;
        for (int i = 0; i < n; ++i) {
            mass += e.weights[i];
            mx += e.weights[i] * e.positions[i];
            rate += e.weights[i] * bailout_hazard(p, e.positions[i]);
        }
        mass /= n;
        out.stats.t.push_back(g.time(k));
        out.stats.mass.push_back(mass);
        out.stats.loss.push_back(1.0 - mass);
        out.stats.mean_x.push_back(mass > 0.0 ? mx / (n * mass) : 0.0);
        out.stats.hazard_rate.push_back(rate / n);
    };
    record(0);

    const double sq_dt = std::sqrt(g.dt);
    for (int k = 0; k < g.n_t; ++k) {
        // phase 1: intensities and weights from the positions at step start
        double mean_w_old = 0.0, mean_w_new = 0.0, run = 0.0;
        for (int i = 0; i < n; ++i) {
            mean_w_old += e.weights[i];
            run += e.weights[i] * p.w_weight * control_at(gamma, g, k, e.positions[i]);
            e.cum_intensity[i] += bailout_hazard(p, e.positions[i]) * g.dt;
            e.weights[i] = opts.hard_killing
                               ? (e.cum_intensity[i] < clocks[i] ? 1.0 : 0.0)
                               : std::exp(-e.cum_intensity[i]);
            mean_w_new += e.weights[i];
        }
        out.running_cost += (run / n) * g.dt;
        const double d_loss = (mean_w_old - mean_w_new) / n;
        const double d_common = p.sigma0 * (wpath.values[k + 1] - wpath.values[k]);

        // phase 2: synchronous position update
        for (int i = 0; i < n; ++i) {
            e.positions[i] += control_at(gamma, g, k, e.positions[i]) * g.dt +
                              p.sigma * sq_dt * counter_normal(seed, i, k, 0) + d_common -
                              p.kappa * d_loss;
        }
        record(k + 1);
    }
    return out;
}

Field empirical_density(const ParticleEnsemble& e, const Grid& g) {
    Field f(g.n_x, 0.0);
    const double half = 0.5 * g.dx;
    for (int i = 0; i < e.n; ++i) {
        const double x = e.positions[i];
        if (x < g.node(0) - half || x > g.node(g.n_x - 1) + half) continue;
        const int j = std::clamp(static_cast<int>(std::lround((x - g.node(0)) / g.dx)), 0,
                                 g.n_x - 1);
        f[j] += e.weights[i];
    }
    const double scale = 1.0 / (e.n * g.dx);
    for (double& v : f) v *= scale;
    return f;
}

CostEstimate estimate_cost(const BailoutParams& p, const ControlField& gamma, int n, int n_paths,
                           std::uint64_t seed, const Grid& g) {
    if (n < 1 || n_paths < 1)
        throw std::invalid_argument("estimate_cost: n and n_paths must be >= 1");

    std::vector<double> path_costs(n_paths);
    CostEstimate out;
    for (int j = 0; j < n_paths; ++j) {
        NoisePath w;
        if (p.sigma0 > 0.0) {
            w = sample_brownian(g, splitmix64(seed + 1000003ULL * j));
        } else {
            w.values.assign(g.n_t + 1, 0.0);
        }
        const std::uint64_t path_seed = splitmix64(seed ^ (0x51ed2700ULL + j));
        const ParticleTrajectory traj = simulate(p, gamma, w, n, path_seed, g);
        path_costs[j] = traj.running_cost + traj.stats.loss.back();

        if (n_paths == 1) {
            // single environment: the spread comes from the particles alone,
            // estimated by per-particle terminal contributions
            double mean_c = 0.0, m2 = 0.0;
            for (int i = 0; i < n; ++i) {
                const double c = 1.0 - traj.final_state.weights[i];
                mean_c += c;
            }
            mean_c /= n;
            for (int i = 0; i < n; ++i) {
                const double d = (1.0 - traj.final_state.weights[i]) - mean_c;
                m2 += d * d;
            }
            out.se = std::sqrt(m2 / (static_cast<double>(n) - 1.0)) / std::sqrt(n);
        }
    }
    double mean = 0.0;
    for (double c : path_costs) mean += c;
    mean /= n_paths;
    out.mean = mean;
    if (n_paths > 1) {
        double m2 = 0.0;
        for (double c : path_costs) m2 += (c - mean) * (c - mean);
        out.se = std::sqrt(m2 / (n_paths - 1.0)) / std::sqrt(n_paths);
    }
    return out;
}

} // namespace fpc
