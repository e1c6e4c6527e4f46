#pragma once

#include <cstdint>
#include <vector>

#include "fpc/grid.hpp"
#include "fpc/model.hpp"

namespace fpc {

/// State of the interacting particle system at one time: positions X^i,
/// cumulative intensities Lambda^i, and survival weights exp(-Lambda^i).
struct ParticleEnsemble {
    int n = 0;
    std::vector<double> positions;
    std::vector<double> cum_intensity;
    std::vector<double> weights;
    std::uint64_t seed = 0;
};

struct ParticleStats {
    std::vector<double> t;
    std::vector<double> mass;        // mean survival weight
    std::vector<double> loss;        // L_t = 1 - mean weight
    std::vector<double> mean_x;      // weighted mean position
    std::vector<double> hazard_rate; // <empirical measure, hazard> = mean(w_i hazard(X_i))
};

struct ParticleTrajectory {
    ParticleStats stats;
    ParticleEnsemble final_state;
    double running_cost = 0.0; // sum_k mean_i(w^i_k w gamma(t_k, X^i_k)) dt
};

struct SimulateOptions {
    /// Replace survival weights by hard killing at independent Exp(1) clocks.
    bool hard_killing = false;
};

/// Euler-Maruyama simulation of the McKean-Vlasov system
///   X_{k+1} = X_k + gamma(t_k, X_k) dt + sigma dB^i + sigma0 dW - kappa dL,
///   Lambda updated by hazard(X_k) dt,  L_{t_k} = 1 - mean(weights).
/// Deterministic given (seed, wpath); per-particle counter RNG streams.
ParticleTrajectory simulate(const BailoutParams& p, const ControlField& gamma,
                            const NoisePath& wpath, int n, std::uint64_t seed, const Grid& g,
                            SimulateOptions opts = {});

/// Weighted histogram on the grid cells divided by dx; particles outside the
/// domain are dropped.
Field empirical_density(const ParticleEnsemble& e, const Grid& g);

struct CostEstimate {
    double mean = 0.0;
    double se = 0.0;
};

/// Monte Carlo estimate of E[int e^{-Lambda_t} w gamma dt + L_T] over
/// idiosyncratic noise, and over common-noise paths when sigma0 > 0.
CostEstimate estimate_cost(const BailoutParams& p, const ControlField& gamma, int n, int n_paths,
                           std::uint64_t seed, const Grid& g);

} // namespace fpc
