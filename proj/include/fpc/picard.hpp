#pragma once

#include <cstdint>
#include <vector>

#include "fpc/adjoint.hpp"
#include "fpc/forward.hpp"
#include "fpc/grid.hpp"
#include "fpc/model.hpp"

namespace fpc {

struct PicardOptions {
    int max_iters = 200;
    double tol = 1e-5;     // combined relative L2(time; space) residual
    double damping = 0.5;  // convex-combination weight on the new adjoint
    std::vector<double> smoothing_schedule{0.1, 0.03, 0.01, 0.0};

    void validate() const;
};

/// Converged (or best-effort) solution of the coupled forward-backward system.
/// The reported control is always the hard bang-bang extraction; smoothing is
/// only used to stabilise the iteration.
struct FbSolution {
    DensityPath density;
    AdjointPath adjoint;
    ControlField control;
    std::vector<double> residual_history;
    std::vector<double> cost_history;
    bool converged = false;
    double cost = 0.0;
};

/// Damped Picard iteration on the forward-backward system: extract a control
/// from the current adjoint, resolve the forward density, resolve the HJB
/// backward equation, and damp. The smoothing schedule anneals the control
/// relaxation down to hard bang-bang.
FbSolution picard_solve(const ModelSpec& spec, const Grid& g, const Field& rho0,
                        const PicardOptions& opts);

struct CostComparisonReport {
    double solution_cost = 0.0;
    std::vector<double> trial_costs;
    double margin = 0.0; // min over trials of (trial cost - solution cost)
};

/// Compares the solution's cost against random admissible controls (random
/// constants and random bang-bang blocks). In the convex regime the margin
/// must stay above -discretisation tolerance.
CostComparisonReport cost_comparison(const FbSolution& sol, const ModelSpec& spec, const Grid& g,
                                     const Field& rho0, int n_trials, std::uint64_t seed);

} // namespace fpc
