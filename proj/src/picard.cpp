#include "fpc/picard.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fpc/rng.hpp"
#include "fpc/sensitivity.hpp"

namespace fpc {

void PicardOptions::validate() const {
    if (max_iters < 1) throw std::invalid_argument("PicardOptions: max_iters must be >= 1");
    if (!(tol > 0.0)) throw std::invalid_argument("PicardOptions: tol must be > 0");
    if (!(damping > 0.0 && damping <= 1.0))
        throw std::invalid_argument("PicardOptions: damping must be in (0, 1]");
    if (smoothing_schedule.empty())
        throw std::invalid_argument("PicardOptions: smoothing schedule must be nonempty");
    for (std::size_t i = 1; i < smoothing_schedule.size(); ++i)
        if (smoothing_schedule[i] > smoothing_schedule[i - 1])
            throw std::invalid_argument("PicardOptions: smoothing schedule must be nonincreasing");
    if (smoothing_schedule.back() < 0.0)
        throw std::invalid_argument("PicardOptions: smoothing must be >= 0");
}

namespace {

// discrete L2(time; space) norm of a (n_t + 1) x n_x block
double spacetime_norm(const std::vector<double>& a, const Grid& g) {
    double acc = 0.0;
    for (double v : a) acc += v * v;
    return std::sqrt(acc * g.dx * g.dt);
}

double spacetime_diff_norm(const std::vector<double>& a, const std::vector<double>& b,
                           const Grid& g) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return std::sqrt(acc * g.dx * g.dt);
}

} // namespace

FbSolution picard_solve(const ModelSpec& spec, const Grid& g, const Field& rho0,
                        const PicardOptions& opts) {
    opts.validate();
    spec.validate(g);

    const int n_stages = static_cast<int>(opts.smoothing_schedule.size());
    const int iters_per_stage = std::max(1, opts.max_iters / n_stages);

    ControlField gamma = ControlField::constant(g, spec.g_min);
    DensityPath mu = solve_forward(spec, gamma, g, rho0);
    AdjointPath u = solve_hjb(spec, mu, g);
    const double mu_scale = std::max(spacetime_norm(mu.slices, g), 1e-300);

    FbSolution best;
    best.converged = false;
    double best_residual = std::numeric_limits<double>::infinity();

    FbSolution cur;
    int iter = 0;
    for (int stage = 0; stage < n_stages && iter < opts.max_iters; ++stage) {
        const double eps_s = opts.smoothing_schedule[stage];
        const bool final_stage = (stage == n_stages - 1);
        const int stage_budget = final_stage ? opts.max_iters - iter : iters_per_stage;

        for (int s = 0; s < stage_budget && iter < opts.max_iters; ++s, ++iter) {
            gamma = extract_control(spec, u, eps_s, g);
            DensityPath mu_next = solve_forward(spec, gamma, g, rho0);
            AdjointPath u_tilde = solve_hjb(spec, mu_next, g);

            AdjointPath u_next = u_tilde;
            if (opts.damping < 1.0) {
                for (std::size_t i = 0; i < u_next.slices.size(); ++i)
                    u_next.slices[i] =
                        opts.damping * u_tilde.slices[i] + (1.0 - opts.damping) * u.slices[i];
                for (std::size_t i = 0; i < u_next.grad_slices.size(); ++i)
                    u_next.grad_slices[i] = opts.damping * u_tilde.grad_slices[i] +
                                            (1.0 - opts.damping) * u.grad_slices[i];
            }

            const double u_scale = std::max(spacetime_norm(u.slices, g), 1e-300);
            const double residual = spacetime_diff_norm(u_next.slices, u.slices, g) / u_scale +
                                    spacetime_diff_norm(mu_next.slices, mu.slices, g) / mu_scale;

            mu = std::move(mu_next);
            u = std::move(u_next);

            const ControlField hard = extract_control(spec, u, 0.0, g);
            const double cost = evaluate_cost(spec, hard, g, rho0);
            cur.residual_history.push_back(residual);
            cur.cost_history.push_back(cost);

            if (final_stage && residual < best_residual) {
                best_residual = residual;
                best.control = hard;
                best.adjoint = u;
                best.cost = cost;
            }
            if (residual <= opts.tol) {
                // settled at this smoothing level; move on, or stop if hard
                if (final_stage) best.converged = true;
                ++iter;
                break;
            }
        }
        if (best.converged) break;
    }

    if (!std::isfinite(best_residual)) { // max_iters exhausted before the final stage
        best.control = extract_control(spec, u, 0.0, g);
        best.adjoint = u;
        best.cost = evaluate_cost(spec, best.control, g, rho0);
    }
    best.residual_history = std::move(cur.residual_history);
    best.cost_history = std::move(cur.cost_history);
    best.density = solve_forward(spec, best.control, g, rho0);
    return best;
}

CostComparisonReport cost_comparison(const FbSolution& sol, const ModelSpec& spec, const Grid& g,
                                     const Field& rho0, int n_trials, std::uint64_t seed) {
    CostComparisonReport report;
    report.solution_cost = sol.cost;
    if (n_trials <= 0) return report;

    report.trial_costs.reserve(n_trials);
    const double span = spec.g_max - spec.g_min;
    for (int trial = 0; trial < n_trials; ++trial) {
        ControlField gamma = ControlField::constant(g, spec.g_min);
        if (trial % 2 == 0) {
            const double level = spec.g_min + span * counter_u01(seed, 1, trial, 0);
            std::fill(gamma.values.begin(), gamma.values.end(), level);
        } else {
            // bang-bang block: g_max on a random space-time rectangle
            const double x0 = g.x_min + (g.x_max - g.x_min) * counter_u01(seed, 2, trial, 0);
            const double x1 = g.x_min + (g.x_max - g.x_min) * counter_u01(seed, 2, trial, 1);
            const double t0 = g.t_horizon * counter_u01(seed, 2, trial, 2);
            const double t1 = g.t_horizon * counter_u01(seed, 2, trial, 3);
            const double xa = std::min(x0, x1), xb = std::max(x0, x1);
            const double ta = std::min(t0, t1), tb = std::max(t0, t1);
            for (int k = 0; k < g.n_t; ++k) {
                if (g.time(k) < ta || g.time(k) > tb) continue;
                for (int i = 0; i < g.n_x; ++i)
                    if (g.node(i) >= xa && g.node(i) <= xb) gamma.at(k, i) = spec.g_max;
            }
        }
        report.trial_costs.push_back(evaluate_cost(spec, gamma, g, rho0));
    }
    double margin = std::numeric_limits<double>::infinity();
    for (double c : report.trial_costs) margin = std::min(margin, c - sol.cost);
    report.margin = margin;
    return report;
}

} // namespace fpc
