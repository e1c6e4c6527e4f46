#include "fpc/forward.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fpc/errors.hpp"
#include "fpc/kernels.hpp"

namespace fpc {

namespace {

struct StepDiag {
    double leakage = 0.0;     // mass lost through both ends during the step
    double zeroth_rate = 0.0; // <rho, lambda> at the step's start
};

Field forward_step_impl(const Field& rho, const ModelSpec& spec, const Field& gamma_slice,
                        double t, const Grid& g, StepDiag* diag) {
    const int n = g.n_x;
    if (static_cast<int>(rho.size()) != n || static_cast<int>(gamma_slice.size()) != n)
        throw DimensionMismatch("step_forward: field does not match grid");

    double rho_max = 0.0;
    for (double v : rho) rho_max = std::max(rho_max, v);
    for (double v : rho) {
        if (v < -1e-10 * std::max(rho_max, 1e-300))
            throw NegativeInput("step_forward: input density has a negative entry");
    }

    const std::vector<double> ms = spec.summaries(t, rho, g);

    std::vector<double> lambda(n), b(n), a(n);
    double b_max = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = g.node(i);
        lambda[i] = spec.lambda_coeff(t, x, ms);
        b[i] = spec.drift0(t, x, ms) + spec.drift1_slope(t, x) * gamma_slice[i];
        a[i] = spec.diffusion(t, x);
        b_max = std::max(b_max, std::abs(b[i]));
    }
    if (g.dt * b_max / g.dx > 1.0)
        throw CflViolation("step_forward: dt*max|b|/dx = " +
                           std::to_string(g.dt * b_max / g.dx) + " > 1");

    const std::vector<double> b_faces = kernels::face_velocities(b);
    double flux_left = 0.0, flux_right = 0.0;
    const std::vector<double> div =
        kernels::upwind_divergence(rho, b_faces, g, &flux_left, &flux_right);

    Field stage(n);
    double rate = 0.0;
    for (int i = 0; i < n; ++i) {
        stage[i] = rho[i] + g.dt * (lambda[i] * rho[i] - div[i]);
        rate += lambda[i] * rho[i];
    }

    Field out = kernels::diffuse_implicit_dirichlet(stage, a, g);

    if (diag) {
        diag->zeroth_rate = rate * g.dx;
        // advective out-flux plus diffusive boundary loss of the implicit stage
        diag->leakage = g.dt * (flux_right - flux_left) +
                        (g.dt / g.dx) * (a[0] * out[0] + a[n - 1] * out[n - 1]);
    }
    return out;
}

} // namespace

Field step_forward(const Field& rho, const ModelSpec& spec, const Field& gamma_slice, double t,
                   const Grid& g) {
    return forward_step_impl(rho, spec, gamma_slice, t, g, nullptr);
}

DensityPath solve_forward(const ModelSpec& spec, const ControlField& gamma, const Grid& g,
                          const Field& rho0) {
    if (gamma.n_t != g.n_t || gamma.n_x != g.n_x)
        throw DimensionMismatch("solve_forward: control field does not match grid");
    if (static_cast<int>(rho0.size()) != g.n_x)
        throw DimensionMismatch("solve_forward: rho0 does not match grid");
    gamma.check_admissible(spec);

    DensityPath path;
    path.grid = g;
    path.slices.resize(static_cast<std::size_t>(g.n_t + 1) * g.n_x);
    path.mass.resize(g.n_t + 1);
    path.zeroth_rate.resize(g.n_t + 1);
    path.leakage.resize(g.n_t);
    path.eta_norm.resize(g.n_t + 1);

    double rho0_max = 0.0;
    for (double v : rho0) rho0_max = std::max(rho0_max, v);
    const double neg_tol = -1e-10 * std::max(rho0_max, 1e-300);

    Field cur = rho0;
    std::copy(cur.begin(), cur.end(), path.slices.begin());
    path.mass[0] = total_mass(cur, g);
    path.eta_norm[0] = weighted_norm(cur, g);

    for (int k = 0; k < g.n_t; ++k) {
        StepDiag diag;
        Field next = forward_step_impl(cur, spec, gamma.slice(k), g.time(k), g, &diag);
        for (double v : next) {
            if (v < neg_tol)
                throw SolverFailure("solve_forward: density dropped below the nonnegativity "
                                    "tolerance at step " + std::to_string(k + 1));
        }
        path.zeroth_rate[k] = diag.zeroth_rate;
        path.leakage[k] = diag.leakage;
        std::copy(next.begin(), next.end(),
                  path.slices.begin() + static_cast<std::ptrdiff_t>(k + 1) * g.n_x);
        path.mass[k + 1] = total_mass(next, g);
        path.eta_norm[k + 1] = weighted_norm(next, g);
        cur = std::move(next);
    }
    const std::vector<double> ms_T = spec.summaries(g.t_horizon, cur, g);
    double rate_T = 0.0;
    for (int i = 0; i < g.n_x; ++i)
        rate_T += spec.lambda_coeff(g.t_horizon, g.node(i), ms_T) * cur[i];
    path.zeroth_rate[g.n_t] = rate_T * g.dx;
    return path;
}

MassLoss mass_and_loss(const DensityPath& path) {
    MassLoss out;
    out.mass = path.mass;
    out.loss.resize(path.mass.size());
    out.loss[0] = 0.0;
    for (int k = 0; k < path.grid.n_t; ++k)
        out.loss[k + 1] = out.loss[k] - path.grid.dt * path.zeroth_rate[k];
    return out;
}

double evaluate_cost(const ModelSpec& spec, const ControlField& gamma, const Grid& g,
                     const Field& rho0) {
    const DensityPath path = solve_forward(spec, gamma, g, rho0);
    return evaluate_cost_on_path(spec, path, gamma);
}

double evaluate_cost_on_path(const ModelSpec& spec, const DensityPath& path,
                             const ControlField& gamma) {
    const Grid& g = path.grid;
    if (gamma.n_t != g.n_t || gamma.n_x != g.n_x)
        throw DimensionMismatch("evaluate_cost_on_path: control field does not match grid");
    double acc = 0.0;
    for (int k = 0; k < g.n_t; ++k)
        acc += running_cost(spec, g.time(k), path.slice_field(k), gamma.slice(k), g);
    return acc * g.dt + terminal_cost_eval(spec, path.slice_field(g.n_t), g);
}

DensityPath pushforward(const DensityPath& path, const NoisePath& wpath, double sigma0,
                        double margin_fraction) {
    const Grid& g = path.grid;
    if (static_cast<int>(wpath.values.size()) != g.n_t + 1)
        throw TimeGridMismatch("pushforward: noise path does not match the time grid");
    if (sigma0 == 0.0) return path;

    const double margin = margin_fraction * (g.x_max - g.x_min);
    DensityPath out = path;
    for (int k = 0; k <= g.n_t; ++k) {
        const double shift = sigma0 * wpath.values[k];
        if (std::abs(shift) > margin)
            throw ShiftOutOfDomain("pushforward: |sigma0 W_t| = " + std::to_string(std::abs(shift)) +
                                   " exceeds the margin " + std::to_string(margin));
        const Field shifted = shift_measure(path.slice_field(k), shift, g);
        std::copy(shifted.begin(), shifted.end(),
                  out.slices.begin() + static_cast<std::ptrdiff_t>(k) * g.n_x);
        out.mass[k] = total_mass(shifted, g);
        out.eta_norm[k] = weighted_norm(shifted, g);
    }
    return out;
}

} // namespace fpc
