#include "fpc/adjoint.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fpc/errors.hpp"
#include "fpc/kernels.hpp"

namespace fpc {

namespace {

// The step mirrors the forward scheme transposed: implicit diffusion first,
// then the explicit zeroth-order, upwinded transport, cost, and nonlocal
// terms on the diffused slice. Keeping the stage order adjoint to the
// forward splitting is what makes the discrete duality and gradient
// identities tight rather than merely O(dt)-consistent.
Field backward_step_impl(const Field& u_next, const ModelSpec& spec, const Field& mu_slice,
                         const Field& gamma_slice, double t, const Grid& g) {
    const int n = g.n_x;
    if (static_cast<int>(u_next.size()) != n || static_cast<int>(mu_slice.size()) != n ||
        static_cast<int>(gamma_slice.size()) != n)
        throw DimensionMismatch("step_backward: field does not match grid");

    const std::vector<double> ms = spec.summaries(t, mu_slice, g);

    std::vector<double> lambda(n), b(n), a(n), f(n);
    double b_max = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = g.node(i);
        lambda[i] = spec.lambda_coeff(t, x, ms);
        b[i] = spec.drift0(t, x, ms) + spec.drift1_slope(t, x) * gamma_slice[i];
        a[i] = spec.diffusion(t, x);
        f[i] = spec.run_cost0(t, x, ms) + spec.run_cost1(t, x, gamma_slice[i]);
        b_max = std::max(b_max, std::abs(b[i]));
    }
    if (g.dt * b_max / g.dx > 1.0)
        throw CflViolation("step_backward: dt*max|b|/dx = " +
                           std::to_string(g.dt * b_max / g.dx) + " > 1");

    const Field w = kernels::diffuse_implicit_neumann(u_next, a, g);

    const std::vector<double> b_faces = kernels::face_velocities(b);
    const std::vector<double> transport = kernels::upwind_gradient_against(w, b_faces, g);

    Field out(n);
    for (int i = 0; i < n; ++i) {
        const double x = g.node(i);
        double nonlocal = 0.0;
        if (spec.has_measure_derivatives) {
            // Ddrift0 pairs the gradient the way the forward flux sees it:
            // upwind density times face differences of w
            for (int f = 1; f < n; ++f) {
                const double bf = b_faces[f];
                const double upwind = bf > 0.0 ? mu_slice[f - 1]
                                               : (bf < 0.0 ? mu_slice[f]
                                                           : 0.5 * (mu_slice[f - 1] + mu_slice[f]));
                const double kernel = 0.5 * (spec.d_drift0(t, g.node(f - 1), ms, x) +
                                             spec.d_drift0(t, g.node(f), ms, x));
                nonlocal += kernel * upwind * (w[f] - w[f - 1]) / g.dx;
            }
            for (int j = 0; j < n; ++j) {
                const double y = g.node(j);
                nonlocal += mu_slice[j] *
                            (spec.d_lambda(t, y, ms, x) * w[j] + spec.d_run_cost0(t, y, ms, x));
            }
        }
        out[i] = w[i] + g.dt * (lambda[i] * w[i] + transport[i] + f[i] + nonlocal * g.dx);
    }
    return out;
}

} // namespace

Field step_backward(const Field& u_next, const ModelSpec& spec, const Field& mu_slice,
                    const Field& gamma_slice, double t, const Grid& g) {
    return backward_step_impl(u_next, spec, mu_slice, gamma_slice, t, g);
}

AdjointPath solve_adjoint(const ModelSpec& spec, const DensityPath& mu, const ControlField& gamma,
                          const Grid& g) {
    if (mu.grid.n_t != g.n_t || mu.grid.n_x != g.n_x)
        throw DimensionMismatch("solve_adjoint: density path does not match grid");
    if (gamma.n_t != g.n_t || gamma.n_x != g.n_x)
        throw DimensionMismatch("solve_adjoint: control field does not match grid");

    AdjointPath path;
    path.grid = g;
    path.slices.resize(static_cast<std::size_t>(g.n_t + 1) * g.n_x);
    path.grad_slices.resize(path.slices.size());

    const Field mu_T = mu.slice_field(g.n_t);
    Field cur(g.n_x);
    for (int i = 0; i < g.n_x; ++i)
        cur[i] = spec.terminal_density_derivative(g.node(i), mu_T, g);

    auto store = [&](int k, const Field& u) {
        std::copy(u.begin(), u.end(),
                  path.slices.begin() + static_cast<std::ptrdiff_t>(k) * g.n_x);
        const Field gu = gradient_fd(u, g);
        std::copy(gu.begin(), gu.end(),
                  path.grad_slices.begin() + static_cast<std::ptrdiff_t>(k) * g.n_x);
    };
    store(g.n_t, cur);

    for (int k = g.n_t - 1; k >= 0; --k) {
        cur = backward_step_impl(cur, spec, mu.slice_field(k), gamma.slice(k), g.time(k), g);
        store(k, cur);
    }
    return path;
}

AdjointPath solve_hjb(const ModelSpec& spec, const DensityPath& mu, const Grid& g) {
    if (mu.grid.n_t != g.n_t || mu.grid.n_x != g.n_x)
        throw DimensionMismatch("solve_hjb: density path does not match grid");

    AdjointPath path;
    path.grid = g;
    path.slices.resize(static_cast<std::size_t>(g.n_t + 1) * g.n_x);
    path.grad_slices.resize(path.slices.size());

    const Field mu_T = mu.slice_field(g.n_t);
    Field cur(g.n_x);
    for (int i = 0; i < g.n_x; ++i)
        cur[i] = spec.terminal_density_derivative(g.node(i), mu_T, g);

    auto store = [&](int k, const Field& u) {
        std::copy(u.begin(), u.end(),
                  path.slices.begin() + static_cast<std::ptrdiff_t>(k) * g.n_x);
        const Field gu = gradient_fd(u, g);
        std::copy(gu.begin(), gu.end(),
                  path.grad_slices.begin() + static_cast<std::ptrdiff_t>(k) * g.n_x);
    };
    store(g.n_t, cur);

    Field gamma_slice(g.n_x);
    for (int k = g.n_t - 1; k >= 0; --k) {
        const double t = g.time(k);
        const Field grad_next = gradient_fd(cur, g);
        for (int i = 0; i < g.n_x; ++i)
            gamma_slice[i] = minimize_h1(spec, t, g.node(i), grad_next[i]);
        cur = backward_step_impl(cur, spec, mu.slice_field(k), gamma_slice, t, g);
        store(k, cur);
    }
    return path;
}

} // namespace fpc
