#include "fpc/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fpc/errors.hpp"
#include "fpc/kernels.hpp"

namespace fpc {

double Direction::bound() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

Direction Direction::zero(const Grid& g) {
    Direction d;
    d.n_t = g.n_t;
    d.n_x = g.n_x;
    d.values.assign(static_cast<std::size_t>(g.n_t) * g.n_x, 0.0);
    return d;
}

DensityPath solve_variation(const ModelSpec& spec, const DensityPath& mu,
                            const ControlField& gamma, const Direction& h, const Grid& g) {
    if (mu.grid.n_t != g.n_t || mu.grid.n_x != g.n_x)
        throw DimensionMismatch("solve_variation: density path does not match grid");
    if (gamma.n_t != g.n_t || gamma.n_x != g.n_x || h.n_t != g.n_t || h.n_x != g.n_x)
        throw DimensionMismatch("solve_variation: control or direction does not match grid");

    const int n = g.n_x;
    DensityPath path;
    path.grid = g;
    path.slices.assign(static_cast<std::size_t>(g.n_t + 1) * n, 0.0);
    path.mass.assign(g.n_t + 1, 0.0);
    path.zeroth_rate.assign(g.n_t + 1, 0.0);
    path.leakage.assign(g.n_t, 0.0);
    path.eta_norm.assign(g.n_t + 1, 0.0);

    Field v(n, 0.0); // V_0 = 0

    std::vector<double> lambda(n), b(n), a(n), delta_b(n), dlam(n);
    for (int k = 0; k < g.n_t; ++k) {
        const double t = g.time(k);
        const Field rho = mu.slice_field(k);
        const std::vector<double> ms = spec.summaries(t, rho, g);

        for (int i = 0; i < n; ++i) {
            const double x = g.node(i);
            lambda[i] = spec.lambda_coeff(t, x, ms);
            b[i] = spec.drift0(t, x, ms) + spec.drift1_slope(t, x) * gamma.at(k, i);
            a[i] = spec.diffusion(t, x);
            delta_b[i] = spec.drift1_slope(t, x) * h.at(k, i);
            dlam[i] = 0.0;
        }
        // measure derivatives of lambda and drift0 paired against V
        if (spec.has_measure_derivatives) {
            for (int i = 0; i < n; ++i) {
                const double x = g.node(i);
                double acc_l = 0.0, acc_b = 0.0;
                for (int j = 0; j < n; ++j) {
                    const double y = g.node(j);
                    acc_l += spec.d_lambda(t, x, ms, y) * v[j];
                    acc_b += spec.d_drift0(t, x, ms, y) * v[j];
                }
                dlam[i] = acc_l * g.dx;
                delta_b[i] += acc_b * g.dx;
            }
        }

        const std::vector<double> b_faces = kernels::face_velocities(b);
        const std::vector<double> delta_b_faces = kernels::face_velocities(delta_b);
        const std::vector<double> div =
            kernels::upwind_divergence_linearised(rho, v, b_faces, delta_b_faces, g);

        Field stage(n);
        for (int i = 0; i < n; ++i)
            stage[i] = v[i] + g.dt * (lambda[i] * v[i] + dlam[i] * rho[i] - div[i]);
        v = kernels::diffuse_implicit_dirichlet(stage, a, g);

        std::copy(v.begin(), v.end(),
                  path.slices.begin() + static_cast<std::ptrdiff_t>(k + 1) * n);
        path.mass[k + 1] = total_mass(v, g);
        path.eta_norm[k + 1] = weighted_norm(v, g);
    }
    return path;
}

double gateaux_adjoint(const ModelSpec& spec, const DensityPath& mu, const AdjointPath& u,
                       const ControlField& gamma, const Direction& h, const Grid& g) {
    if (mu.grid.n_t != g.n_t || u.grid.n_t != g.n_t)
        throw DimensionMismatch("gateaux_adjoint: paths do not match grid");
    if (gamma.n_t != g.n_t || gamma.n_x != g.n_x || h.n_t != g.n_t || h.n_x != g.n_x)
        throw DimensionMismatch("gateaux_adjoint: control or direction does not match grid");

    // The drift part of grad_g H1 . h is paired the way the forward scheme
    // sees it: the perturbation flux h * drift1_slope carried by the upwind
    // density, against face differences of the diffused adjoint slice. This
    // is the exact transpose of the linearised step, so the value matches
    // the derivative of the discrete cost instead of drifting O(dx) from it.
    double acc = 0.0;
    std::vector<double> b(g.n_x), a(g.n_x), delta_b(g.n_x);
    for (int k = 0; k < g.n_t; ++k) {
        const double t = g.time(k);
        const Field rho = mu.slice_field(k);
        const std::vector<double> ms = spec.summaries(t, rho, g);
        for (int i = 0; i < g.n_x; ++i) {
            const double x = g.node(i);
            b[i] = spec.drift0(t, x, ms) + spec.drift1_slope(t, x) * gamma.at(k, i);
            a[i] = spec.diffusion(t, x);
            delta_b[i] = spec.drift1_slope(t, x) * h.at(k, i);
        }
        const Field w = kernels::diffuse_implicit_neumann(u.slice_field(k + 1), a, g);
        const std::vector<double> b_faces = kernels::face_velocities(b);
        const std::vector<double> delta_b_faces = kernels::face_velocities(delta_b);

        double slice_acc = 0.0;
        for (int f = 1; f < g.n_x; ++f) {
            const double bf = b_faces[f];
            const double upwind =
                bf > 0.0 ? rho[f - 1] : (bf < 0.0 ? rho[f] : 0.5 * (rho[f - 1] + rho[f]));
            slice_acc += delta_b_faces[f] * upwind * (w[f] - w[f - 1]) / g.dx;
        }
        for (int i = 0; i < g.n_x; ++i)
            slice_acc += rho[i] * spec.run_cost1_grad(t, g.node(i), gamma.at(k, i)) * h.at(k, i);
        acc += slice_acc * g.dx;
    }
    return acc * g.dt;
}

namespace {

ControlField perturbed(const ControlField& gamma, const Direction& h, double eps) {
    ControlField out = gamma;
    for (std::size_t idx = 0; idx < out.values.size(); ++idx)
        out.values[idx] += eps * h.values[idx];
    return out;
}

bool admissible(const ControlField& gamma, const ModelSpec& spec) {
    for (double v : gamma.values)
        if (v < spec.g_min || v > spec.g_max) return false;
    return true;
}

} // namespace

double gateaux_fd(const ModelSpec& spec, const ControlField& gamma, const Direction& h, double eps,
                  const Grid& g, const Field& rho0) {
    if (!(eps > 0.0)) throw std::invalid_argument("gateaux_fd: eps must be > 0");
    const ControlField up = perturbed(gamma, h, eps);
    const ControlField down = perturbed(gamma, h, -eps);
    const bool up_ok = admissible(up, spec);
    const bool down_ok = admissible(down, spec);
    if (up_ok && down_ok)
        return (evaluate_cost(spec, up, g, rho0) - evaluate_cost(spec, down, g, rho0)) /
               (2.0 * eps);
    if (up_ok)
        return (evaluate_cost(spec, up, g, rho0) - evaluate_cost(spec, gamma, g, rho0)) / eps;
    if (down_ok)
        return (evaluate_cost(spec, gamma, g, rho0) - evaluate_cost(spec, down, g, rho0)) / eps;
    throw InadmissiblePerturbation("gateaux_fd: gamma +- eps h leaves G on both sides");
}

double smp_residual(const ModelSpec& spec, const DensityPath& mu, const AdjointPath& u,
                    const ControlField& gamma, const Grid& g) {
    double acc = 0.0;
    for (int k = 0; k < g.n_t; ++k) {
        const double t = g.time(k);
        const Field rho = mu.slice_field(k);
        const Field p = u.grad_field(k + 1);
        double slice_acc = 0.0;
        for (int i = 0; i < g.n_x; ++i) {
            const double x = g.node(i);
            const double here = hamiltonian_h1(spec, t, x, p[i], gamma.at(k, i));
            const double best = hamiltonian_h1(spec, t, x, p[i], minimize_h1(spec, t, x, p[i]));
            slice_acc += rho[i] * (here - best);
        }
        acc += slice_acc * g.dx;
    }
    return acc * g.dt;
}

ControlField extract_control(const ModelSpec& spec, const AdjointPath& u, double smoothing,
                             const Grid& g) {
    if (smoothing < 0.0) throw std::invalid_argument("extract_control: smoothing must be >= 0");
    ControlField out;
    out.n_t = g.n_t;
    out.n_x = g.n_x;
    out.values.resize(static_cast<std::size_t>(g.n_t) * g.n_x);

    const double span = spec.g_max - spec.g_min;
    for (int k = 0; k < g.n_t; ++k) {
        const double t = g.time(k);
        const Field p = u.grad_field(k + 1);
        for (int i = 0; i < g.n_x; ++i) {
            const double x = g.node(i);
            double value;
            if (smoothing == 0.0 || span == 0.0) {
                value = minimize_h1(spec, t, x, p[i]);
            } else {
                // sigmoid blend of the two extreme controls, scaled so the
                // bailout model reduces to g_max * sigmoid(-(du/dx + w)/eps_s)
                const double gap = (hamiltonian_h1(spec, t, x, p[i], spec.g_max) -
                                    hamiltonian_h1(spec, t, x, p[i], spec.g_min)) /
                                   span;
                value = spec.g_min + span / (1.0 + std::exp(gap / smoothing));
            }
            out.at(k, i) = value;
        }
    }
    return out;
}

} // namespace fpc
