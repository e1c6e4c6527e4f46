#pragma once

#include <span>
#include <vector>

#include "fpc/grid.hpp"
#include "fpc/model.hpp"

namespace fpc {

/// Time-indexed density fields rho_{t_k} with per-step solver diagnostics.
struct DensityPath {
    Grid grid;
    std::vector<double> slices; // (n_t + 1) x n_x, row-major

    std::vector<double> mass;        // n_t + 1
    std::vector<double> zeroth_rate; // n_t + 1: <rho_k, lambda(t_k, ., mu_k)>
    std::vector<double> leakage;     // n_t: boundary mass lost in step k
    std::vector<double> eta_norm;    // n_t + 1 weighted norms

    std::span<const double> slice(int k) const {
        return {values_at(k), static_cast<std::size_t>(grid.n_x)};
    }
    Field slice_field(int k) const {
        return Field(values_at(k), values_at(k) + grid.n_x);
    }
    int n_slices() const { return grid.n_t + 1; }

private:
    const double* values_at(int k) const {
        return slices.data() + static_cast<std::size_t>(k) * grid.n_x;
    }
};

/// One semi-implicit step of the nonlinear random Fokker-Planck equation
///   dt rho = lambda rho - d/dx(b rho) + d2/dx2(a rho)
/// with nonlocal summaries frozen at the step's start: explicit zeroth-order
/// and first-order upwind advection, implicit diffusion, zero-Dirichlet ends.
Field step_forward(const Field& rho, const ModelSpec& spec, const Field& gamma_slice, double t,
                   const Grid& g);

DensityPath solve_forward(const ModelSpec& spec, const ControlField& gamma, const Grid& g,
                          const Field& rho0);

struct MassLoss {
    std::vector<double> mass; // <mu_t, 1>
    std::vector<double> loss; // -int_0^t <mu_s, lambda> ds, left-endpoint rule
};

/// Mass and accumulated-loss paths; for the bailout model the loss is the
/// defaulted fraction int_0^t <mu_s, hazard> ds.
MassLoss mass_and_loss(const DensityPath& path);

/// J(gamma) = sum_k <mu_k, f(t_k, ., mu_k, gamma_k)> dt + psi(mu_T)
/// (left-endpoint quadrature), computed from a fresh forward solve.
double evaluate_cost(const ModelSpec& spec, const ControlField& gamma, const Grid& g,
                     const Field& rho0);

/// Same quadrature on an already-computed path.
double evaluate_cost_on_path(const ModelSpec& spec, const DensityPath& path,
                             const ControlField& gamma);

/// nu_t = (id + sigma0 W_t)^# mu_t, slice by slice. Throws ShiftOutOfDomain
/// when |sigma0 W_t| exceeds margin_fraction of the domain width.
DensityPath pushforward(const DensityPath& path, const NoisePath& wpath, double sigma0,
                        double margin_fraction = 0.25);

} // namespace fpc
