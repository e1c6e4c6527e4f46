#pragma once

#include <vector>

#include "fpc/adjoint.hpp"
#include "fpc/forward.hpp"
#include "fpc/grid.hpp"
#include "fpc/model.hpp"

namespace fpc {

/// Control perturbation direction h; gamma + eps h must stay in G for
/// eps in [0, eps_max] (checked where it is consumed).
struct Direction {
    int n_t = 0;
    int n_x = 0;
    std::vector<double> values;

    double at(int k, int i) const { return values[static_cast<std::size_t>(k) * n_x + i]; }
    double& at(int k, int i) { return values[static_cast<std::size_t>(k) * n_x + i]; }
    Field slice(int k) const {
        return Field(values.begin() + static_cast<std::ptrdiff_t>(k) * n_x,
                     values.begin() + static_cast<std::ptrdiff_t>(k + 1) * n_x);
    }
    double bound() const;

    static Direction zero(const Grid& g);
};

/// Variation V = d/deps mu^eps at eps = 0: the exact linearisation of the
/// discrete forward scheme around (mu, gamma), source driven by h. V_0 = 0,
/// V is signed.
DensityPath solve_variation(const ModelSpec& spec, const DensityPath& mu,
                            const ControlField& gamma, const Direction& h, const Grid& g);

/// Adjoint representation of the cost derivative,
///   dJ/deps = sum_k <mu_k, grad_g H1(t_k, ., p_k, gamma_k) . h_k> dt,
/// with p_k the gradient of the adjoint slice k+1 (the value the backward
/// step had in hand on [t_k, t_{k+1})).
double gateaux_adjoint(const ModelSpec& spec, const DensityPath& mu, const AdjointPath& u,
                       const ControlField& gamma, const Direction& h, const Grid& g);

/// Central-difference oracle (J(gamma + eps h) - J(gamma - eps h)) / (2 eps);
/// falls back to a one-sided quotient when one side leaves G.
double gateaux_fd(const ModelSpec& spec, const ControlField& gamma, const Direction& h, double eps,
                  const Grid& g, const Field& rho0);

/// Necessary-SMP residual sum_k <mu_k, H1(gamma_k) - min_g H1(g)> dt >= 0;
/// zero iff gamma attains the pointwise minimum mu-a.e.
double smp_residual(const ModelSpec& spec, const DensityPath& mu, const AdjointPath& u,
                    const ControlField& gamma, const Grid& g);

/// Pointwise minimiser of H1 along the adjoint gradient. smoothing = 0 gives
/// the exact bang-bang control (ties toward the larger value); smoothing > 0
/// returns the sigmoid blend of the two extreme controls used inside Picard.
ControlField extract_control(const ModelSpec& spec, const AdjointPath& u, double smoothing,
                             const Grid& g);

} // namespace fpc
