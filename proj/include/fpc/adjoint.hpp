#pragma once

#include <span>
#include <vector>

#include "fpc/forward.hpp"
#include "fpc/grid.hpp"
#include "fpc/model.hpp"

namespace fpc {

/// Time-indexed adjoint field u and its spatial gradient. The martingale
/// driver of the general backward SPDE is identically zero here: both
/// backward solvers work in the noiseless / random-coefficient setting.
struct AdjointPath {
    Grid grid;
    std::vector<double> slices;      // (n_t + 1) x n_x
    std::vector<double> grad_slices; // same shape, central differences

    std::span<const double> slice(int k) const {
        return {slices.data() + static_cast<std::size_t>(k) * grid.n_x,
                static_cast<std::size_t>(grid.n_x)};
    }
    Field slice_field(int k) const {
        const double* p = slices.data() + static_cast<std::size_t>(k) * grid.n_x;
        return Field(p, p + grid.n_x);
    }
    Field grad_field(int k) const {
        const double* p = grad_slices.data() + static_cast<std::size_t>(k) * grid.n_x;
        return Field(p, p + grid.n_x);
    }
};

/// One backward step of the linear adjoint equation
///   -dt u = DH(t, mu, u, grad u, gamma) + a d2/dx2 u,
/// diffusion implicit with copy-end ghosts, transport upwinded against the
/// drift sign, zeroth-order and nonlocal terms explicit on u_next.
Field step_backward(const Field& u_next, const ModelSpec& spec, const Field& mu_slice,
                    const Field& gamma_slice, double t, const Grid& g);

/// Backward solve with terminal condition u_T = Dpsi(mu_T); step k consumes
/// mu slice k and control slice k.
AdjointPath solve_adjoint(const ModelSpec& spec, const DensityPath& mu, const ControlField& gamma,
                          const Grid& g);

/// Semilinear HJB solve: each step replaces the control by the pointwise
/// minimiser of H1 evaluated on the gradient of the lagged slice u_{k+1}.
AdjointPath solve_hjb(const ModelSpec& spec, const DensityPath& mu, const Grid& g);

} // namespace fpc
