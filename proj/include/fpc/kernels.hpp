#pragma once

#include <vector>

#include "fpc/grid.hpp"

namespace fpc::kernels {

/// Thomas solve of the tridiagonal system with rows
/// (sub[i], diag[i], sup[i]); throws SingularTridiagonal on breakdown.
/// Overwrites rhs with the solution.
void tridiag_solve(std::vector<double>& sub, std::vector<double>& diag,
                   std::vector<double>& sup, std::vector<double>& rhs);

/// Face velocities b_{i+1/2} = (b_i + b_{i+1})/2 on the n_x + 1 cell faces,
/// with one-sided extension at the two boundary faces.
std::vector<double> face_velocities(const std::vector<double>& b_nodes);

/// Conservative first-order upwind divergence of the advective flux b*rho
/// with zero-Dirichlet ghosts. Returns div F at the nodes; the two boundary
/// fluxes (mass per unit time leaving the domain) come back via out_flux.
std::vector<double> upwind_divergence(const std::vector<double>& rho,
                                      const std::vector<double>& b_faces, const Grid& g,
                                      double* out_flux_left, double* out_flux_right);

/// Same stencil applied to a flux perturbation: delta_b on the faces carried
/// by the upwind side of the base velocity sign (linearisation of the flux in
/// b), plus the base faces carrying a density perturbation.
std::vector<double> upwind_divergence_linearised(const std::vector<double>& rho_base,
                                                 const std::vector<double>& delta_rho,
                                                 const std::vector<double>& b_faces,
                                                 const std::vector<double>& delta_b_faces,
                                                 const Grid& g);

/// Implicit diffusion step: solves (I - dt * d^2/dx^2 (a .)) out = rhs with
/// zero-Dirichlet ghosts (Fokker-Planck divergence form).
std::vector<double> diffuse_implicit_dirichlet(const std::vector<double>& rhs,
                                               const std::vector<double>& a_nodes, const Grid& g);

/// Implicit diffusion step in non-divergence form: (I - dt * a d^2/dx^2) out = rhs
/// with copy-end (homogeneous Neumann) ghosts, as used by the backward solvers.
std::vector<double> diffuse_implicit_neumann(const std::vector<double>& rhs,
                                             const std::vector<double>& a_nodes, const Grid& g);

/// b . grad u with per-face upwinding against the drift sign (forward
/// difference where b > 0), copy-end ghosts.
std::vector<double> upwind_gradient_against(const std::vector<double>& u,
                                            const std::vector<double>& b_faces, const Grid& g);

} // namespace fpc::kernels
