#pragma once

#include <string>
#include <vector>

#include "fpc/adjoint.hpp"
#include "fpc/forward.hpp"
#include "fpc/grid.hpp"
#include "fpc/model.hpp"
#include "fpc/particles.hpp"

namespace fpc {

// All writers emit a header row and "%.17g"-formatted numbers so identical
// inputs produce byte-identical files.

void write_density_csv(const std::string& path, const DensityPath& rho);          // t,x,rho
void write_adjoint_csv(const std::string& path, const AdjointPath& u);            // t,x,u,du_dx
void write_control_csv(const std::string& path, const ControlField& gamma, const Grid& g); // t,x,gamma

/// iter,residual,cost
void write_residuals_csv(const std::string& path, const std::vector<double>& residuals,
                         const std::vector<double>& costs);

/// t,a,b: extent of the active set {gamma = g_max} per time step; empty
/// fields when the controller is idle at that time.
void write_active_set_csv(const std::string& path, const ControlField& gamma, const Grid& g,
                          double g_min, double g_max);

void write_particles_csv(const std::string& path, const ParticleStats& stats); // t,mass,L,mean_X

struct GradCheckReport {
    double adjoint_value = 0.0;
    double fd_value = 0.0;
    double eps = 0.0;
    double rel_err = 0.0;
};

void write_gradcheck_json(const std::string& path, const GradCheckReport& report);

/// Parses a density CSV produced by write_density_csv back into a path on the
/// given grid (used by the d0 subcommand).
DensityPath read_density_csv(const std::string& path, const Grid& g);

} // namespace fpc
