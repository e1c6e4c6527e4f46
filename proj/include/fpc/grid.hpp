#pragma once

#include <cstdint>
#include <vector>

namespace fpc {

/// Node values of a function or density on the interior nodes of a Grid.
using Field = std::vector<double>;

/// Uniform 1-D space-time mesh on [x_min, x_max] x [0, t_horizon].
///
/// Space is truncated with homogeneous Dirichlet ends: the n_x stored nodes
/// are interior, x_i = x_min + (i+1)*dx with dx = (x_max - x_min)/(n_x + 1).
/// The weight w_i = exp(eta0 * sqrt(1 + x_i^2)) defines the weighted L2 norm
/// used for energy diagnostics.
struct Grid {
    double x_min = 0.0;
    double x_max = 0.0;
    int n_x = 0;
    double dx = 0.0;
    double t_horizon = 0.0;
    int n_t = 0;
    double dt = 0.0;
    double eta0 = 0.0;

    std::vector<double> nodes;   // interior node coordinates, strictly increasing
    std::vector<double> weights; // exp(eta(x_i)), all >= 1 for eta0 >= 0

    double node(int i) const { return nodes[static_cast<std::size_t>(i)]; }
    double time(int k) const { return dt * k; }
};

/// Sampled Brownian path on the grid's time nodes, values[0] = 0.
struct NoisePath {
    std::vector<double> values;
    std::uint64_t seed = 0;
};

Grid make_grid(double x_min, double x_max, int n_x, double t_horizon, int n_t, double eta0 = 0.1);

/// Discrete weighted L2 norm: sqrt(sum f_i^2 exp(eta(x_i)) dx).
double weighted_norm(const Field& f, const Grid& g);

/// Duality pairing <v, phi> = sum v_i phi_i dx.
double pair_fields(const Field& v, const Field& phi, const Grid& g);

/// Total mass <v, 1>.
double total_mass(const Field& v, const Grid& g);

/// Mass sitting within `margin` nodes of either end; diagnostic for whether
/// the Dirichlet truncation of the real line is wide enough.
double boundary_mass(const Field& v, const Grid& g, int margin = 5);

/// Central differences at interior nodes, one-sided at the two extreme nodes.
Field gradient_fd(const Field& f, const Grid& g);

/// Bounded Lipschitz distance d0 between two nonnegative grid measures:
/// the exact optimum of    max sum phi_i (v1_i - v2_i) dx
/// over |phi_i| <= 1, |phi_{i+1} - phi_i| <= dx.
double flat_distance(const Field& v1, const Field& v2, const Grid& g);

/// Brownian path with independent N(0, dt) increments; deterministic in seed.
NoisePath sample_brownian(const Grid& g, std::uint64_t seed);

/// Pushforward (id + shift)^# of a grid measure by linear interpolation.
/// Each source node splits its value between the two enclosing target nodes,
/// so interior mass is conserved exactly; mass shifted past the ends is lost.
Field shift_measure(const Field& f, double shift, const Grid& g);

/// Gaussian density values at the grid nodes (not renormalised after truncation).
Field gaussian_density(const Grid& g, double mean, double sd);

} // namespace fpc
