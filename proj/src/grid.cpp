#include "fpc/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fpc/errors.hpp"
#include "fpc/rng.hpp"

namespace fpc {

namespace {

void require_on_grid(const Field& f, const Grid& g, const char* name) {
    if (static_cast<int>(f.size()) != g.n_x)
        throw DimensionMismatch(std::string(name) + ": field length " + std::to_string(f.size()) +
                                " does not match n_x = " + std::to_string(g.n_x));
}

} // namespace

Grid make_grid(double x_min, double x_max, int n_x, double t_horizon, int n_t, double eta0) {
    if (!(x_min < x_max)) throw std::invalid_argument("make_grid: x_min must be < x_max");
    if (n_x < 3) throw std::invalid_argument("make_grid: n_x must be >= 3");
    if (n_t < 1) throw std::invalid_argument("make_grid: n_t must be >= 1");
    if (!(t_horizon > 0.0)) throw std::invalid_argument("make_grid: t_horizon must be > 0");
    if (eta0 < 0.0) throw std::invalid_argument("make_grid: eta0 must be >= 0");

    Grid g;
    g.x_min = x_min;
    g.x_max = x_max;
    g.n_x = n_x;
    g.dx = (x_max - x_min) / (n_x + 1);
    g.t_horizon = t_horizon;
    g.n_t = n_t;
    g.dt = t_horizon / n_t;
    g.eta0 = eta0;
    g.nodes.resize(n_x);
    g.weights.resize(n_x);
    for (int i = 0; i < n_x; ++i) {
        const double x = x_min + (i + 1) * g.dx;
        g.nodes[i] = x;
        g.weights[i] = std::exp(eta0 * std::sqrt(1.0 + x * x));
        if (!std::isfinite(g.weights[i]))
            throw std::invalid_argument("make_grid: weight overflow; reduce eta0 or the domain");
    }
    return g;
}

double weighted_norm(const Field& f, const Grid& g) {
    require_on_grid(f, g, "weighted_norm");
    double acc = 0.0;
    for (int i = 0; i < g.n_x; ++i) acc += f[i] * f[i] * g.weights[i];
    return std::sqrt(acc * g.dx);
}

double pair_fields(const Field& v, const Field& phi, const Grid& g) {
    require_on_grid(v, g, "pair_fields");
    require_on_grid(phi, g, "pair_fields");
    double acc = 0.0;
    for (int i = 0; i < g.n_x; ++i) acc += v[i] * phi[i];
    return acc * g.dx;
}

double total_mass(const Field& v, const Grid& g) {
    require_on_grid(v, g, "total_mass");
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc * g.dx;
}

double boundary_mass(const Field& v, const Grid& g, int margin) {
    require_on_grid(v, g, "boundary_mass");
    margin = std::min(margin, g.n_x / 2);
    double acc = 0.0;
    for (int i = 0; i < margin; ++i) acc += v[i] + v[g.n_x - 1 - i];
    return acc * g.dx;
}

Field gradient_fd(const Field& f, const Grid& g) {
    require_on_grid(f, g, "gradient_fd");
    const int n = g.n_x;
    Field out(n);
    out[0] = (f[1] - f[0]) / g.dx;
    out[n - 1] = (f[n - 1] - f[n - 2]) / g.dx;
    for (int i = 1; i < n - 1; ++i) out[i] = (f[i + 1] - f[i - 1]) / (2.0 * g.dx);
    return out;
}

// The d0 LP is solved exactly by dynamic programming over a value lattice.
// At any vertex of the feasible polytope {|phi_i| <= 1, |phi_{i+1}-phi_i| <= dx}
// every chain of active difference constraints is pinned to +-1 somewhere, so
// an optimal phi exists with all values in {-1 + k dx} u {1 - k dx}. The DP
// scans nodes left to right keeping the best objective for each lattice value.
double flat_distance(const Field& v1, const Field& v2, const Grid& g) {
    require_on_grid(v1, g, "flat_distance");
    require_on_grid(v2, g, "flat_distance");
    for (int i = 0; i < g.n_x; ++i) {
        if (v1[i] < 0.0 || v2[i] < 0.0)
            throw NegativeInput("flat_distance: inputs must be nonnegative grid measures");
    }

    const int n = g.n_x;
    const double dx = g.dx;

    std::vector<double> lattice;
    const int steps = static_cast<int>(std::floor(2.0 / dx)) + 1;
    lattice.reserve(2 * static_cast<std::size_t>(steps));
    for (int k = 0; k < steps; ++k) {
        const double a = -1.0 + k * dx;
        const double b = 1.0 - k * dx;
        if (a <= 1.0) lattice.push_back(a);
        if (b >= -1.0) lattice.push_back(b);
    }
    lattice.push_back(1.0);
    lattice.push_back(-1.0);
    std::sort(lattice.begin(), lattice.end());
    lattice.erase(std::unique(lattice.begin(), lattice.end(),
                              [dx](double a, double b) { return std::abs(a - b) < 1e-9 * dx; }),
                  lattice.end());
    const int m = static_cast<int>(lattice.size());
    const double step_tol = dx * (1.0 + 1e-9);

    std::vector<double> best(m), next(m);
    for (int j = 0; j < m; ++j) best[j] = lattice[j] * (v1[0] - v2[0]) * dx;

    for (int i = 1; i < n; ++i) {
        const double coeff = (v1[i] - v2[i]) * dx;
        // window of predecessors within one dx; two-pointer over the sorted lattice
        int lo = 0, hi = 0;
        for (int j = 0; j < m; ++j) {
            while (lo < m && lattice[lo] < lattice[j] - step_tol) ++lo;
            while (hi < m && lattice[hi] <= lattice[j] + step_tol) ++hi;
            double w = best[lo];
            for (int p = lo + 1; p < hi; ++p) w = std::max(w, best[p]);
            next[j] = w + lattice[j] * coeff;
        }
        std::swap(best, next);
    }
    double out = best[0];
    for (int j = 1; j < m; ++j) out = std::max(out, best[j]);
    return std::max(out, 0.0);
}

NoisePath sample_brownian(const Grid& g, std::uint64_t seed) {
    NoisePath path;
    path.seed = seed;
    path.values.resize(g.n_t + 1);
    path.values[0] = 0.0;
    const double sq_dt = std::sqrt(g.dt);
    for (int k = 0; k < g.n_t; ++k)
        path.values[k + 1] = path.values[k] + sq_dt * counter_normal(seed, 0, k, 0);
    return path;
}

Field shift_measure(const Field& f, double shift, const Grid& g) {
    require_on_grid(f, g, "shift_measure");
    Field out(g.n_x, 0.0);
    // snap shifts that are integer multiples of dx so they stay exact
    const double cells = shift / g.dx;
    const bool integral = std::abs(cells - std::round(cells)) < 1e-9;
    const int whole = static_cast<int>(std::round(cells));
    for (int i = 0; i < g.n_x; ++i) {
        if (integral) {
            const int j = i - whole;
            out[i] = (j >= 0 && j < g.n_x) ? f[j] : 0.0;
            continue;
        }
        const double s = (g.node(i) - shift - g.node(0)) / g.dx;
        const int j = static_cast<int>(std::floor(s));
        const double frac = s - j;
        if (j >= 0 && j + 1 < g.n_x) {
            out[i] = (1.0 - frac) * f[j] + frac * f[j + 1];
        } else if (j == -1) {
            out[i] = frac * f[0];
        } else if (j == g.n_x - 1) {
            out[i] = (1.0 - frac) * f[g.n_x - 1];
        }
    }
    return out;
}

Field gaussian_density(const Grid& g, double mean, double sd) {
    if (!(sd > 0.0)) throw std::invalid_argument("gaussian_density: sd must be > 0");
    Field f(g.n_x);
    const double norm = 1.0 / (sd * std::sqrt(2.0 * 3.141592653589793238462643383279));
    for (int i = 0; i < g.n_x; ++i) {
        const double z = (g.node(i) - mean) / sd;
        f[i] = norm * std::exp(-0.5 * z * z);
    }
    return f;
}

} // namespace fpc
