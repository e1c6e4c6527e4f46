#include "fpc/kernels.hpp"

#include <cmath>

#include "fpc/errors.hpp"

namespace fpc::kernels {

void tridiag_solve(std::vector<double>& sub, std::vector<double>& diag,
                   std::vector<double>& sup, std::vector<double>& rhs) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        if (std::abs(diag[i - 1]) < 1e-300)
            throw SingularTridiagonal("tridiag_solve: zero pivot");
        const double m = sub[i] / diag[i - 1];
        diag[i] -= m * sup[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    if (std::abs(diag[n - 1]) < 1e-300) throw SingularTridiagonal("tridiag_solve: zero pivot");
    rhs[n - 1] /= diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - sup[i] * rhs[i + 1]) / diag[i];
}

std::vector<double> face_velocities(const std::vector<double>& b_nodes) {
    const std::size_t n = b_nodes.size();
    std::vector<double> faces(n + 1);
    faces[0] = b_nodes[0];
    faces[n] = b_nodes[n - 1];
    for (std::size_t f = 1; f < n; ++f) faces[f] = 0.5 * (b_nodes[f - 1] + b_nodes[f]);
    return faces;
}

std::vector<double> upwind_divergence(const std::vector<double>& rho,
                                      const std::vector<double>& b_faces, const Grid& g,
                                      double* out_flux_left, double* out_flux_right) {
    const int n = g.n_x;
    std::vector<double> flux(n + 1);
    for (int f = 0; f <= n; ++f) {
        const double b = b_faces[f];
        const double left = (f > 0) ? rho[f - 1] : 0.0;
        const double right = (f < n) ? rho[f] : 0.0;
        flux[f] = (b > 0.0) ? b * left : b * right;
    }
    if (out_flux_left) *out_flux_left = -flux[0];
    if (out_flux_right) *out_flux_right = flux[n];
    std::vector<double> div(n);
    for (int i = 0; i < n; ++i) div[i] = (flux[i + 1] - flux[i]) / g.dx;
    return div;
}

std::vector<double> upwind_divergence_linearised(const std::vector<double>& rho_base,
                                                 const std::vector<double>& delta_rho,
                                                 const std::vector<double>& b_faces,
                                                 const std::vector<double>& delta_b_faces,
                                                 const Grid& g) {
    const int n = g.n_x;
    std::vector<double> flux(n + 1);
    for (int f = 0; f <= n; ++f) {
        const double b = b_faces[f];
        const double base_l = (f > 0) ? rho_base[f - 1] : 0.0;
        const double base_r = (f < n) ? rho_base[f] : 0.0;
        const double d_l = (f > 0) ? delta_rho[f - 1] : 0.0;
        const double d_r = (f < n) ? delta_rho[f] : 0.0;
        double upwind_base;
        if (b > 0.0)
            upwind_base = base_l;
        else if (b < 0.0)
            upwind_base = base_r;
        else
            upwind_base = 0.5 * (base_l + base_r);
        flux[f] = delta_b_faces[f] * upwind_base + ((b > 0.0) ? b * d_l : b * d_r);
    }
    std::vector<double> div(n);
    for (int i = 0; i < n; ++i) div[i] = (flux[i + 1] - flux[i]) / g.dx;
    return div;
}

std::vector<double> diffuse_implicit_dirichlet(const std::vector<double>& rhs,
                                               const std::vector<double>& a_nodes, const Grid& g) {
    const int n = g.n_x;
    const double r = g.dt / (g.dx * g.dx);
    std::vector<double> sub(n), diag(n), sup(n), x = rhs;
    for (int i = 0; i < n; ++i) {
        diag[i] = 1.0 + 2.0 * r * a_nodes[i];
        sub[i] = (i > 0) ? -r * a_nodes[i - 1] : 0.0;
        sup[i] = (i < n - 1) ? -r * a_nodes[i + 1] : 0.0;
    }
    tridiag_solve(sub, diag, sup, x);
    return x;
}

std::vector<double> diffuse_implicit_neumann(const std::vector<double>& rhs,
                                             const std::vector<double>& a_nodes, const Grid& g) {
    const int n = g.n_x;
    const double r = g.dt / (g.dx * g.dx);
    std::vector<double> sub(n), diag(n), sup(n), x = rhs;
    for (int i = 0; i < n; ++i) {
        const double ra = r * a_nodes[i];
        const bool interior = (i > 0 && i < n - 1);
        diag[i] = 1.0 + (interior ? 2.0 : 1.0) * ra;
        sub[i] = (i > 0) ? -ra : 0.0;
        sup[i] = (i < n - 1) ? -ra : 0.0;
    }
    tridiag_solve(sub, diag, sup, x);
    return x;
}

std::vector<double> upwind_gradient_against(const std::vector<double>& u,
                                            const std::vector<double>& b_faces, const Grid& g) {
    const int n = g.n_x;
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) {
        const double bp = std::max(b_faces[i + 1], 0.0);
        const double bm = std::min(b_faces[i], 0.0);
        const double fwd = (i + 1 < n) ? (u[i + 1] - u[i]) / g.dx : 0.0;
        const double bwd = (i > 0) ? (u[i] - u[i - 1]) / g.dx : 0.0;
        out[i] = bp * fwd + bm * bwd;
    }
    return out;
}

} // namespace fpc::kernels
