#include "fpc/io.hpp"

#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "fpc/errors.hpp"

#include <json.hpp>

namespace fpc {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_or_throw(const std::string& path) {
    FilePtr f(std::fopen(path.c_str(), "wb"));
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    return f;
}

} // namespace

void write_density_csv(const std::string& path, const DensityPath& rho) {
    FilePtr f = open_or_throw(path);
    std::fputs("t,x,rho\n", f.get());
    const Grid& g = rho.grid;
    for (int k = 0; k <= g.n_t; ++k) {
        const auto s = rho.slice(k);
        for (int i = 0; i < g.n_x; ++i)
            std::fprintf(f.get(), "%.17g,%.17g,%.17g\n", g.time(k), g.node(i), s[i]);
    }
}

void write_adjoint_csv(const std::string& path, const AdjointPath& u) {
    FilePtr f = open_or_throw(path);
    std::fputs("t,x,u,du_dx\n", f.get());
    const Grid& g = u.grid;
    for (int k = 0; k <= g.n_t; ++k) {
        const auto s = u.slice(k);
        const Field gu = u.grad_field(k);
        for (int i = 0; i < g.n_x; ++i)
            std::fprintf(f.get(), "%.17g,%.17g,%.17g,%.17g\n", g.time(k), g.node(i), s[i], gu[i]);
    }
}

void write_control_csv(const std::string& path, const ControlField& gamma, const Grid& g) {
    FilePtr f = open_or_throw(path);
    std::fputs("t,x,gamma\n", f.get());
    for (int k = 0; k < gamma.n_t; ++k)
        for (int i = 0; i < gamma.n_x; ++i)
            std::fprintf(f.get(), "%.17g,%.17g,%.17g\n", g.time(k), g.node(i), gamma.at(k, i));
}

void write_residuals_csv(const std::string& path, const std::vector<double>& residuals,
                         const std::vector<double>& costs) {
    FilePtr f = open_or_throw(path);
    std::fputs("iter,residual,cost\n", f.get());
    for (std::size_t k = 0; k < residuals.size(); ++k) {
        const double cost = (k < costs.size()) ? costs[k] : 0.0;
        std::fprintf(f.get(), "%zu,%.17g,%.17g\n", k, residuals[k], cost);
    }
}

void write_active_set_csv(const std::string& path, const ControlField& gamma, const Grid& g,
                          double g_min, double g_max) {
    FilePtr f = open_or_throw(path);
    std::fputs("t,a,b\n", f.get());
    const double threshold = 0.5 * (g_min + g_max);
    for (int k = 0; k < gamma.n_t; ++k) {
        int first = -1, last = -1;
        for (int i = 0; i < gamma.n_x; ++i) {
            if (gamma.at(k, i) > threshold) {
                if (first < 0) first = i;
                last = i;
            }
        }
        if (first < 0)
            std::fprintf(f.get(), "%.17g,,\n", g.time(k));
        else
            std::fprintf(f.get(), "%.17g,%.17g,%.17g\n", g.time(k), g.node(first), g.node(last));
    }
}

void write_particles_csv(const std::string& path, const ParticleStats& stats) {
    FilePtr f = open_or_throw(path);
    std::fputs("t,mass,L,mean_X\n", f.get());
    for (std::size_t k = 0; k < stats.t.size(); ++k)
        std::fprintf(f.get(), "%.17g,%.17g,%.17g,%.17g\n", stats.t[k], stats.mass[k],
                     stats.loss[k], stats.mean_x[k]);
}

void write_gradcheck_json(const std::string& path, const GradCheckReport& report) {
    nlohmann::ordered_json j;
    j["adjoint_value"] = report.adjoint_value;
    j["fd_value"] = report.fd_value;
    j["eps"] = report.eps;
    j["rel_err"] = report.rel_err;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << j.dump(2) << "\n";
}

DensityPath read_density_csv(const std::string& path, const Grid& g) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != "t,x,rho")
        throw std::runtime_error(path + ": expected header t,x,rho");

    DensityPath out;
    out.grid = g;
    out.slices.assign(static_cast<std::size_t>(g.n_t + 1) * g.n_x, 0.0);
    out.mass.assign(g.n_t + 1, 0.0);
    out.zeroth_rate.assign(g.n_t + 1, 0.0);
    out.leakage.assign(g.n_t, 0.0);
    out.eta_norm.assign(g.n_t + 1, 0.0);

    std::size_t row = 0;
    const std::size_t expected = static_cast<std::size_t>(g.n_t + 1) * g.n_x;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (row >= expected) throw std::runtime_error(path + ": more rows than the grid allows");
        std::istringstream ss(line);
        double t, x, rho;
        char c1, c2;
        if (!(ss >> t >> c1 >> x >> c2 >> rho) || c1 != ',' || c2 != ',')
            throw std::runtime_error(path + ": malformed row '" + line + "'");
        out.slices[row++] = rho;
    }
    if (row != expected)
        throw std::runtime_error(path + ": expected " + std::to_string(expected) + " rows, got " +
                                 std::to_string(row));
    for (int k = 0; k <= g.n_t; ++k) {
        out.mass[k] = total_mass(out.slice_field(k), g);
        out.eta_norm[k] = weighted_norm(out.slice_field(k), g);
    }
    return out;
}

} // namespace fpc
