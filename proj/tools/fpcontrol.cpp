// Scenario-driven command line for the Fokker-Planck control toolkit.
//
// Subcommands: forward, adjoint, hjb, picard, gradcheck, particles, compare, d0.
// Exit codes: 0 success, 2 configuration error, 3 solver failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fpc/adjoint.hpp"
#include "fpc/errors.hpp"
#include "fpc/forward.hpp"
#include "fpc/grid.hpp"
#include "fpc/io.hpp"
#include "fpc/model.hpp"
#include "fpc/particles.hpp"
#include "fpc/picard.hpp"
#include "fpc/scenario.hpp"
#include "fpc/sensitivity.hpp"

namespace {

namespace fs = std::filesystem;

struct CommonArgs {
    std::string config;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config, "scenario configuration (JSON)")->required();
    cmd->add_option("--out-dir", args.out_dir, "output directory");
    cmd->add_option("--seed", args.seed, "seed override");
    cmd->add_option("--override", args.overrides, "KEY=VALUE config override (repeatable)");
}

std::string out_path(const CommonArgs& args, const std::string& name) {
    return (fs::path(args.out_dir) / name).string();
}

struct Loaded {
    fpc::ScenarioConfig cfg;
    fpc::Grid grid;
    fpc::ModelSpec spec;
    fpc::Field rho0;
};

Loaded load(const CommonArgs& args) {
    Loaded l{fpc::load_scenario(args.config, args.overrides), {}, {}, {}};
    if (args.seed) l.cfg.seed = *args.seed;
    l.grid = l.cfg.make_grid_from_config();
    l.spec = fpc::bailout_model(l.cfg.bailout);
    l.rho0 = l.cfg.initial_density(l.grid);
    fs::create_directories(args.out_dir);
    return l;
}

int run_forward(const CommonArgs& args) {
    Loaded l = load(args);
    const fpc::ControlField gamma = fpc::ControlField::constant(l.grid, 0.0);
    const fpc::DensityPath rho = fpc::solve_forward(l.spec, gamma, l.grid, l.rho0);
    fpc::write_density_csv(out_path(args, "density.csv"), rho);
    fpc::write_control_csv(out_path(args, "control.csv"), gamma, l.grid);
    std::printf("forward: mass(0) = %.6f, mass(T) = %.6f, cost = %.6f\n", rho.mass.front(),
                rho.mass.back(), fpc::evaluate_cost_on_path(l.spec, rho, gamma));
    return 0;
}

int run_adjoint(const CommonArgs& args, bool hjb) {
    Loaded l = load(args);
    const fpc::ControlField gamma = fpc::ControlField::constant(l.grid, 0.0);
    const fpc::DensityPath rho = fpc::solve_forward(l.spec, gamma, l.grid, l.rho0);
    const fpc::AdjointPath u = hjb ? fpc::solve_hjb(l.spec, rho, l.grid)
                                   : fpc::solve_adjoint(l.spec, rho, gamma, l.grid);
    fpc::write_density_csv(out_path(args, "density.csv"), rho);
    fpc::write_adjoint_csv(out_path(args, "adjoint.csv"), u);
    if (hjb) {
        const fpc::ControlField extracted = fpc::extract_control(l.spec, u, 0.0, l.grid);
        fpc::write_control_csv(out_path(args, "control.csv"), extracted, l.grid);
        fpc::write_active_set_csv(out_path(args, "active_set.csv"), extracted, l.grid,
                                  l.spec.g_min, l.spec.g_max);
    }
    std::printf("%s: u range at t=0 is [%.6f, %.6f]\n", hjb ? "hjb" : "adjoint",
                *std::min_element(u.slice(0).begin(), u.slice(0).end()),
                *std::max_element(u.slice(0).begin(), u.slice(0).end()));
    return 0;
}

int run_picard(const CommonArgs& args) {
    Loaded l = load(args);
    const fpc::FbSolution sol = fpc::picard_solve(l.spec, l.grid, l.rho0, l.cfg.picard);
    fpc::write_density_csv(out_path(args, "density.csv"), sol.density);
    fpc::write_adjoint_csv(out_path(args, "adjoint.csv"), sol.adjoint);
    fpc::write_control_csv(out_path(args, "control.csv"), sol.control, l.grid);
    fpc::write_residuals_csv(out_path(args, "residuals.csv"), sol.residual_history,
                             sol.cost_history);
    fpc::write_active_set_csv(out_path(args, "active_set.csv"), sol.control, l.grid, l.spec.g_min,
                              l.spec.g_max);
    std::printf("picard: converged = %s, iterations = %zu, cost = %.8f\n",
                sol.converged ? "yes" : "no", sol.residual_history.size(), sol.cost);
    if (!sol.converged) {
        std::fprintf(stderr, "picard: iteration did not reach tol = %g within %d iterations\n",
                     l.cfg.picard.tol, l.cfg.picard.max_iters);
        return 3;
    }
    return 0;
}

int run_gradcheck(const CommonArgs& args) {
    Loaded l = load(args);
    const fpc::Grid& g = l.grid;

    // smooth interior control and a smooth admissible direction
    fpc::ControlField gamma = fpc::ControlField::constant(g, 0.5 * l.spec.g_max);
    fpc::Direction h = fpc::Direction::zero(g);
    const double amp = 0.25 * l.spec.g_max;
    for (int k = 0; k < g.n_t; ++k)
        for (int i = 0; i < g.n_x; ++i) {
            const double phase = 2.0 * 3.14159265358979324 *
                                 (g.time(k) / g.t_horizon + 0.37 * (l.cfg.seed % 97) / 97.0);
            h.at(k, i) = amp * std::sin(3.0 * g.node(i) + phase);
        }

    const fpc::DensityPath mu = fpc::solve_forward(l.spec, gamma, g, l.rho0);
    const fpc::AdjointPath u = fpc::solve_adjoint(l.spec, mu, gamma, g);
    fpc::GradCheckReport report;
    report.eps = l.cfg.gradcheck_eps;
    report.adjoint_value = fpc::gateaux_adjoint(l.spec, mu, u, gamma, h, g);
    report.fd_value = fpc::gateaux_fd(l.spec, gamma, h, report.eps, g, l.rho0);
    report.rel_err = std::abs(report.adjoint_value - report.fd_value) /
                     std::max(std::abs(report.fd_value), 1e-12);
    fpc::write_gradcheck_json(out_path(args, "gradcheck.json"), report);
    std::printf("gradcheck: adjoint = %.8g, fd = %.8g, rel_err = %.3g\n", report.adjoint_value,
                report.fd_value, report.rel_err);
    return 0;
}

int run_particles(const CommonArgs& args) {
    Loaded l = load(args);
    const fpc::ControlField gamma = fpc::ControlField::constant(l.grid, 0.0);
    fpc::NoisePath w;
    if (l.cfg.bailout.sigma0 > 0.0)
        w = fpc::sample_brownian(l.grid, l.cfg.seed + 7);
    else
        w.values.assign(l.grid.n_t + 1, 0.0);
    const fpc::ParticleTrajectory traj =
        fpc::simulate(l.cfg.bailout, gamma, w, l.cfg.n_particles, l.cfg.seed, l.grid);
    fpc::write_particles_csv(out_path(args, "particles_summary.csv"), traj.stats);
    std::printf("particles: n = %d, L(T) = %.6f, cost = %.6f\n", l.cfg.n_particles,
                traj.stats.loss.back(), traj.running_cost + traj.stats.loss.back());
    return 0;
}

int run_compare(const CommonArgs& args) {
    Loaded l = load(args);
    const fpc::Grid& g = l.grid;
    const fpc::ControlField gamma = fpc::ControlField::constant(g, 0.0);

    fpc::NoisePath w;
    w.values.assign(g.n_t + 1, 0.0);
    fpc::ModelSpec spec = l.spec;
    if (l.cfg.bailout.sigma0 > 0.0) {
        w = fpc::sample_brownian(g, l.cfg.seed + 7);
        spec = fpc::shift_model(l.spec, w, g);
    }
    fpc::DensityPath rho = fpc::solve_forward(spec, gamma, g, l.rho0);
    if (l.cfg.bailout.sigma0 > 0.0)
        rho = fpc::pushforward(rho, w, l.cfg.bailout.sigma0, l.cfg.pushforward_margin);

    const fpc::ParticleTrajectory traj =
        fpc::simulate(l.cfg.bailout, gamma, w, l.cfg.n_particles, l.cfg.seed, g);
    const fpc::Field emp = fpc::empirical_density(traj.final_state, g);
    const double d0 = fpc::flat_distance(emp, rho.slice_field(g.n_t), g);

    fpc::write_particles_csv(out_path(args, "particles_summary.csv"), traj.stats);
    fpc::write_density_csv(out_path(args, "density.csv"), rho);
    nlohmann::ordered_json j;
    j["flat_distance_T"] = d0;
    j["pde_mass_T"] = rho.mass.back();
    j["particle_mass_T"] = traj.stats.mass.back();
    std::ofstream out(out_path(args, "compare.json"), std::ios::binary);
    out << j.dump(2) << "\n";
    std::printf("compare: d0(particles, pde) at T = %.6f\n", d0);
    return 0;
}

int run_d0(const CommonArgs& args) {
    Loaded l = load(args);
    if (l.cfg.d0_file_a.empty() || l.cfg.d0_file_b.empty())
        throw fpc::ConfigError("d0 needs config keys d0_file_a and d0_file_b");
    const fpc::DensityPath a = fpc::read_density_csv(l.cfg.d0_file_a, l.grid);
    const fpc::DensityPath b = fpc::read_density_csv(l.cfg.d0_file_b, l.grid);
    const std::string out = out_path(args, "d0.csv");
    std::FILE* f = std::fopen(out.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot open " + out);
    std::fputs("t,d0\n", f);
    for (int k = 0; k <= l.grid.n_t; ++k)
        std::fprintf(f, "%.17g,%.17g\n", l.grid.time(k),
                     fpc::flat_distance(a.slice_field(k), b.slice_field(k), l.grid));
    std::fclose(f);
    std::printf("d0: wrote %s\n", out.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal control of nonlinear Fokker-Planck equations"};
    app.require_subcommand(1);

    CommonArgs args;
    CLI::App* c_forward = app.add_subcommand("forward", "uncontrolled forward density solve");
    CLI::App* c_adjoint = app.add_subcommand("adjoint", "linear adjoint solve (gamma = 0)");
    CLI::App* c_hjb = app.add_subcommand("hjb", "semilinear HJB solve against gamma = 0 density");
    CLI::App* c_picard = app.add_subcommand("picard", "forward-backward Picard iteration");
    CLI::App* c_grad = app.add_subcommand("gradcheck", "adjoint vs finite-difference gradient");
    CLI::App* c_part = app.add_subcommand("particles", "McKean-Vlasov particle simulation");
    CLI::App* c_comp = app.add_subcommand("compare", "particle system vs PDE density");
    CLI::App* c_d0 = app.add_subcommand("d0", "flat distance between two density CSVs");
    for (CLI::App* c : {c_forward, c_adjoint, c_hjb, c_picard, c_grad, c_part, c_comp, c_d0})
        add_common(c, args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_forward->parsed()) return run_forward(args);
        if (c_adjoint->parsed()) return run_adjoint(args, false);
        if (c_hjb->parsed()) return run_adjoint(args, true);
        if (c_picard->parsed()) return run_picard(args);
        if (c_grad->parsed()) return run_gradcheck(args);
        if (c_part->parsed()) return run_particles(args);
        if (c_comp->parsed()) return run_compare(args);
        if (c_d0->parsed()) return run_d0(args);
    } catch (const fpc::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        return 3;
    }
    return 0;
}
