#include "fpc/model.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include "fpc/errors.hpp"

namespace fpc {

std::vector<double> ModelSpec::summaries(double t, const Field& mu, const Grid& g) const {
    if (static_cast<int>(mu.size()) != g.n_x)
        throw DimensionMismatch("ModelSpec::summaries: field does not match grid");
    std::vector<double> out(summary_integrands.size());
    for (std::size_t k = 0; k < summary_integrands.size(); ++k) {
        double acc = 0.0;
        for (int i = 0; i < g.n_x; ++i) acc += mu[i] * summary_integrands[k](t, g.node(i));
        out[k] = acc * g.dx;
    }
    return out;
}

void ModelSpec::validate(const Grid& g) const {
    if (!(g_min <= g_max)) throw std::invalid_argument("ModelSpec: g_min must be <= g_max");
    if (!(diffusion_floor > 0.0))
        throw std::invalid_argument("ModelSpec: diffusion_floor must be > 0");
    for (int k = 0; k <= g.n_t; k += std::max(1, g.n_t / 8)) {
        const double t = g.time(k);
        for (int i = 0; i < g.n_x; i += std::max(1, g.n_x / 16)) {
            const double a = diffusion(t, g.node(i));
            if (!(a >= diffusion_floor))
                throw std::invalid_argument("ModelSpec: diffusion below declared floor at t=" +
                                            std::to_string(t) + ", x=" + std::to_string(g.node(i)));
        }
    }
}

ModelSpec zero_model() {
    ModelSpec m;
    m.lambda_coeff = [](double, double, Summary) { return 0.0; };
    m.drift0 = [](double, double, Summary) { return 0.0; };
    m.drift1_slope = [](double, double) { return 0.0; };
    m.diffusion = [](double, double) { return 0.0; };
    m.run_cost0 = [](double, double, Summary) { return 0.0; };
    m.run_cost1 = [](double, double, double) { return 0.0; };
    m.run_cost1_grad = [](double, double, double) { return 0.0; };
    m.terminal_density_derivative = [](double, const Field&, const Grid&) { return 0.0; };
    m.terminal_cost = [](const Field&, const Grid&) { return 0.0; };
    m.has_measure_derivatives = false;
    m.d_lambda = [](double, double, Summary, double) { return 0.0; };
    m.d_drift0 = [](double, double, Summary, double) { return 0.0; };
    m.d_run_cost0 = [](double, double, Summary, double) { return 0.0; };
    return m;
}

double bailout_hazard(const BailoutParams& p, double x) {
    if (x >= 0.0) return 0.0;
    return p.hazard_max * (1.0 - std::exp(x / p.hazard_scale));
}

ModelSpec bailout_model(const BailoutParams& p) {
    if (!(p.sigma > 0.0)) throw std::invalid_argument("bailout_model: sigma must be > 0");
    if (!(p.w_weight > 0.0)) throw std::invalid_argument("bailout_model: w_weight must be > 0");
    if (!(p.g_max > 0.0)) throw std::invalid_argument("bailout_model: g_max must be > 0");
    if (p.sigma0 < 0.0) throw std::invalid_argument("bailout_model: sigma0 must be >= 0");
    if (p.kappa < 0.0) throw std::invalid_argument("bailout_model: kappa must be >= 0");
    if (!(p.hazard_max > 0.0 && p.hazard_scale > 0.0))
        throw std::invalid_argument("bailout_model: hazard shape parameters must be > 0");

    const double kappa = p.kappa;
    const double w = p.w_weight;
    const double half_sig2 = 0.5 * p.sigma * p.sigma;
    auto hazard = [p](double x) { return bailout_hazard(p, x); };

    ModelSpec m = zero_model();
    // summary 0: <mu, hazard>, the aggregate default intensity
    m.summary_integrands = {[hazard](double, double x) { return hazard(x); }};
    m.lambda_coeff = [hazard](double, double x, Summary) { return -hazard(x); };
    m.drift0 = [kappa](double, double, Summary ms) { return -kappa * ms[0]; };
    m.drift1_slope = [](double, double) { return 1.0; };
    m.diffusion = [half_sig2](double, double) { return half_sig2; };
    m.diffusion_floor = half_sig2;
    m.sigma0 = p.sigma0;
    m.run_cost1 = [w](double, double, double g) { return w * g; };
    m.run_cost1_grad = [w](double, double, double) { return w; };
    m.terminal_density_derivative = [](double, const Field&, const Grid&) { return -1.0; };
    m.terminal_cost = [](const Field& mu_T, const Grid& g) { return 1.0 - total_mass(mu_T, g); };
    m.has_measure_derivatives = (kappa != 0.0);
    m.d_drift0 = [kappa, hazard](double, double, Summary, double y) { return -kappa * hazard(y); };
    m.g_min = 0.0;
    m.g_max = p.g_max;
    return m;
}

ControlField ControlField::constant(const Grid& g, double value) {
    ControlField c;
    c.n_t = g.n_t;
    c.n_x = g.n_x;
    c.values.assign(static_cast<std::size_t>(g.n_t) * g.n_x, value);
    return c;
}

void ControlField::check_admissible(const ModelSpec& spec) const {
    for (double v : values) {
        if (v < spec.g_min || v > spec.g_max)
            throw ControlOutOfRange("ControlField: entry " + std::to_string(v) +
                                    " outside G = [" + std::to_string(spec.g_min) + ", " +
                                    std::to_string(spec.g_max) + "]");
    }
}

double hamiltonian_h1(const ModelSpec& spec, double t, double x, double p, double g) {
    if (g < spec.g_min || g > spec.g_max)
        throw ControlOutOfRange("hamiltonian_h1: control outside G");
    return spec.drift1_slope(t, x) * g * p + spec.run_cost1(t, x, g);
}

double minimize_h1(const ModelSpec& spec, double t, double x, double p) {
    const double lo = spec.g_min, hi = spec.g_max;
    if (hi <= lo) return lo;
    auto h1 = [&](double g) { return spec.drift1_slope(t, x) * g * p + spec.run_cost1(t, x, g); };

    // H1 is affine-plus-convex in g; golden-section narrows to any interior
    // minimum, the endpoints cover the affine case.
    const double inv_phi = 0.6180339887498948482;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = h1(c), fd = h1(d);
    for (int iter = 0; iter < 100 && (b - a) > 1e-12 * (hi - lo); ++iter) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - inv_phi * (b - a);
            fc = h1(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + inv_phi * (b - a);
            fd = h1(d);
        }
    }
    const double interior = 0.5 * (a + b);
    double best = hi;
    double best_val = h1(hi);
    for (double cand : {interior, lo}) {
        const double val = h1(cand);
        if (val < best_val) {
            best = cand;
            best_val = val;
        }
    }
    return best;
}

Field dH(const ModelSpec& spec, double t, const Field& mu, const Field& u,
         const Field& grad_u, const Field& gamma, const Grid& g) {
    const int n = g.n_x;
    if (static_cast<int>(mu.size()) != n || static_cast<int>(u.size()) != n ||
        static_cast<int>(grad_u.size()) != n || static_cast<int>(gamma.size()) != n)
        throw DimensionMismatch("dH: field does not match grid");

    const std::vector<double> ms = spec.summaries(t, mu, g);
    Field out(n);
    for (int i = 0; i < n; ++i) {
        const double x = g.node(i);
        const double b = spec.drift0(t, x, ms) + spec.drift1_slope(t, x) * gamma[i];
        const double f = spec.run_cost0(t, x, ms) + spec.run_cost1(t, x, gamma[i]);
        double nonlocal = 0.0;
        if (spec.has_measure_derivatives) {
            for (int j = 0; j < n; ++j) {
                const double y = g.node(j);
                nonlocal += mu[j] * (spec.d_lambda(t, y, ms, x) * u[j] +
                                     spec.d_drift0(t, y, ms, x) * grad_u[j] +
                                     spec.d_run_cost0(t, y, ms, x));
            }
        }
        out[i] = spec.lambda_coeff(t, x, ms) * u[i] + b * grad_u[i] + f + nonlocal * g.dx;
    }
    return out;
}

namespace {

// Linear interpolation of W on the path's time nodes; t is clamped to [0, T].
double noise_at(const NoisePath& w, const Grid& g, double t) {
    const double s = std::clamp(t / g.dt, 0.0, static_cast<double>(g.n_t));
    const int k = std::min(static_cast<int>(s), g.n_t - 1);
    const double frac = s - k;
    return (1.0 - frac) * w.values[k] + frac * w.values[k + 1];
}

} // namespace

ModelSpec shift_model(const ModelSpec& spec, const NoisePath& wpath, const Grid& g) {
    if (static_cast<int>(wpath.values.size()) != g.n_t + 1)
        throw TimeGridMismatch("shift_model: noise path has " +
                               std::to_string(wpath.values.size()) + " values, expected " +
                               std::to_string(g.n_t + 1));
    if (spec.sigma0 == 0.0) return spec;

    const double sigma0 = spec.sigma0;
    const auto base = std::make_shared<const ModelSpec>(spec);
    const auto path = std::make_shared<const NoisePath>(wpath);
    const Grid grid = g;
    auto shift_at = [base, path, grid, sigma0](double t) {
        return sigma0 * noise_at(*path, grid, t);
    };

    ModelSpec out = spec;
    out.sigma0 = 0.0;
    out.summary_integrands.clear();
    for (std::size_t k = 0; k < spec.summary_integrands.size(); ++k) {
        out.summary_integrands.push_back(
            [base, shift_at, k](double t, double x) {
                return base->summary_integrands[k](t, x + shift_at(t));
            });
    }
    out.lambda_coeff = [base, shift_at](double t, double x, Summary ms) {
        return base->lambda_coeff(t, x + shift_at(t), ms);
    };
    out.drift0 = [base, shift_at](double t, double x, Summary ms) {
        return base->drift0(t, x + shift_at(t), ms);
    };
    out.drift1_slope = [base, shift_at](double t, double x) {
        return base->drift1_slope(t, x + shift_at(t));
    };
    out.diffusion = [base, shift_at](double t, double x) {
        return base->diffusion(t, x + shift_at(t));
    };
    out.run_cost0 = [base, shift_at](double t, double x, Summary ms) {
        return base->run_cost0(t, x + shift_at(t), ms);
    };
    out.run_cost1 = [base, shift_at](double t, double x, double g_) {
        return base->run_cost1(t, x + shift_at(t), g_);
    };
    out.run_cost1_grad = [base, shift_at](double t, double x, double g_) {
        return base->run_cost1_grad(t, x + shift_at(t), g_);
    };
    const double shift_T = shift_at(grid.t_horizon);
    out.terminal_density_derivative = [base, shift_T](double x, const Field& mu, const Grid& gg) {
        return base->terminal_density_derivative(x + shift_T, shift_measure(mu, shift_T, gg), gg);
    };
    out.terminal_cost = [base, shift_T](const Field& mu, const Grid& gg) {
        return base->terminal_cost(shift_measure(mu, shift_T, gg), gg);
    };
    out.d_lambda = [base, shift_at](double t, double x, Summary ms, double y) {
        return base->d_lambda(t, x + shift_at(t), ms, y + shift_at(t));
    };
    out.d_drift0 = [base, shift_at](double t, double x, Summary ms, double y) {
        return base->d_drift0(t, x + shift_at(t), ms, y + shift_at(t));
    };
    out.d_run_cost0 = [base, shift_at](double t, double x, Summary ms, double y) {
        return base->d_run_cost0(t, x + shift_at(t), ms, y + shift_at(t));
    };
    return out;
}

double running_cost(const ModelSpec& spec, double t, const Field& mu, const Field& gamma,
                    const Grid& g) {
    if (static_cast<int>(mu.size()) != g.n_x || static_cast<int>(gamma.size()) != g.n_x)
        throw DimensionMismatch("running_cost: field does not match grid");
    const std::vector<double> ms = spec.summaries(t, mu, g);
    double acc = 0.0;
    for (int i = 0; i < g.n_x; ++i) {
        const double x = g.node(i);
        acc += mu[i] * (spec.run_cost0(t, x, ms) + spec.run_cost1(t, x, gamma[i]));
    }
    return acc * g.dx;
}

double terminal_cost_eval(const ModelSpec& spec, const Field& mu_T, const Grid& g) {
    if (static_cast<int>(mu_T.size()) != g.n_x)
        throw DimensionMismatch("terminal_cost_eval: field does not match grid");
    return spec.terminal_cost(mu_T, g);
}

} // namespace fpc
