#pragma once

#include <functional>
#include <span>
#include <vector>

#include "fpc/grid.hpp"

namespace fpc {

/// Values of the finitely many linear functionals <mu, phi_k> a model's
/// nonlocal coefficients read. Solvers evaluate them once per time step.
using Summary = std::span<const double>;

/// Coefficients, costs, and linear functional derivatives of one control
/// problem for the (random) Fokker-Planck equation
///
///   d<mu_t, phi> = <mu_t, lambda phi + b . grad phi + a lap phi> dt,
///   b(t, x, mu, g) = drift0(t, x, mu) + drift1_slope(t, x) * g,
///
/// with running cost <mu, f0 + f1(., gamma)> and terminal cost psi(mu_T).
/// Measure dependence enters only through the declared summary functionals;
/// `diffusion` is the intrinsic a(t, x) without any sigma0 augmentation.
struct ModelSpec {
    std::vector<std::function<double(double t, double x)>> summary_integrands;

    std::function<double(double t, double x, Summary ms)> lambda_coeff;
    std::function<double(double t, double x, Summary ms)> drift0;
    std::function<double(double t, double x)> drift1_slope;
    std::function<double(double t, double x)> diffusion;
    double diffusion_floor = 0.0; // declared uniform parabolicity constant c
    double sigma0 = 0.0;

    std::function<double(double t, double x, Summary ms)> run_cost0;
    std::function<double(double t, double x, double g)> run_cost1;
    std::function<double(double t, double x, double g)> run_cost1_grad;

    std::function<double(double x, const Field& mu_T, const Grid& g)> terminal_density_derivative;
    std::function<double(const Field& mu_T, const Grid& g)> terminal_cost;

    // Linear functional derivatives D.(t, x, mu)(y); x is the coefficient's
    // space argument, y the direction the derivative is integrated against.
    // Solvers skip the O(n_x^2) nonlocal assembly when the flag is false.
    bool has_measure_derivatives = true;
    std::function<double(double t, double x, Summary ms, double y)> d_lambda;
    std::function<double(double t, double x, Summary ms, double y)> d_drift0;
    std::function<double(double t, double x, Summary ms, double y)> d_run_cost0;

    double g_min = 0.0;
    double g_max = 0.0;

    std::vector<double> summaries(double t, const Field& mu, const Grid& g) const;
    void validate(const Grid& g) const;
};

/// All coefficients and costs identically zero, G = {0}. Starting point for
/// custom test models.
ModelSpec zero_model();

/// Parameters of the government-bailout instance. The hazard is
/// hazard_max * (1 - exp(x / hazard_scale)) for x < 0 and 0 for x >= 0.
struct BailoutParams {
    double sigma = 0.5;
    double sigma0 = 0.0;
    double kappa = 0.0;
    double w_weight = 0.3;
    double g_max = 1.0;
    double hazard_max = 2.0;
    double hazard_scale = 0.5;
    double t_horizon = 1.0;
    double initial_mean = 0.3;
    double initial_sd = 0.5;
};

double bailout_hazard(const BailoutParams& p, double x);

/// Bailout model: lambda = -hazard, drift0 = -kappa <mu, hazard>, unit control
/// slope, a = sigma^2/2, f1 = w g, psi(mu) = 1 - mu(R), Dpsi = -1, G = [0, g_max].
ModelSpec bailout_model(const BailoutParams& p);

/// Space-time control values, one row per time step, entries in [g_min, g_max].
struct ControlField {
    int n_t = 0;
    int n_x = 0;
    std::vector<double> values; // row-major, values[k * n_x + i]

    double at(int k, int i) const { return values[static_cast<std::size_t>(k) * n_x + i]; }
    double& at(int k, int i) { return values[static_cast<std::size_t>(k) * n_x + i]; }
    Field slice(int k) const {
        return Field(values.begin() + static_cast<std::ptrdiff_t>(k) * n_x,
                     values.begin() + static_cast<std::ptrdiff_t>(k + 1) * n_x);
    }

    static ControlField constant(const Grid& g, double value);
    void check_admissible(const ModelSpec& spec) const;
};

/// Control-dependent part of the Hamiltonian,
/// H1(t, x, p, g) = drift1_slope(t, x) g p + f1(t, x, g).
double hamiltonian_h1(const ModelSpec& spec, double t, double x, double p, double g);

/// Pointwise minimiser of H1 over G; ties resolved toward the larger control,
/// so the bailout model returns g_max exactly when p <= -w.
double minimize_h1(const ModelSpec& spec, double t, double x, double p);

/// Linear functional derivative of the Hamiltonian,
///   DH(x) = lambda u + b . grad u + f
///           + <mu, Dlambda(.)(x) u + Ddrift0(.)(x) . grad u + Df0(.)(x)>.
Field dH(const ModelSpec& spec, double t, const Field& mu, const Field& u,
         const Field& grad_u, const Field& gamma, const Grid& g);

/// Tilde coefficients of the noise-shift transformation: every (t, x, .)
/// evaluation becomes (t, x + sigma0 W_t, pushed-forward measure) and the
/// output carries sigma0 = 0. With sigma0 = 0 the input is returned unchanged.
ModelSpec shift_model(const ModelSpec& spec, const NoisePath& wpath, const Grid& g);

/// <mu, f0(t, ., mu) + f1(t, ., gamma)>.
double running_cost(const ModelSpec& spec, double t, const Field& mu, const Field& gamma,
                    const Grid& g);

double terminal_cost_eval(const ModelSpec& spec, const Field& mu_T, const Grid& g);

} // namespace fpc
