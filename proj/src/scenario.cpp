#include "fpc/scenario.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace fpc {

using nlohmann::json;

Grid ScenarioConfig::make_grid_from_config() const {
    return make_grid(x_min, x_max, n_x, t_horizon, n_t, eta0);
}

Field ScenarioConfig::initial_density(const Grid& g) const {
    return gaussian_density(g, bailout.initial_mean, bailout.initial_sd);
}

void ScenarioConfig::validate() const {
    try {
        const Grid g = make_grid_from_config();
        (void)bailout_model(bailout);
        picard.validate();
        if (bailout.t_horizon != t_horizon)
            throw std::invalid_argument("t_horizon mismatch between grid and model");
        if (n_particles < 1) throw std::invalid_argument("n_particles must be >= 1");
        if (n_paths < 1) throw std::invalid_argument("n_paths must be >= 1");
        if (!(gradcheck_eps > 0.0)) throw std::invalid_argument("gradcheck_eps must be > 0");
        if (!(pushforward_margin > 0.0 && pushforward_margin <= 0.5))
            throw std::invalid_argument("pushforward_margin must be in (0, 0.5]");
        if (!(bailout.initial_sd > 0.0)) throw std::invalid_argument("initial_sd must be > 0");
        (void)g;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    for (const std::string& ref : {d0_file_a, d0_file_b}) {
        if (!ref.empty() && !std::filesystem::exists(ref))
            throw ConfigError("referenced file does not exist: " + ref);
    }
}

namespace {

template <typename T>
void read_key(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("config key '") + key + "' has the wrong type");
    }
}

void apply_config(const json& j, ScenarioConfig& c) {
    read_key(j, "x_min", c.x_min);
    read_key(j, "x_max", c.x_max);
    read_key(j, "n_x", c.n_x);
    read_key(j, "t_horizon", c.t_horizon);
    read_key(j, "n_t", c.n_t);
    read_key(j, "eta0", c.eta0);

    read_key(j, "sigma", c.bailout.sigma);
    read_key(j, "sigma0", c.bailout.sigma0);
    read_key(j, "kappa", c.bailout.kappa);
    read_key(j, "w_weight", c.bailout.w_weight);
    read_key(j, "g_max", c.bailout.g_max);
    read_key(j, "hazard_max", c.bailout.hazard_max);
    read_key(j, "hazard_scale", c.bailout.hazard_scale);
    read_key(j, "initial_mean", c.bailout.initial_mean);
    read_key(j, "initial_sd", c.bailout.initial_sd);

    read_key(j, "max_iters", c.picard.max_iters);
    read_key(j, "tol", c.picard.tol);
    read_key(j, "damping", c.picard.damping);
    read_key(j, "smoothing_schedule", c.picard.smoothing_schedule);

    read_key(j, "n_particles", c.n_particles);
    read_key(j, "n_paths", c.n_paths);
    read_key(j, "seed", c.seed);
    read_key(j, "gradcheck_eps", c.gradcheck_eps);
    read_key(j, "pushforward_margin", c.pushforward_margin);
    read_key(j, "d0_file_a", c.d0_file_a);
    read_key(j, "d0_file_b", c.d0_file_b);

    c.bailout.t_horizon = c.t_horizon;

    static const std::vector<std::string> known = {
        "x_min", "x_max", "n_x", "t_horizon", "n_t", "eta0",
        "sigma", "sigma0", "kappa", "w_weight", "g_max", "hazard_max", "hazard_scale",
        "initial_mean", "initial_sd",
        "max_iters", "tol", "damping", "smoothing_schedule",
        "n_particles", "n_paths", "seed", "gradcheck_eps", "pushforward_margin",
        "d0_file_a", "d0_file_b"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(known.begin(), known.end(), it.key()) == known.end())
            throw ConfigError("unknown config key '" + it.key() + "'");
    }
}

} // namespace

ScenarioConfig load_scenario(const std::string& config_path,
                             const std::vector<std::string>& overrides) {
    if (!std::filesystem::exists(config_path))
        throw ConfigError("config file does not exist: " + config_path);
    std::ifstream in(config_path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(config_path + ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError(config_path + ": top level must be a JSON object");

    ScenarioConfig c;
    apply_config(j, c);

    for (const std::string& ov : overrides) {
        const std::size_t eq = ov.find('=');
        if (eq == std::string::npos)
            throw ConfigError("override '" + ov + "' is not of the form KEY=VALUE");
        const std::string key = ov.substr(0, eq);
        const std::string raw = ov.substr(eq + 1);
        json patch;
        try {
            patch[key] = json::parse(raw);
        } catch (const json::exception&) {
            patch[key] = raw; // unquoted strings (file paths)
        }
        apply_config(patch, c);
    }
    c.validate();
    return c;
}

} // namespace fpc
