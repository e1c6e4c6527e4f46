#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "fpc/grid.hpp"
#include "fpc/model.hpp"
#include "fpc/picard.hpp"

namespace fpc {

/// Flat JSON scenario configuration. Every key can be overridden on the
/// command line with --override KEY=VALUE.
struct ScenarioConfig {
    // grid
    double x_min = -6.0;
    double x_max = 6.0;
    int n_x = 200;
    double t_horizon = 1.0;
    int n_t = 400;
    double eta0 = 0.1;

    BailoutParams bailout;
    PicardOptions picard;

    int n_particles = 10000;
    int n_paths = 1;
    std::uint64_t seed = 12345;

    double gradcheck_eps = 1e-3;
    double pushforward_margin = 0.25;

    // density CSVs compared by the d0 subcommand
    std::string d0_file_a;
    std::string d0_file_b;

    Grid make_grid_from_config() const;
    Field initial_density(const Grid& g) const;
    void validate() const;
};

/// Parse errors and validation failures throw ConfigError; the CLI maps it
/// to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

ScenarioConfig load_scenario(const std::string& config_path,
                             const std::vector<std::string>& overrides);

} // namespace fpc
