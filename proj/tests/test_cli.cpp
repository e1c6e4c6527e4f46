#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "fpc/scenario.hpp"

namespace fs = std::filesystem;

namespace {

std::string cli_path() {
    const char* p = std::getenv("FPC_CLI");
    REQUIRE_MESSAGE(p != nullptr, "FPC_CLI must point at the fpcontrol binary");
    return p;
}

std::string config_dir() {
    const char* p = std::getenv("FPC_CONFIG_DIR");
    REQUIRE_MESSAGE(p != nullptr, "FPC_CONFIG_DIR must point at the configs directory");
    return p;
}

int run(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string first_line(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    return line;
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("fpc_cli_" + tag);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

// small/fast override set for CLI plumbing tests
const std::string kFast =
    " --override n_x=80 --override n_t=60 --override n_particles=500"
    " --override max_iters=60";

} // namespace

TEST_CASE("missing config file exits 2 and names the path") {
    TempDir tmp("missing");
    const int code = run(cli_path() + " forward --config /nonexistent/cfg.json --out-dir " +
                         tmp.path.string() + " 2> " + (tmp.path / "err.txt").string());
    CHECK(code == 2);
    CHECK(slurp(tmp.path / "err.txt").find("/nonexistent/cfg.json") != std::string::npos);
}

TEST_CASE("invalid config value exits 2") {
    TempDir tmp("badval");
    const int code = run(cli_path() + " forward --config " + config_dir() +
                         "/baseline_kappa0.json --override sigma=-1 --out-dir " +
                         tmp.path.string() + " > /dev/null 2>&1");
    CHECK(code == 2);
}

TEST_CASE("unknown config key exits 2") {
    TempDir tmp("badkey");
    const int code = run(cli_path() + " forward --config " + config_dir() +
                         "/baseline_kappa0.json --override sigmaa=1 --out-dir " +
                         tmp.path.string() + " > /dev/null 2>&1");
    CHECK(code == 2);
}

TEST_CASE("forward writes density and control CSVs with exact headers") {
    TempDir tmp("forward");
    const int code = run(cli_path() + " forward --config " + config_dir() +
                         "/baseline_kappa0.json" + kFast + " --out-dir " + tmp.path.string() +
                         " > /dev/null");
    CHECK(code == 0);
    CHECK(first_line(tmp.path / "density.csv") == "t,x,rho");
    CHECK(first_line(tmp.path / "control.csv") == "t,x,gamma");
}

TEST_CASE("picard writes the full artifact set") {
    TempDir tmp("picard");
    const int code = run(cli_path() + " picard --config " + config_dir() +
                         "/baseline_kappa0.json" + kFast + " --out-dir " + tmp.path.string() +
                         " > /dev/null");
    CHECK(code == 0);
    CHECK(first_line(tmp.path / "density.csv") == "t,x,rho");
    CHECK(first_line(tmp.path / "adjoint.csv") == "t,x,u,du_dx");
    CHECK(first_line(tmp.path / "control.csv") == "t,x,gamma");
    CHECK(first_line(tmp.path / "residuals.csv") == "iter,residual,cost");
    CHECK(first_line(tmp.path / "active_set.csv") == "t,a,b");
}

TEST_CASE("gradcheck emits the JSON report with a small relative error") {
    TempDir tmp("gradcheck");
    const int code = run(cli_path() + " gradcheck --config " + config_dir() +
                         "/baseline_kappa0.json --out-dir " + tmp.path.string() + " > /dev/null");
    CHECK(code == 0);
    const auto j = nlohmann::json::parse(slurp(tmp.path / "gradcheck.json"));
    CHECK(j.contains("adjoint_value"));
    CHECK(j.contains("fd_value"));
    CHECK(j.contains("eps"));
    CHECK(j.at("rel_err").get<double>() <= 0.01);
}

TEST_CASE("particles and compare subcommands") {
    TempDir tmp("particles");
    int code = run(cli_path() + " particles --config " + config_dir() +
                   "/baseline_kappa0.json" + kFast + " --out-dir " + tmp.path.string() +
                   " > /dev/null");
    CHECK(code == 0);
    CHECK(first_line(tmp.path / "particles_summary.csv") == "t,mass,L,mean_X");

    code = run(cli_path() + " compare --config " + config_dir() + "/baseline_kappa0.json" + kFast +
               " --out-dir " + tmp.path.string() + " > /dev/null");
    CHECK(code == 0);
    const auto j = nlohmann::json::parse(slurp(tmp.path / "compare.json"));
    CHECK(j.contains("flat_distance_T"));
}

TEST_CASE("d0 subcommand compares two density files") {
    TempDir tmp("d0");
    REQUIRE(run(cli_path() + " forward --config " + config_dir() + "/baseline_kappa0.json" +
                kFast + " --out-dir " + (tmp.path / "a").string() + " > /dev/null") == 0);
    REQUIRE(run(cli_path() + " forward --config " + config_dir() + "/baseline_kappa1.json" +
                kFast + " --out-dir " + (tmp.path / "b").string() + " > /dev/null") == 0);

    const int code =
        run(cli_path() + " d0 --config " + config_dir() + "/baseline_kappa0.json" + kFast +
            " --override d0_file_a=" + (tmp.path / "a" / "density.csv").string() +
            " --override d0_file_b=" + (tmp.path / "b" / "density.csv").string() + " --out-dir " +
            tmp.path.string() + " > /dev/null");
    CHECK(code == 0);
    CHECK(first_line(tmp.path / "d0.csv") == "t,d0");

    // referencing a missing file is a config error
    const int bad =
        run(cli_path() + " d0 --config " + config_dir() + "/baseline_kappa0.json" + kFast +
            " --override d0_file_a=/nonexistent.csv --override d0_file_b=/nonexistent.csv" +
            " --out-dir " + tmp.path.string() + " > /dev/null 2>&1");
    CHECK(bad == 2);
}

TEST_CASE("identical config and seed give byte-identical outputs") {
    TempDir tmp("determinism");
    for (const char* sub : {"run1", "run2"}) {
        const int code = run(cli_path() + " picard --config " + config_dir() +
                             "/baseline_kappa0.json" + kFast + " --seed 777 --out-dir " +
                             (tmp.path / sub).string() + " > /dev/null");
        REQUIRE(code == 0);
    }
    for (const char* name :
         {"density.csv", "adjoint.csv", "control.csv", "residuals.csv", "active_set.csv"}) {
        CHECK_MESSAGE(slurp(tmp.path / "run1" / name) == slurp(tmp.path / "run2" / name), name);
    }
}

TEST_CASE("scenario loader applies overrides and validates ranges") {
    const std::string cfg = config_dir() + std::string("/baseline_kappa0.json");
    const fpc::ScenarioConfig base = fpc::load_scenario(cfg, {});
    CHECK(base.n_x == 200);
    CHECK(base.bailout.kappa == 0.0);

    const fpc::ScenarioConfig tweaked =
        fpc::load_scenario(cfg, {"kappa=1.0", "n_x=64", "smoothing_schedule=[0.05,0.0]"});
    CHECK(tweaked.bailout.kappa == 1.0);
    CHECK(tweaked.n_x == 64);
    CHECK(tweaked.picard.smoothing_schedule == std::vector<double>{0.05, 0.0});

    CHECK_THROWS_AS(fpc::load_scenario(cfg, {"n_x=-5"}), fpc::ConfigError);
    CHECK_THROWS_AS(fpc::load_scenario(cfg, {"no_such_key=1"}), fpc::ConfigError);
    CHECK_THROWS_AS(fpc::load_scenario(cfg, {"garbage"}), fpc::ConfigError);
}
