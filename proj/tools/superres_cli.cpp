#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "superres/errors.hpp"
#include "superres/experiments/config.hpp"
#include "superres/experiments/figures.hpp"

namespace ex = superres::experiments;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitCurveFailed = 3;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cramer-Rao bounds and Monte Carlo for two-point superresolution"};
    app.set_version_flag("--version", SUPERRES_VERSION);
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Compute the datasets selected by a config file");
    std::string config_path;
    std::string figure;
    std::string out_dir;
    std::uint64_t seed = 0;
    std::int64_t trials = 0;
    run->add_option("--config", config_path, "INI experiment file")->required();
    run->add_option("--figure", figure, "Figure name or 'all' (overrides the config)");
    auto* out_opt = run->add_option("--out", out_dir, "Output directory (overrides the config)");
    auto* seed_opt = run->add_option("--seed", seed, "Monte Carlo seed");
    auto* trials_opt = run->add_option("--trials", trials, "Monte Carlo trials per point");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    ex::ExperimentConfig cfg;
    try {
        cfg = ex::load_config(config_path);
        if (!figure.empty()) {
            if (figure == "all") {
                cfg.figures = ex::all_figures();
            } else if (auto f = ex::figure_from_string(figure)) {
                cfg.figures = {*f};
            } else {
                throw ex::ConfigError("--figure", "unknown figure '" + figure + "'");
            }
        }
        if (*out_opt) cfg.output = out_dir;
        if (*seed_opt) cfg.seed = seed;
        if (*trials_opt) cfg.trials = trials;
        cfg.validate();
    } catch (const ex::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        const ex::RunSummary summary = ex::run(cfg, std::cout);
        std::cout << summary.files.size() << " file(s) written to " << cfg.output.string() << '\n';
        if (summary.curve_failed) {
            std::cerr << "error: at least one curve failed at every point\n";
            return kExitCurveFailed;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
