#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "superres/experiments/config.hpp"
#include "superres/experiments/figures.hpp"

namespace fs = std::filesystem;
using namespace superres::experiments;

namespace {

fs::path scratch_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("superres_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(SUPERRES_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

ExperimentConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

std::string field_of(const std::string& text) {
    try {
        parse(text);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "";
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("config parsing and defaults") {
    const auto cfg = parse("[experiment]\nfigure = McHg, InfoCurves\nseed = 77\n[budget]\nL = 5 ,6\n"
                           "[misalignment]\nxi = 0.1\nsign = -1\n[psf]\nkind = sinc\nwidth = 2\n");
    REQUIRE(cfg.figures.size() == 2);
    CHECK(cfg.figures[0] == Figure::McHg);
    CHECK(cfg.seed == 77);
    CHECK(cfg.detected == std::vector<std::int64_t>{5, 6});
    CHECK(cfg.xi_sign == -1);
    CHECK(cfg.psf.kind == superres::PsfKind::Sinc);

    const auto d = parse("");
    CHECK(d.figures.size() == 10);
    const auto info = d.grid_for(Figure::InfoCurves);
    CHECK(info.points == 121);
    CHECK(info.min == 0.0);
    CHECK(info.max == 6.0);
    const auto values = info.values();
    CHECK(values[3] == 0.15);
    CHECK(values.back() == 6.0);
    const auto mc = d.grid_for(Figure::McBinary);
    CHECK(mc.points == 20);
    CHECK(mc.min == 0.05);
    CHECK(mc.max == 2.0);
    CHECK(d.trials == 100000);
    CHECK(d.hybrid_xi == std::vector<double>{0.0});
    const auto hy = d.grid_for(Figure::HybridBounds);
    CHECK(hy.log);
    CHECK(hy.values().front() == doctest::Approx(0.01));
}

TEST_CASE("config errors name the offending field") {
    CHECK(field_of("[budget]\nL = 0\n") == "budget.L");
    CHECK(field_of("[budget]\nphotons = -1\n") == "budget.photons");
    CHECK(field_of("[grid]\nmin = 3\nmax = 1\n") == "grid.min");
    CHECK(field_of("[grid]\npoints = 1\n") == "grid.points");
    CHECK(field_of("[montecarlo]\ntrials = many\n") == "montecarlo.trials");
    CHECK(field_of("[psf]\nkind = airy\n") == "psf.kind");
    CHECK(field_of("[psf]\ncolour = red\n") == "psf.colour");
    CHECK(field_of("[plots]\nx = 1\n") == "plots");
    CHECK(field_of("[experiment]\nfigure = Fig99\n") == "experiment.figure");
    CHECK(field_of("[misalignment]\nxi = -0.1\n") == "misalignment.xi");
    CHECK(field_of("[psf]\nkind = table\ntable = /nonexistent.txt\n") == "psf.table");
}

TEST_CASE("information figures are normalized and flagged") {
    ExperimentConfig cfg = parse("[grid]\nmax = 4\npoints = 9\n");
    const auto info = build_figure(Figure::InfoCurves, cfg).at(0);
    REQUIRE(info.table.rows.size() == 9);
    for (const auto& row : info.table.rows) CHECK(row[2] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(info.table.rows[0][4] == 0.0);
    CHECK(info.failed_points() == 0);

    const auto bin = build_figure(Figure::BinaryComparison, cfg).at(0);
    CHECK(bin.table.rows[0][1] == doctest::Approx(1.0));
    for (std::size_t i = 1; i < bin.table.rows.size(); ++i) CHECK(bin.table.rows[i][1] < bin.table.rows[i - 1][1]);

    const auto sinc = build_figure(Figure::SincComparison, cfg).at(0);
    for (const auto& row : sinc.table.rows) CHECK(row[1] == doctest::Approx(1.0).epsilon(1e-10));

    const auto crb = build_figure(Figure::CrbCurves, cfg).at(0);
    CHECK(std::isinf(crb.table.rows[0][4]));
    CHECK(crb.table.rows[0][2] == doctest::Approx(1.0));
}

TEST_CASE("run writes CSVs, sidecars and a manifest deterministically") {
    const fs::path dir = scratch_dir("run");
    ExperimentConfig cfg = parse("[experiment]\nfigure = McBinary, HybridBounds\n[montecarlo]\ntrials = 500\n"
                                 "grid_points = 4\n[budget]\nL = 20\n[grid]\npoints = 5\n");
    cfg.output = dir / "a";
    std::ostringstream log;
    const auto s1 = run(cfg, log);
    CHECK_FALSE(s1.curve_failed);
    CHECK(fs::exists(dir / "a" / "McBinary_L20.csv"));
    CHECK(fs::exists(dir / "a" / "McBinary_L20.json"));
    CHECK(fs::exists(dir / "a" / "HybridBounds.csv"));
    CHECK(fs::exists(dir / "a" / "manifest.json"));
    const std::string csv = slurp(dir / "a" / "McBinary_L20.csv");
    CHECK(csv.find("theta2,mse,crb,trials,L,xi,scheme,seed\n") != std::string::npos);
    CHECK(csv.rfind("# ", 0) == 0);

    cfg.output = dir / "b";
    run(cfg, log);
    for (const char* f : {"McBinary_L20.csv", "McBinary_L20.json", "HybridBounds.csv"}) {
        CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
    }
    const auto manifest = nlohmann::json::parse(slurp(dir / "a" / "manifest.json"));
    CHECK(manifest["seed"] == cfg.seed);
    CHECK(manifest["version"] == SUPERRES_VERSION);
}

TEST_CASE("command line exit codes") {
    const fs::path dir = scratch_dir("exit");
    {
        std::ofstream(dir / "bad.ini") << "[budget]\nL = 0\n[experiment]\nfigure = McHg\n";
        std::ofstream(dir / "ok.ini") << "[experiment]\nfigure = InfoCurves\n[grid]\npoints = 3\n";
        std::ofstream(dir / "syntax.ini") << "[grid\npoints = 3\n";
    }
    CHECK(run_cli("run --config " + (dir / "bad.ini").string()) == 2);
    CHECK(run_cli("run --config " + (dir / "syntax.ini").string()) == 2);
    CHECK(run_cli("run --config " + (dir / "missing.ini").string()) == 2);
    CHECK(run_cli("run") == 2);
    CHECK(run_cli("run --config " + (dir / "ok.ini").string() + " --figure Nope") == 2);
    CHECK(run_cli("run --config " + (dir / "ok.ini").string() + " --trials 0 --figure McHg") == 2);
    CHECK(run_cli("run --config " + (dir / "ok.ini").string() + " --out " + (dir / "out").string()) == 0);
    CHECK(fs::exists(dir / "out" / "InfoCurves.csv"));
    CHECK(run_cli("--help") == 0);
    CHECK(run_cli(std::string("run --config ") + SUPERRES_SOURCE_DIR + "/configs/default.ini --figure McHg --trials 200 --seed 3 --out " +
                  (dir / "mc").string()) == 0);
    CHECK(slurp(dir / "mc" / "McHg_L20.csv").find(",200,20,0,HgSpade,3\n") != std::string::npos);
}

}
