#include "superres/experiments/figures.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "superres/errors.hpp"
#include "superres/fisher.hpp"
#include "superres/model.hpp"
#include "superres/overlaps.hpp"
#include "superres/qfi.hpp"

namespace superres::experiments {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string psf_label(const PointSpreadFunction& psf) {
    return fmt::format("psf: {} width={}", to_string(psf.kind()), format_number(psf.width()));
}

std::string grid_label(const ResolvedGrid& g, const std::string& unit) {
    return fmt::format("grid: theta2/{} in [{}, {}], {} points, {}", unit, format_number(g.min), format_number(g.max),
                       g.points, g.log ? "log" : "linear");
}

// Fills one row per grid point; a point whose evaluation throws is emitted
// as NaN and flagged.
void fill_rows(CsvTable& t, const std::vector<double>& grid, const std::function<std::vector<double>(double)>& row) {
    for (double x : grid) {
        try {
            auto r = row(x);
            r.insert(r.begin(), x);
            t.add_row(std::move(r));
        } catch (const std::exception&) {
            std::vector<double> r(t.columns.size(), kNaN);
            r[0] = x;
            t.add_row(std::move(r), true);
        }
    }
}

// Inverse-matrix diagonal of a 2x2 information matrix.
std::pair<double, double> crb_diagonal(const FisherMatrix& f) {
    const double det = f.determinant();
    if (!(det > 0.0)) return {kInf, kInf};
    return {f.j22 / det, f.j11 / det};
}

FisherMatrix diagonal(FisherMatrix f) {
    f.j12 = 0.0;  // vanishes by reflection symmetry of the PSF
    return f;
}

std::string xi_label(double xi) { return format_number(xi); }

Dataset info_curves(const ExperimentConfig& cfg) {
    const PointSpreadFunction psf = cfg.psf.build();
    const ResolvedGrid g = cfg.grid_for(Figure::InfoCurves);
    const double w = psf.width();
    const double norm = cfg.photons * spatial_frequency_variance(psf);
    Dataset d{"InfoCurves", {}, std::nullopt, {}};
    d.table.metadata = {"figure: InfoCurves", psf_label(psf), grid_label(g, "width"),
                        fmt::format("photons N={}", format_number(cfg.photons)),
                        "normalization: informations divided by N*dk2 (N/(4 sigma^2) for Gaussian, pi^2 N/(3 W^2) for sinc)",
                        "columns: theta2/width, K11, K22, J11_direct, J22_direct, failed"};
    d.table.columns = {"theta2", "K11", "K22", "J11_direct", "J22_direct"};
    fill_rows(d.table, g.values(), [&](double t) {
        const auto m = OnePhotonModel::from_budget(psf, 0.0, t * w, cfg.photons);
        const FisherMatrix k = qfi_closed_form(m);
        const FisherMatrix j = direct_imaging_fisher(m);
        return std::vector<double>{k.j11 / norm, k.j22 / norm, j.j11 / norm, j.j22 / norm};
    });
    return d;
}

Dataset crb_curves(const ExperimentConfig& cfg) {
    const PointSpreadFunction psf = cfg.psf.build();
    const ResolvedGrid g = cfg.grid_for(Figure::CrbCurves);
    const double w = psf.width();
    const double norm = cfg.photons * spatial_frequency_variance(psf);
    Dataset d{"CrbCurves", {}, std::nullopt, {}};
    d.table.metadata = {"figure: CrbCurves", psf_label(psf), grid_label(g, "width"),
                        fmt::format("photons N={}", format_number(cfg.photons)),
                        "normalization: bounds multiplied by N*dk2 (divided by 4 sigma^2/N for Gaussian)",
                        "columns: theta2/width, QCRB_centroid, QCRB_separation, CRB_centroid_direct, "
                        "CRB_separation_direct, failed"};
    d.table.columns = {"theta2", "QCRB_centroid", "QCRB_separation", "CRB_centroid_direct", "CRB_separation_direct"};
    fill_rows(d.table, g.values(), [&](double t) {
        const auto m = OnePhotonModel::from_budget(psf, 0.0, t * w, cfg.photons);
        const auto q = crb_diagonal(qfi_closed_form(m));
        const auto c = crb_diagonal(direct_imaging_fisher(m));
        return std::vector<double>{q.first * norm, q.second * norm, c.first * norm, c.second * norm};
    });
    return d;
}

Dataset binary_comparison(const ExperimentConfig& cfg) {
    const PointSpreadFunction psf = cfg.psf.build();
    const bool gaussian = psf.kind() == PsfKind::Gaussian;
    const ResolvedGrid g = cfg.grid_for(Figure::BinaryComparison);
    const double w = psf.width();
    const double norm = cfg.photons * spatial_frequency_variance(psf);
    Dataset d{"BinaryComparison", {}, std::nullopt, {}};
    d.table.metadata = {"figure: BinaryComparison", psf_label(psf), grid_label(g, "width"),
                        fmt::format("photons N={}", format_number(cfg.photons)),
                        "normalization: separation informations divided by K22 = N*dk2"};
    d.table.columns = {"theta2", "J22_binary"};
    if (gaussian) d.table.columns.push_back("J22_hg");
    d.table.columns.push_back("J22_direct");
    d.table.metadata.push_back("columns: " + fmt::format("{}", fmt::join(d.table.columns, ", ")) + ", failed");
    fill_rows(d.table, g.values(), [&](double t) {
        const auto m = OnePhotonModel::from_budget(psf, 0.0, t * w, cfg.photons);
        std::vector<double> r;
        r.push_back((gaussian ? binary_spade_fisher_gaussian(m) : binary_spade_fisher_general(psf, t * w, cfg.photons))
                        .j22 /
                    norm);
        if (gaussian) r.push_back(hg_spade_fisher(m).j22 / norm);
        r.push_back(direct_imaging_fisher(m).j22 / norm);
        return r;
    });
    return d;
}

Dataset sinc_comparison(const ExperimentConfig& cfg) {
    const double width = cfg.psf.kind == PsfKind::Sinc ? cfg.psf.width : 1.0;
    const PointSpreadFunction psf = PointSpreadFunction::sinc(width);
    const ResolvedGrid g = cfg.grid_for(Figure::SincComparison);
    const double norm = std::numbers::pi * std::numbers::pi * cfg.photons / (3.0 * width * width);
    Dataset d{"SincComparison", {}, std::nullopt, {}};
    d.table.metadata = {"figure: SincComparison", psf_label(psf), grid_label(g, "W"),
                        fmt::format("photons N={}", format_number(cfg.photons)),
                        "normalization: informations divided by pi^2 N/(3 W^2)",
                        "columns: theta2/W, K22, J22_binary, J22_direct, failed"};
    d.table.columns = {"theta2", "K22", "J22_binary", "J22_direct"};
    fill_rows(d.table, g.values(), [&](double t) {
        const auto m = OnePhotonModel::from_budget(psf, 0.0, t * width, cfg.photons);
        return std::vector<double>{qfi_closed_form(m).j22 / norm,
                                   binary_spade_fisher_general(psf, t * width, cfg.photons).j22 / norm,
                                   direct_imaging_fisher(m).j22 / norm};
    });
    return d;
}

Dataset misalign(const ExperimentConfig& cfg, Figure fig) {
    const PointSpreadFunction psf = PointSpreadFunction::gaussian(cfg.psf.width);
    const double sigma = psf.width();
    const ResolvedGrid g = cfg.grid_for(fig);
    const double norm = cfg.photons / (4.0 * sigma * sigma);
    const bool hg = fig == Figure::MisalignHg;
    Dataset d{to_string(fig), {}, std::nullopt, {}};
    d.table.metadata = {"figure: " + to_string(fig), psf_label(psf), grid_label(g, "sigma"),
                        fmt::format("photons N={}", format_number(cfg.photons)),
                        fmt::format("sorter offset: sign={} xi*sigma", cfg.xi_sign),
                        "normalization: informations divided by N/(4 sigma^2)"};
    d.table.columns = {"theta2", "J22_direct"};
    for (double xi : cfg.xi) d.table.columns.push_back("J22_xi" + xi_label(xi));
    d.table.metadata.push_back("columns: " + fmt::format("{}", fmt::join(d.table.columns, ", ")) + ", failed");
    fill_rows(d.table, g.values(), [&](double t) {
        const auto m = OnePhotonModel::from_budget(psf, 0.0, t * sigma, cfg.photons);
        std::vector<double> r{direct_imaging_fisher(m).j22 / norm};
        for (double xi : cfg.xi) {
            const MisalignmentConfig mis{xi, cfg.xi_sign};
            r.push_back((hg ? misaligned_hg_fisher(m, mis) : misaligned_binary_fisher(m, mis)).j22 / norm);
        }
        return r;
    });
    return d;
}

Dataset hybrid_bounds(const ExperimentConfig& cfg) {
    const PointSpreadFunction psf = cfg.psf.build();
    const bool gaussian = psf.kind() == PsfKind::Gaussian;
    const std::vector<double> xis = gaussian ? cfg.hybrid_xi : std::vector<double>{0.0};
    const ResolvedGrid g = cfg.grid_for(Figure::HybridBounds);
    const double w = psf.width();
    const double norm = w * w / cfg.photons;
    Dataset d{"HybridBounds", {}, std::nullopt, {}};
    d.table.metadata = {"figure: HybridBounds", psf_label(psf), grid_label(g, "width"),
                        fmt::format("photons N={}", format_number(cfg.photons)),
                        "bound: 1/j11 + 1/(4 j22) on the error of either source position",
                        "normalization: bounds divided by width^2/N; hybrid splits photons 50-50 between direct "
                        "imaging and binary SPADE"};
    d.table.columns = {"theta2", "bound_quantum", "bound_direct"};
    for (double xi : xis) d.table.columns.push_back("bound_hybrid_xi" + xi_label(xi));
    d.table.metadata.push_back("columns: " + fmt::format("{}", fmt::join(d.table.columns, ", ")) + ", failed");
    fill_rows(d.table, g.values(), [&](double t) {
        const auto m = OnePhotonModel::from_budget(psf, 0.0, t * w, cfg.photons);
        std::vector<double> r{localization_bound(qfi_closed_form(m)) / norm,
                              localization_bound(diagonal(direct_imaging_fisher(m))) / norm};
        for (double xi : xis) r.push_back(localization_bound(hybrid_fisher(m, {xi, cfg.xi_sign})) / norm);
        return r;
    });
    return d;
}

Dataset mc_dataset(const ExperimentConfig& cfg, Figure fig, Scheme scheme, std::int64_t l, double xi) {
    const ResolvedGrid g = cfg.grid_for(fig);
    SweepConfig sc;
    sc.scheme = scheme;
    sc.sigma = cfg.psf.width;
    sc.photons = l;
    for (double t : g.values()) sc.theta2_grid.push_back(t * sc.sigma);
    sc.trials = cfg.trials;
    sc.xi = xi;
    sc.xi_sign = cfg.xi_sign;
    sc.seed = cfg.seed;
    sc.zero_photon_estimate = cfg.zero_photon_estimate;
    sc.random_photons = cfg.random_detected;
    sc.threads = cfg.threads;

    Dataset d;
    d.stem = fmt::format("{}_L{}", to_string(fig), l);
    if (fig == Figure::McMisaligned) d.stem += "_xi" + xi_label(xi);
    d.metadata = {"figure: " + to_string(fig),
                  fmt::format("psf: gaussian sigma={}", format_number(sc.sigma)),
                  grid_label(g, "sigma"),
                  fmt::format("scheme={} L={} trials={} seed={} xi={} sign={}", to_string(scheme), l, cfg.trials,
                              cfg.seed, format_number(xi), cfg.xi_sign),
                  cfg.random_detected ? "photon number: Poisson(L) per trial" : "photon number: fixed L per trial",
                  fmt::format("zero-photon estimate: {} sigma; binary m0=0 estimate: 2 sigma",
                              format_number(cfg.zero_photon_estimate)),
                  "estimator: maximum likelihood assuming an aligned sorter",
                  scheme == Scheme::HgSpade ? "crb: 4 sigma^2/L" : "crb: (4 sigma^2/L) (e^Q - 1)/Q, Q = theta2^2/(16 sigma^2)",
                  "columns: theta2, mse, crb, trials, L, xi, scheme, seed"};
    try {
        d.report = run_error_sweep(sc);
    } catch (const std::exception& e) {
        d.table.columns = {"theta2", "mse", "crb"};
        d.table.metadata = d.metadata;
        d.table.metadata.push_back(std::string("failed: ") + e.what());
        for (double t : sc.theta2_grid) d.table.add_row({t, kNaN, kNaN}, true);
    }
    return d;
}

Dataset mc_direct_reference(const ExperimentConfig& cfg) {
    const PointSpreadFunction psf = PointSpreadFunction::gaussian(cfg.psf.width);
    const ResolvedGrid g = cfg.grid_for(Figure::McMisaligned);
    Dataset d{"McMisaligned_direct_crb", {}, std::nullopt, {}};
    d.table.metadata = {"figure: McMisaligned (reference)", psf_label(psf), grid_label(g, "sigma"),
                        "direct-imaging separation bound 1/J22_direct at photon budget L (not normalized)"};
    d.table.columns = {"theta2"};
    for (auto l : cfg.detected) d.table.columns.push_back(fmt::format("crb_direct_L{}", l));
    d.table.metadata.push_back("columns: " + fmt::format("{}", fmt::join(d.table.columns, ", ")) + ", failed");
    std::vector<double> grid;
    for (double t : g.values()) grid.push_back(t * psf.width());
    fill_rows(d.table, grid, [&](double t) {
        std::vector<double> r;
        const double j1 = direct_imaging_fisher(OnePhotonModel::from_budget(psf, 0.0, t, 1.0)).j22;
        for (auto l : cfg.detected) r.push_back(j1 > 0.0 ? 1.0 / (j1 * static_cast<double>(l)) : kInf);
        return r;
    });
    return d;
}

}  // namespace

std::size_t Dataset::failed_points() const {
    std::size_t n = 0;
    for (bool f : table.failed) n += f ? 1 : 0;
    return n;
}

std::vector<Dataset> build_figure(Figure figure, const ExperimentConfig& cfg) {
    switch (figure) {
        case Figure::InfoCurves: return {info_curves(cfg)};
        case Figure::CrbCurves: return {crb_curves(cfg)};
        case Figure::BinaryComparison: return {binary_comparison(cfg)};
        case Figure::SincComparison: return {sinc_comparison(cfg)};
        case Figure::MisalignHg:
        case Figure::MisalignBinary: return {misalign(cfg, figure)};
        case Figure::HybridBounds: return {hybrid_bounds(cfg)};
        case Figure::McHg:
        case Figure::McBinary: {
            std::vector<Dataset> out;
            const Scheme s = figure == Figure::McHg ? Scheme::HgSpade : Scheme::BinarySpade;
            for (auto l : cfg.detected) out.push_back(mc_dataset(cfg, figure, s, l, 0.0));
            return out;
        }
        case Figure::McMisaligned: {
            std::vector<Dataset> out;
            for (double xi : cfg.xi) {
                for (auto l : cfg.detected) out.push_back(mc_dataset(cfg, figure, Scheme::MisalignedBinary, l, xi));
            }
            out.push_back(mc_direct_reference(cfg));
            return out;
        }
    }
    throw InvalidArgument("unknown figure");
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json figs = nlohmann::json::array();
    for (Figure f : cfg.figures) figs.push_back(to_string(f));
    auto grid = [](const GridSpec& g) {
        nlohmann::json j = nlohmann::json::object();
        if (g.min) j["min"] = *g.min;
        if (g.max) j["max"] = *g.max;
        if (g.points) j["points"] = *g.points;
        if (g.log) j["scale"] = *g.log ? "log" : "linear";
        return j;
    };
    return {
        {"figures", figs},
        {"psf", {{"kind", to_string(cfg.psf.kind)}, {"width", cfg.psf.width}, {"table", cfg.psf.table.string()}}},
        {"grid", grid(cfg.grid)},
        {"montecarlo_grid", grid(cfg.mc_grid)},
        {"photons", cfg.photons},
        {"L", cfg.detected},
        {"xi", cfg.xi},
        {"hybrid_xi", cfg.hybrid_xi},
        {"xi_sign", cfg.xi_sign},
        {"trials", cfg.trials},
        {"seed", cfg.seed},
        {"random_L", cfg.random_detected},
        {"zero_photon_estimate", cfg.zero_photon_estimate},
    };
}

std::vector<std::filesystem::path> write_dataset(const std::filesystem::path& dir, const Dataset& d,
                                                 const ExperimentConfig& cfg) {
    const auto csv = dir / (d.stem + ".csv");
    if (!d.report) {
        write_csv(csv, d.table);
        return {csv};
    }
    {
        std::ofstream out(csv, std::ios::binary);
        if (!out) throw Error("cannot open " + csv.string() + " for writing");
        write_report_csv(out, *d.report, d.metadata);
    }
    const auto json = dir / (d.stem + ".json");
    nlohmann::json doc = report_to_json(*d.report);
    doc["config"] = config_to_json(cfg);
    doc["version"] = SUPERRES_VERSION;
    write_json(json, doc);
    return {csv, json};
}

RunSummary run(const ExperimentConfig& cfg, std::ostream& log) {
    cfg.validate();
    std::filesystem::create_directories(cfg.output);
    RunSummary summary;
    nlohmann::json outputs = nlohmann::json::array();
    for (Figure f : cfg.figures) {
        for (const Dataset& d : build_figure(f, cfg)) {
            const auto files = write_dataset(cfg.output, d, cfg);
            const std::size_t failed = d.failed_points();
            summary.failed_points += failed;
            if (d.all_failed() || (!d.report && d.table.rows.empty())) summary.curve_failed = true;
            if (!d.report && failed == d.table.rows.size() && failed > 0) summary.curve_failed = true;
            for (const auto& p : files) {
                summary.files.push_back(p);
                outputs.push_back({{"figure", to_string(f)}, {"file", p.filename().string()}, {"failed_points", failed}});
            }
            log << fmt::format("{:<18} {:<40} {} failed point(s)\n", to_string(f), files.front().filename().string(),
                               failed);
        }
    }
    nlohmann::json manifest = {
        {"version", SUPERRES_VERSION},
        {"seed", cfg.seed},
        {"config", config_to_json(cfg)},
        {"outputs", outputs},
    };
    write_json(cfg.output / "manifest.json", manifest);
    summary.files.push_back(cfg.output / "manifest.json");
    return summary;
}

}  // namespace superres::experiments
