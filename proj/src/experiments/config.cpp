#include "superres/experiments/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "superres/errors.hpp"

namespace superres::experiments {

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys = {
        {"experiment", {"figure", "output", "seed"}},
        {"psf", {"kind", "width", "table"}},
        {"grid", {"min", "max", "points", "scale"}},
        {"budget", {"photons", "L"}},
        {"montecarlo", {"trials", "random_L", "zero_photon_estimate", "threads", "grid_min", "grid_max", "grid_points",
                        "grid_scale"}},
        {"misalignment", {"xi", "sign", "hybrid_xi"}},
    };
    return keys;
}

template <class T>
T parse_scalar(const std::string& field, const std::string& text) {
    const std::string s = boost::trim_copy(text);
    std::istringstream in(s);
    T v{};
    in >> v;
    if (s.empty() || in.fail() || !in.eof()) throw ConfigError(field, "cannot parse '" + s + "'");
    return v;
}

bool parse_bool(const std::string& field, const std::string& text) {
    const std::string s = boost::to_lower_copy(boost::trim_copy(text));
    if (s == "true" || s == "yes" || s == "1" || s == "on") return true;
    if (s == "false" || s == "no" || s == "0" || s == "off") return false;
    throw ConfigError(field, "expected a boolean, got '" + s + "'");
}

template <class T>
std::vector<T> parse_list(const std::string& field, const std::string& text) {
    std::vector<std::string> parts;
    boost::split(parts, text, boost::is_any_of(", "), boost::token_compress_on);
    std::vector<T> out;
    for (const auto& p : parts) {
        if (boost::trim_copy(p).empty()) continue;
        out.push_back(parse_scalar<T>(field, p));
    }
    if (out.empty()) throw ConfigError(field, "empty list");
    return out;
}

bool parse_scale(const std::string& field, const std::string& text) {
    const std::string s = boost::to_lower_copy(boost::trim_copy(text));
    if (s == "log") return true;
    if (s == "linear") return false;
    throw ConfigError(field, "scale must be 'linear' or 'log'");
}

}  // namespace

std::string to_string(Figure f) {
    switch (f) {
        case Figure::InfoCurves: return "InfoCurves";
        case Figure::CrbCurves: return "CrbCurves";
        case Figure::BinaryComparison: return "BinaryComparison";
        case Figure::SincComparison: return "SincComparison";
        case Figure::MisalignHg: return "MisalignHg";
        case Figure::MisalignBinary: return "MisalignBinary";
        case Figure::HybridBounds: return "HybridBounds";
        case Figure::McHg: return "McHg";
        case Figure::McBinary: return "McBinary";
        case Figure::McMisaligned: return "McMisaligned";
    }
    return "unknown";
}

const std::vector<Figure>& all_figures() {
    static const std::vector<Figure> figs = {
        Figure::InfoCurves,   Figure::CrbCurves, Figure::BinaryComparison, Figure::SincComparison,
        Figure::MisalignHg,   Figure::MisalignBinary, Figure::HybridBounds, Figure::McHg,
        Figure::McBinary,     Figure::McMisaligned,
    };
    return figs;
}

std::optional<Figure> figure_from_string(const std::string& name) {
    for (Figure f : all_figures()) {
        if (boost::iequals(to_string(f), name)) return f;
    }
    return std::nullopt;
}

PointSpreadFunction PsfSpec::build() const {
    switch (kind) {
        case PsfKind::Gaussian: return PointSpreadFunction::gaussian(width);
        case PsfKind::Sinc: return PointSpreadFunction::sinc(width);
        case PsfKind::Tabulated: return PointSpreadFunction::load_tabulated(table);
    }
    throw InvalidArgument("unknown PSF kind");
}

std::vector<double> ResolvedGrid::values() const {
    std::vector<double> v(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        const double f = static_cast<double>(i) / (points - 1);
        // Weighted form keeps decimal grids exact where possible (0.15, not 0.15000000000000002).
        v[static_cast<std::size_t>(i)] =
            log ? min * std::pow(max / min, f) : (min * (points - 1 - i) + max * i) / (points - 1);
    }
    v.back() = max;
    return v;
}

ResolvedGrid ExperimentConfig::grid_for(Figure f) const {
    ResolvedGrid g;
    const GridSpec* spec = &grid;
    if (f == Figure::HybridBounds) {
        g = {0.01, 10.0, 61, true};
    } else if (f == Figure::McHg || f == Figure::McBinary || f == Figure::McMisaligned) {
        g = {0.05, 2.0, 20, false};
        spec = &mc_grid;
    }
    if (spec->min) g.min = *spec->min;
    if (spec->max) g.max = *spec->max;
    if (spec->points) g.points = *spec->points;
    if (spec->log) g.log = *spec->log;
    return g;
}

void ExperimentConfig::validate() const {
    if (figures.empty()) throw ConfigError("experiment.figure", "no figure selected");
    if (!(psf.width > 0.0) || !std::isfinite(psf.width)) throw ConfigError("psf.width", "must be positive");
    if (psf.kind == PsfKind::Tabulated) {
        if (psf.table.empty()) throw ConfigError("psf.table", "required for kind=table");
        if (!std::filesystem::exists(psf.table)) throw ConfigError("psf.table", "no such file " + psf.table.string());
    }
    if (!(photons > 0.0) || !std::isfinite(photons)) throw ConfigError("budget.photons", "must be positive");
    for (auto l : detected) {
        if (l <= 0) throw ConfigError("budget.L", "detected photon numbers must be positive");
    }
    if (trials < 1) throw ConfigError("montecarlo.trials", "must be >= 1");
    if (!(zero_photon_estimate >= 0.0)) throw ConfigError("montecarlo.zero_photon_estimate", "must be >= 0");
    for (double x : xi) {
        if (!(x >= 0.0) || !std::isfinite(x)) throw ConfigError("misalignment.xi", "must be >= 0");
    }
    for (double x : hybrid_xi) {
        if (!(x >= 0.0) || !std::isfinite(x)) throw ConfigError("misalignment.hybrid_xi", "must be >= 0");
    }
    if (xi_sign != 1 && xi_sign != -1) throw ConfigError("misalignment.sign", "must be +1 or -1");
    for (Figure f : figures) {
        const ResolvedGrid g = grid_for(f);
        const bool mc = f == Figure::McHg || f == Figure::McBinary || f == Figure::McMisaligned;
        const std::string section = mc ? "montecarlo.grid_" : "grid.";
        if (g.points < 2) throw ConfigError(section + "points", "need at least 2 points");
        if (!(g.min < g.max)) throw ConfigError(section + "min", "grid min must be below max");
        if (g.min < 0.0) throw ConfigError(section + "min", "separations must be >= 0");
        if (g.log && !(g.min > 0.0)) throw ConfigError(section + "min", "log grid needs min > 0");
    }
}

ExperimentConfig parse_config(std::istream& in) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError("line " + std::to_string(e.line()), e.message());
    }

    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty()) throw ConfigError(section, "keys must appear inside a [section]");
        auto it = known_keys().find(section);
        if (it == known_keys().end()) throw ConfigError(section, "unknown section");
        for (const auto& [key, value] : body) {
            if (!it->second.count(key)) throw ConfigError(section + "." + key, "unknown key");
        }
    }

    ExperimentConfig cfg;
    auto get = [&](const std::string& path) -> std::optional<std::string> {
        if (auto v = tree.get_optional<std::string>(path)) return *v;
        return std::nullopt;
    };

    if (auto v = get("experiment.figure")) {
        const std::string name = boost::trim_copy(*v);
        if (boost::iequals(name, "all")) {
            cfg.figures = all_figures();
        } else {
            cfg.figures.clear();
            std::vector<std::string> parts;
            boost::split(parts, name, boost::is_any_of(", "), boost::token_compress_on);
            for (const auto& p : parts) {
                auto f = figure_from_string(p);
                if (!f) throw ConfigError("experiment.figure", "unknown figure '" + p + "'");
                cfg.figures.push_back(*f);
            }
        }
    }
    if (auto v = get("experiment.output")) cfg.output = boost::trim_copy(*v);
    if (auto v = get("experiment.seed")) cfg.seed = parse_scalar<std::uint64_t>("experiment.seed", *v);

    if (auto v = get("psf.kind")) {
        const std::string k = boost::to_lower_copy(boost::trim_copy(*v));
        if (k == "gaussian") cfg.psf.kind = PsfKind::Gaussian;
        else if (k == "sinc") cfg.psf.kind = PsfKind::Sinc;
        else if (k == "table" || k == "tabulated") cfg.psf.kind = PsfKind::Tabulated;
        else throw ConfigError("psf.kind", "expected gaussian, sinc or table");
    }
    if (auto v = get("psf.width")) cfg.psf.width = parse_scalar<double>("psf.width", *v);
    if (auto v = get("psf.table")) cfg.psf.table = boost::trim_copy(*v);

    if (auto v = get("grid.min")) cfg.grid.min = parse_scalar<double>("grid.min", *v);
    if (auto v = get("grid.max")) cfg.grid.max = parse_scalar<double>("grid.max", *v);
    if (auto v = get("grid.points")) cfg.grid.points = parse_scalar<int>("grid.points", *v);
    if (auto v = get("grid.scale")) cfg.grid.log = parse_scale("grid.scale", *v);

    if (auto v = get("budget.photons")) cfg.photons = parse_scalar<double>("budget.photons", *v);
    if (auto v = get("budget.L")) cfg.detected = parse_list<std::int64_t>("budget.L", *v);

    if (auto v = get("montecarlo.trials")) cfg.trials = parse_scalar<std::int64_t>("montecarlo.trials", *v);
    if (auto v = get("montecarlo.random_L")) cfg.random_detected = parse_bool("montecarlo.random_L", *v);
    if (auto v = get("montecarlo.zero_photon_estimate")) {
        cfg.zero_photon_estimate = parse_scalar<double>("montecarlo.zero_photon_estimate", *v);
    }
    if (auto v = get("montecarlo.threads")) cfg.threads = parse_scalar<unsigned>("montecarlo.threads", *v);
    if (auto v = get("montecarlo.grid_min")) cfg.mc_grid.min = parse_scalar<double>("montecarlo.grid_min", *v);
    if (auto v = get("montecarlo.grid_max")) cfg.mc_grid.max = parse_scalar<double>("montecarlo.grid_max", *v);
    if (auto v = get("montecarlo.grid_points")) cfg.mc_grid.points = parse_scalar<int>("montecarlo.grid_points", *v);
    if (auto v = get("montecarlo.grid_scale")) cfg.mc_grid.log = parse_scale("montecarlo.grid_scale", *v);

    if (auto v = get("misalignment.xi")) cfg.xi = parse_list<double>("misalignment.xi", *v);
    if (auto v = get("misalignment.hybrid_xi")) cfg.hybrid_xi = parse_list<double>("misalignment.hybrid_xi", *v);
    if (auto v = get("misalignment.sign")) cfg.xi_sign = parse_scalar<int>("misalignment.sign", *v);

    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open " + path.string());
    ExperimentConfig cfg = parse_config(in);
    if (cfg.psf.kind == PsfKind::Tabulated && cfg.psf.table.is_relative()) {
        cfg.psf.table = path.parent_path() / cfg.psf.table;
    }
    return cfg;
}

}  // namespace superres::experiments
