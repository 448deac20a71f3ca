#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "superres/psf.hpp"

namespace superres::experiments {

enum class Figure {
    InfoCurves,
    CrbCurves,
    BinaryComparison,
    SincComparison,
    MisalignHg,
    MisalignBinary,
    HybridBounds,
    McHg,
    McBinary,
    McMisaligned,
};

std::string to_string(Figure f);
std::optional<Figure> figure_from_string(const std::string& name);
const std::vector<Figure>& all_figures();

/// Invalid configuration; `field()` names the offending "section.key".
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

struct PsfSpec {
    PsfKind kind = PsfKind::Gaussian;
    double width = 1.0;
    std::filesystem::path table;

    PointSpreadFunction build() const;
};

/// Separation grid in units of the PSF width. Unset fields take the
/// per-figure default.
struct GridSpec {
    std::optional<double> min;
    std::optional<double> max;
    std::optional<int> points;
    std::optional<bool> log;
};

struct ResolvedGrid {
    double min = 0.0;
    double max = 6.0;
    int points = 121;
    bool log = false;

    std::vector<double> values() const;
};

struct ExperimentConfig {
    std::vector<Figure> figures = all_figures();
    PsfSpec psf;
    GridSpec grid;
    GridSpec mc_grid;
    double photons = 1.0;
    std::vector<std::int64_t> detected = {20, 100, 500};
    std::vector<double> xi = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
    /// Misalignment of the binary arm in HybridBounds.
    std::vector<double> hybrid_xi = {0.0};
    int xi_sign = +1;
    std::int64_t trials = 100000;
    std::uint64_t seed = 20160901;
    bool random_detected = false;
    double zero_photon_estimate = 2.0;
    unsigned threads = 0;
    std::filesystem::path output = "results";

    /// Grid defaults: [0, 6] x 121 linear for information curves, log
    /// [0.01, 10] x 61 for localization bounds, [0.05, 2] x 20 for Monte Carlo.
    ResolvedGrid grid_for(Figure f) const;
    void validate() const;
};

/// Flat INI file; see configs/default.ini for every key.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace superres::experiments
