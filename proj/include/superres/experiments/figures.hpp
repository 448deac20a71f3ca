#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "superres/experiments/config.hpp"
#include "superres/montecarlo.hpp"
#include "superres/report_io.hpp"

namespace superres::experiments {

/// One emitted CSV. Information figures fill `table`; Monte Carlo figures
/// fill `report` (written in the report layout plus a JSON sidecar).
struct Dataset {
    std::string stem;
    CsvTable table;
    std::optional<EstimationReport> report;
    std::vector<std::string> metadata;

    bool all_failed() const { return !report && table.all_failed(); }
    std::size_t failed_points() const;
};

std::vector<Dataset> build_figure(Figure figure, const ExperimentConfig& cfg);

/// Writes `<stem>.csv` (and `<stem>.json` for reports) into `dir`.
std::vector<std::filesystem::path> write_dataset(const std::filesystem::path& dir, const Dataset& d,
                                                 const ExperimentConfig& cfg);

nlohmann::json config_to_json(const ExperimentConfig& cfg);

struct RunSummary {
    std::vector<std::filesystem::path> files;
    std::size_t failed_points = 0;
    bool curve_failed = false;  // some curve failed at every point
};

/// Builds and writes every selected figure plus manifest.json. Progress
/// lines go to `log`.
RunSummary run(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace superres::experiments
