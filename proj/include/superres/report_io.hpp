#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "superres/montecarlo.hpp"

namespace superres {

/// A figure-ready table. Each metadata line is written prefixed with "# ";
/// rows flagged as failed carry NaN cells and failed=1 in the last column.
struct CsvTable {
    std::vector<std::string> metadata;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<bool> failed;

    void add_row(std::vector<double> row, bool row_failed = false);
    bool all_failed() const;
};

/// Shortest representation that round-trips a double ("nan", "inf" for
/// non-finite values).
std::string format_number(double v);

void write_csv(std::ostream& out, const CsvTable& table);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

/// Columns: theta2, mse, crb, trials, L, xi, scheme, seed.
void write_report_csv(std::ostream& out, const EstimationReport& report,
                      const std::vector<std::string>& metadata = {});
nlohmann::json report_to_json(const EstimationReport& report);

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace superres
