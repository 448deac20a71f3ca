#include "superres/report_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

#include <fmt/format.h>

#include "superres/errors.hpp"

namespace superres {

void CsvTable::add_row(std::vector<double> row, bool row_failed) {
    if (row.size() != columns.size()) throw InvalidArgument("CsvTable: row width does not match header");
    rows.push_back(std::move(row));
    failed.push_back(row_failed);
}

bool CsvTable::all_failed() const {
    return !failed.empty() && std::all_of(failed.begin(), failed.end(), [](bool f) { return f; });
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return fmt::format("{}", v);
}

void write_csv(std::ostream& out, const CsvTable& table) {
    for (const auto& line : table.metadata) out << "# " << line << '\n';
    for (std::size_t c = 0; c < table.columns.size(); ++c) out << table.columns[c] << ',';
    out << "failed\n";
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        for (double v : table.rows[r]) out << format_number(v) << ',';
        out << (table.failed[r] ? 1 : 0) << '\n';
    }
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    write_csv(out, table);
    if (!out) throw Error("write failed: " + path.string());
}

void write_report_csv(std::ostream& out, const EstimationReport& r, const std::vector<std::string>& metadata) {
    for (const auto& line : metadata) out << "# " << line << '\n';
    out << "theta2,mse,crb,trials,L,xi,scheme,seed\n";
    const std::string scheme = to_string(r.scheme);
    for (std::size_t i = 0; i < r.theta2_grid.size(); ++i) {
        out << fmt::format("{},{},{},{},{},{},{},{}\n", format_number(r.theta2_grid[i]), format_number(r.mse[i]),
                           format_number(r.crb[i]), r.trials, r.photons, format_number(r.xi), scheme, r.seed);
    }
}

nlohmann::json report_to_json(const EstimationReport& r) {
    return {
        {"scheme", to_string(r.scheme)},
        {"L", r.photons},
        {"trials", r.trials},
        {"seed", r.seed},
        {"xi", r.xi},
        {"xi_sign", r.xi_sign},
        {"sigma", r.sigma},
        {"random_L", r.random_photons},
        {"theta2", r.theta2_grid},
        {"mse", r.mse},
        {"crb", r.crb},
    };
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << doc.dump(2) << '\n';
}

}  // namespace superres
