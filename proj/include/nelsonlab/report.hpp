#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace nelson {

struct Metric {
    std::string name;
    double value = 0.0;
};

// Outcome of one experiment: a pass flag with a one-line summary, named
// metrics for the manifest, and an optional numeric table for CSV export.
struct RunResult {
    std::string id;
    bool pass = false;
    std::string detail;
    std::vector<Metric> metrics;
    std::vector<std::string> table_header;
    std::vector<std::vector<double>> table_rows;
};

// RFC 4180 CSV with full-precision (%.17g) numbers.
std::string csv_text(const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows);
void write_text_file(const std::string& path, const std::string& text);

// FNV-1a over raw bytes, for cheap content fingerprints in the manifest.
std::uint64_t fnv1a(const std::string& bytes);

// Writes <out_dir>/manifest.json plus one CSV per experiment table. Output
// is deterministic: no timestamps, ordered keys, hashed table contents.
void write_run_outputs(const std::string& out_dir, const nlohmann::json& scenario_doc,
                       const std::vector<RunResult>& results);

}  // namespace nelson
