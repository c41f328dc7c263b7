#include "nelsonlab/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "nelsonlab/grid.hpp"

namespace nelson {

std::string csv_text(const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows) {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out += ',';
        // Headers are plain identifiers; quote defensively if needed.
        if (header[i].find_first_of(",\"\n") != std::string::npos) {
            out += '"';
            for (char c : header[i]) {
                out += c;
                if (c == '"') out += '"';
            }
            out += '"';
        } else {
            out += header[i];
        }
    }
    out += "\r\n";
    char buf[64];
    for (const auto& row : rows) {
        if (row.size() != header.size()) {
            throw ConfigError("CSV row length does not match the header");
        }
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            std::snprintf(buf, sizeof(buf), "%.17g", row[i]);
            out += buf;
        }
        out += "\r\n";
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file: " + path);
    out << text;
    if (!out) throw ConfigError("failed writing output file: " + path);
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

void write_run_outputs(const std::string& out_dir, const nlohmann::json& scenario_doc,
                       const std::vector<RunResult>& results) {
    std::filesystem::create_directories(out_dir);
    nlohmann::ordered_json manifest;
    manifest["scenario"] = scenario_doc;
    manifest["conventions"] =
        "unitary DFT; plain mesh-weighted L2 pairings; energies normalized with (2pi)^-d; "
        "frequencies on 2 pi k / L; particle index slowest in flattened tensors";
    nlohmann::ordered_json out_results = nlohmann::ordered_json::array();
    bool all_pass = true;
    for (const RunResult& r : results) {
        nlohmann::ordered_json entry;
        entry["id"] = r.id;
        entry["pass"] = r.pass;
        entry["detail"] = r.detail;
        nlohmann::ordered_json metrics;
        for (const Metric& m : r.metrics) metrics[m.name] = m.value;
        entry["metrics"] = metrics;
        if (!r.table_header.empty()) {
            const std::string csv = csv_text(r.table_header, r.table_rows);
            const std::string file = r.id + ".csv";
            write_text_file(out_dir + "/" + file, csv);
            entry["table"] = file;
            char hash[32];
            std::snprintf(hash, sizeof(hash), "0x%016llx",
                          static_cast<unsigned long long>(fnv1a(csv)));
            entry["table_hash"] = hash;
        }
        out_results.push_back(entry);
        all_pass = all_pass && r.pass;
    }
    manifest["results"] = out_results;
    manifest["all_pass"] = all_pass;
    write_text_file(out_dir + "/manifest.json", manifest.dump(2) + "\n");
}

}  // namespace nelson
