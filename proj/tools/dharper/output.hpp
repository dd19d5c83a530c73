#pragma once

// Artifact writing for the dharper tool: CSV / JSON tables, manifests and
// the machine-readable error record. Every file is written to a temporary
// name and renamed into place.

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace dhcli {

using Cell = std::variant<double, long long, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row);
};

enum class Format { csv, json };

/// "%.17g" for doubles so that every value round-trips.
std::string format_double(double x);

std::string to_csv(const Table& t);
nlohmann::json to_json(const Table& t);

void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Collects the artifacts of one job and writes the manifest last.
class Job {
public:
    Job(std::string subcommand, std::filesystem::path outDir, Format format);

    /// Writes <out>/<stem>.csv or .json depending on the format.
    void table(const std::string& stem, const Table& t);
    /// Writes <out>/<stem>.json.
    void report(const std::string& stem, const nlohmann::json& j);

    nlohmann::json& parameters() { return params_; }
    void finish(double wallSeconds);

private:
    std::string subcommand_;
    std::filesystem::path out_;
    Format format_;
    nlohmann::json params_ = nlohmann::json::object();
    std::vector<std::string> outputs_;
};

nlohmann::json error_record(const std::string& kind, const std::string& field, const std::string& message);

}  // namespace dhcli
