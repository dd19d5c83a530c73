#include "output.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <unistd.h>

#include "dh/linalg.hpp"

namespace dhcli {

void Table::add(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw std::logic_error("row width does not match the header");
    rows.push_back(std::move(row));
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

std::string cell_text(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
    if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
    return std::get<std::string>(c);
}

nlohmann::json cell_json(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return *d;
    if (const auto* i = std::get_if<long long>(&c)) return *i;
    return std::get<std::string>(c);
}

}  // namespace

std::string to_csv(const Table& t) {
    std::string s;
    for (std::size_t i = 0; i < t.columns.size(); ++i) s += (i ? "," : "") + t.columns[i];
    s += '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + cell_text(row[i]);
        s += '\n';
    }
    return s;
}

nlohmann::json to_json(const Table& t) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : t.rows) {
        nlohmann::json r = nlohmann::json::object();
        for (std::size_t i = 0; i < row.size(); ++i) r[t.columns[i]] = cell_json(row[i]);
        rows.push_back(std::move(r));
    }
    return {{"columns", t.columns}, {"rows", rows}};
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        f << content;
        f.flush();
        if (!f) throw std::runtime_error("write to " + tmp.string() + " failed");
    }
    std::filesystem::rename(tmp, path);
}

Job::Job(std::string subcommand, std::filesystem::path outDir, Format format)
    : subcommand_(std::move(subcommand)), out_(std::move(outDir)), format_(format) {
    std::filesystem::create_directories(out_);
}

void Job::table(const std::string& stem, const Table& t) {
    if (format_ == Format::csv) {
        write_atomic(out_ / (stem + ".csv"), to_csv(t));
        outputs_.push_back(stem + ".csv");
    } else {
        write_atomic(out_ / (stem + ".json"), to_json(t).dump(1) + "\n");
        outputs_.push_back(stem + ".json");
    }
}

void Job::report(const std::string& stem, const nlohmann::json& j) {
    write_atomic(out_ / (stem + ".json"), j.dump(1) + "\n");
    outputs_.push_back(stem + ".json");
}

void Job::finish(double wallSeconds) {
    nlohmann::json m;
    m["tool"] = "dharper";
    m["version"] = DH_VERSION;
    m["subcommand"] = subcommand_;
    m["parameters"] = params_;
    m["outputs"] = outputs_;
    m["workers"] = dh::worker_count();
    m["wall_time_seconds"] = wallSeconds;
    write_atomic(out_ / (subcommand_ + ".manifest.json"), m.dump(1) + "\n");
}

nlohmann::json error_record(const std::string& kind, const std::string& field, const std::string& message) {
    return {{"error", kind}, {"field", field}, {"message", message}};
}

}  // namespace dhcli
