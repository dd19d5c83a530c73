#include "commands.hpp"

#include "dh/linalg.hpp"

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <regex>

namespace {

using nlohmann::json;

json parse_scalar(const std::string& s) {
    if (s.empty()) return s;
    char* end = nullptr;
    const long long i = std::strtoll(s.c_str(), &end, 10);
    if (*end == '\0') return i;
    const double d = std::strtod(s.c_str(), &end);
    if (*end == '\0') return d;
    if (s == "true") return true;
    if (s == "false") return false;
    return s;
}

json options_of(const CLI::App* app) {
    json out = json::object();
    for (const CLI::Option* o : app->get_options()) {
        if (o->get_lnames().empty() || o->get_lnames()[0] == "help") continue;
        const std::string name = o->get_lnames()[0];
        if (o->count() > 0) {
            const auto r = o->results();
            out[name] = parse_scalar(r.empty() ? "" : r.back());
        } else {
            out[name] = parse_scalar(o->get_default_str());
        }
    }
    return out;
}

int fail(int code, const std::string& kind, const std::string& field, const std::string& message) {
    std::cerr << dhcli::error_record(kind, field, message).dump() << '\n';
    return code;
}

std::string field_from_message(const std::string& msg) {
    std::smatch m;
    static const std::regex re("--([A-Za-z0-9_-]+)");
    if (std::regex_search(msg, m, re)) return m[1];
    return "";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dharper: Dirac-Harper moire tight-binding toolkit"};
    app.set_version_flag("--version", std::string(DH_VERSION));
    app.require_subcommand(1);
    app.fallthrough();
    app.option_defaults()->always_capture_default();

    std::string out = ".";
    std::string format = "csv";
    int workers = 0;
    unsigned long long seed = 1;
    app.add_option("--out", out, "output directory");
    app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--workers", workers, "worker threads (0: hardware concurrency)")->check(CLI::NonNegativeNumber);
    app.add_option("--seed", seed, "global seed, recorded in the manifest");

    auto commands = dhcli::add_commands(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail(2, "config", field_from_message(e.what()), e.what());
    }

    if (workers > 0) setenv("DH_WORKERS", std::to_string(workers).c_str(), 1);

    for (auto& c : commands) {
        if (!c.app->parsed()) continue;
        try {
            const auto t0 = std::chrono::steady_clock::now();
            dhcli::Job job(c.name, out, format == "json" ? dhcli::Format::json : dhcli::Format::csv);
            job.parameters() = options_of(c.app);
            job.parameters()["seed"] = seed;
            c.run(job);
            const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - t0;
            job.finish(wall.count());
        } catch (const dh::ConfigError& e) {
            return fail(2, "config", e.field(), e.what());
        } catch (const dh::NumericalGuardError& e) {
            return fail(3, "numerical_guard", "", e.what());
        } catch (const std::exception& e) {
            return fail(1, "internal", "", e.what());
        }
    }
    return 0;
}
