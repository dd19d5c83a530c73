#pragma once

#include "output.hpp"

#include <CLI11.hpp>

#include <functional>
#include <string>
#include <vector>

namespace dhcli {

struct Command {
    std::string name;
    CLI::App* app = nullptr;
    std::function<void(Job&)> run;
};

/// Adds the fourteen subcommands to app.
std::vector<Command> add_commands(CLI::App& app);

}  // namespace dhcli
