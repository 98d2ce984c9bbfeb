#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dde/sim.hpp"
#include "dde/trace.hpp"

namespace dde::cli {

// Defaults shared by every subcommand, loaded from the file named by DDE_CONFIG.
struct PipelineConfig {
    std::vector<std::filesystem::path> inputs;
    std::optional<std::filesystem::path> output;
    VadConfig vad;
    std::int64_t window_ms = kDefaultWindowMs;
    int num_merges = 200;
    int base_alphabet_size = 500;
    SimRun sim;
    std::string report_format = "table";
};

PipelineConfig pipeline_config_from_json(const std::string& text);

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

std::optional<std::string> system_env(const std::string& name);

// args excludes the program name. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const EnvLookup& env = system_env);

} // namespace dde::cli
