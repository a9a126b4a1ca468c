#pragma once

// Config-driven scenario runner: INI parameters, a registry of named
// scenarios, deterministic output files and a hashed manifest.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qfep/channel.hpp"

namespace qfep {

enum class LogLevel { quiet = 0, info = 1, debug = 2 };
// From QFEP_LOG (quiet | info | debug, or 0-2); info when unset.
LogLevel log_level();
void log_line(LogLevel level, const std::string &msg);

struct RunConfig {
    std::string scenario;
    std::uint64_t seed = 0;
    std::filesystem::path out_dir;
    // Flattened "key" -> value for the scenario; taken from the section named
    // after the scenario plus any top-level keys.
    std::map<std::string, std::string> params;
    std::string config_text;
    std::filesystem::path config_dir;
    // Command-line sampling override: 0 forces exact mode.
    std::optional<std::size_t> shots;
};

std::vector<std::string> scenario_names();
bool has_scenario(const std::string &name);

// Parses INI text. Throws parse-error with the offending line.
std::map<std::string, std::string> parse_config_text(const std::string &text, const std::string &scenario);
RunConfig load_run_config(const std::string &scenario, const std::optional<std::filesystem::path> &config_file,
                          std::uint64_t seed, const std::filesystem::path &out_dir);

struct RunOutput {
    // File name -> contents, written under out_dir.
    std::map<std::string, std::string> files;
};

// Runs the scenario and writes its files plus manifest.json. Unknown
// scenarios and bad parameters raise validation-error before anything runs.
RunOutput run(const RunConfig &config);
// Same, without touching the filesystem (manifest included).
RunOutput run_in_memory(const RunConfig &config);

std::string sha256_hex(const std::string &bytes);

// Reads and validates a context CSV file.
ContextFamily ingest_contexts(const std::filesystem::path &path);

}  // namespace qfep
