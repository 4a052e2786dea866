#pragma once

// Command dispatch for the pinlab front end: validation, result caching,
// run manifests and output files.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pinlab/app/config.hpp"

namespace pinlab::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNumerical = 2;
inline constexpr int kExitVerify = 3;

inline constexpr const char* kRngId = "philox4x64-10";

struct VerifyLine {
    std::string id;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

/// Runs an acceptance suite, writing one line per criterion to the stream.
using VerifyHook = std::function<std::vector<VerifyLine>(const std::string& suite, std::ostream& log)>;

struct RunOptions {
    std::optional<std::uint64_t> seed;
    int threads = 0;  ///< 0 keeps the runtime default
    std::optional<std::string> out_dir;
    std::optional<std::string> format;
    std::string suite = "fast";
    bool use_cache = true;
    VerifyHook verify;
};

/// What a command produced: file name to contents, plus per-task seeds.
struct CommandResult {
    std::map<std::string, std::string> files;
    nlohmann::json seeds = nlohmann::json::array();
    int exit_code = kExitOk;
    std::string summary;
};

const std::vector<std::string>& command_names();

/// Validates, consults the cache, runs, and writes outputs plus the manifest
/// into the output directory. Returns the process exit code; messages go to
/// err.
int run_command(const std::string& name, ConfigFile file, const RunOptions& opts, std::ostream& out,
                std::ostream& err);

/// The pure computation behind run_command, without caching or file output.
CommandResult execute(const std::string& name, const ExperimentConfig& cfg, const RunOptions& opts);

/// Cache key for a validated configuration and command.
std::uint64_t cache_key(const ConfigFile& file, const std::string& command);

std::string hex64(std::uint64_t v);

}  // namespace pinlab::app
