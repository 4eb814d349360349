#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace rfilt {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "RFILT_OUT_DIR";

struct RunConfig {
  std::string command;
  std::string model_id = "linear_gaussian";
  std::map<std::string, double> model_params;
  std::string f = "identity";
  double T = 1.0;
  std::size_t steps = 256;
  std::size_t particles = 1000;
  double p = 2.5;
  double alpha = 0.3;
  double epsilon = 0.05;
  std::vector<std::size_t> meshes{4, 8, 16, 32, 64};
  std::vector<double> delta_seq{1.0, 0.5, 0.25, 0.125};
  std::uint64_t seed = 1;
  std::size_t seeds = 1;
  std::size_t levels = 5;
  std::string input, input2;  // path CSVs for lift / metrics / rde
  std::filesystem::path out;
};

std::vector<std::string> commands();

/// Flat `key = value` text; `#` starts a comment. Model parameters use the
/// prefix `param.` (e.g. `param.kappa = 0.3`).
std::map<std::string, std::string> parse_flat_config(const std::string& text);
std::string format_flat_config(const std::map<std::string, std::string>& kv);

/// Applies key-value pairs to a config; unknown keys are rejected.
void apply_settings(RunConfig& c, const std::map<std::string, std::string>& kv);
std::map<std::string, std::string> to_key_values(const RunConfig& c);

/// Throws rf::ValidationError on unknown commands, models, or out-of-range
/// parameters.
void validate(const RunConfig& c);

struct RunResult {
  int status = kExitOk;
  std::string message;
  std::vector<std::filesystem::path> artifacts;
  std::filesystem::path manifest;
};

/// Runs the pipeline and writes artifacts plus manifest.json into c.out
/// (default: $RFILT_OUT_DIR, else ./rfilt_out/<command>). Never throws.
RunResult run(const RunConfig& c);

/// Reads the config echoed into a manifest.
RunConfig config_from_manifest(const std::filesystem::path& manifest);

/// Command-line entry point (argument parsing, run, exit status).
int main_entry(int argc, char** argv);

}  // namespace rfilt
