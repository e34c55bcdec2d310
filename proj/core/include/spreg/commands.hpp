#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "spreg/config.hpp"
#include "spreg/fit.hpp"

namespace spreg {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

struct CommandOptions {
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;  // overrides the config's seed
  std::filesystem::path out = "out";
  int threads = 0;  // 0: take the config's value
};

/// Loads the config, runs the command and maps failures to exit codes:
/// ConfigError -> 2, NumericalError / DomainError -> 3, anything else -> 1.
/// Progress goes to `log`, error messages to `err`.
int run_command(Command command, const CommandOptions& options, std::ostream& log, std::ostream& err);

/// Fit bundle: summary.json, chain.csv (MCMC, optional) and manifest.json.
void cmd_fit(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);
/// report.json, report.csv and manifest.json.
void cmd_simulate(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);
/// qq.csv, diagnostics.json, ratios.csv (ratio mode) and manifest.json.
void cmd_diagnose(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);
/// predictions.csv and manifest.json.
void cmd_predict(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);

/// A fit read back from a bundle directory.
struct LoadedBundle {
  RunConfig config;
  FitResult fit;
  std::filesystem::path data;  // resolved data path recorded at fit time
};

/// Throws ConfigError if the directory is not a readable fit bundle.
LoadedBundle load_bundle(const std::filesystem::path& dir);

}  // namespace spreg
