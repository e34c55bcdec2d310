#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spreg/experiments.hpp"
#include "spreg/fit.hpp"
#include "spreg/io.hpp"
#include "spreg/mle.hpp"

namespace spreg {

enum class Command { fit, simulate, diagnose, predict };

std::string to_string(Command c);
Command parse_command(std::string_view name);

enum class Method { mcmc, mle };

/// Parsed run configuration. Relative paths are resolved against the config file's directory.
struct RunConfig {
  std::optional<Command> command;  // when the file names one
  std::uint64_t seed = 1;
  int threads = 1;

  // fit
  std::filesystem::path data;
  DataSchema schema;
  std::optional<ModelSpec> model;
  Method method = Method::mcmc;
  ChainSettings chain;
  MleOptions mle;
  bool write_chain = true;
  bool exp_means = false;

  // simulate
  std::string study;  // coverage | dic_selection | gpd_tail
  ScenarioSpec scenario;
  DicSelectionSpec dic_selection;
  GpdTailSpec gpd_tail;

  // diagnose / predict
  std::vector<std::filesystem::path> fits;  // bundle directories
  PredictRequest predict;
  double level = 0.95;
  bool ratios = false;  // diagnose: CI-width ratios of fits[0] over fits[1]

  /// Canonical JSON of the effective configuration (sorted keys, seed applied)
  /// and its FNV-1a hash; both end up in every output's provenance.
  std::string canonical;
  std::string hash;
};

/// Throws ConfigError on malformed JSON, unknown keys or invalid values.
RunConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir = {},
                       std::optional<std::uint64_t> seed_override = std::nullopt);
RunConfig load_config(const std::filesystem::path& file, std::optional<std::uint64_t> seed_override = std::nullopt);

}  // namespace spreg
