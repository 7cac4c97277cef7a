#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sinrldp/analytics.hpp"
#include "sinrldp/config.hpp"
#include "sinrldp/partition.hpp"
#include "sinrldp/verify.hpp"

namespace sinrldp {

inline constexpr const char* kToolVersion = "0.3.0";

/// Options under the "experiment" key. Subcommands ignore the fields they do not use.
struct ExperimentOptions {
  std::optional<std::uint64_t> trials;
  std::vector<double> lambda_grid;
  std::uint64_t trial = 0;  // sample, measures: which trial stream to draw

  PlantedPair planted{{{0.3, 0.5}, 1.0}, {{0.7, 0.5}, 1.0}};
  std::optional<double> tune_target;
  std::optional<double> fallback_lambda;  // absent: 2 lambda; 0 disables

  double tolerance = 0.1;
  PhiOptions phi;

  double surrogate_h_star = 2.0;
  double surrogate_mass = 1.0;
  std::optional<double> threshold;
  double threshold_factor = 2.0;  // multiple of the typical edge mass when threshold is absent

  std::optional<std::string> sigma;
  std::optional<std::string> omega;
  std::optional<std::string> nu;
};

struct RunConfig {
  ModelConfig model;
  PartitionRequest partition;
  ExperimentOptions experiment;
};

struct ParsedInput {
  RunConfig config;
  std::optional<std::uint64_t> manifest_seed;
};

/// Parses a configuration document. A RunManifest is accepted too: its
/// "resolved_config" is parsed and its seed returned. Relative paths under
/// "experiment" resolve against `base_dir`. Throws ConfigError naming the key.
ParsedInput parse_config_json(const nlohmann::json& doc,
                              const std::filesystem::path& base_dir = {});
ParsedInput parse_config(const std::filesystem::path& path);

/// Every field with its default filled in; parse_config_json(to_json(c)) == c.
nlohmann::json to_json(const RunConfig& c);
nlohmann::json to_json(const ModelConfig& c);
nlohmann::json to_json(const PartitionSpec& p);
nlohmann::json to_json(const RateReport& r);
nlohmann::json to_json(const ExperimentReport& r);

/// Non-finite numbers become "inf" / "-inf"; NaN becomes null.
nlohmann::json json_number(double v);

enum ExitCode : int { kExitOk = 0, kExitError = 1, kExitVerifyFailed = 2 };

struct RunRequest {
  std::string subcommand;
  std::filesystem::path config_path;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> trials;
  std::optional<std::vector<double>> lambda_grid;
  unsigned threads = 1;
};

/// Runs one subcommand; diagnostics go to stderr.
int run(const RunRequest& req);

/// argv entry point.
int cli_main(int argc, char** argv);

}  // namespace sinrldp
