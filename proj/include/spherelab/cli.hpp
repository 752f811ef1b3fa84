#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

namespace spherelab::cli {

enum ExitCode : int { kOk = 0, kInputError = 1, kInvalidConfiguration = 2, kCriterionFailure = 3 };

inline constexpr const char* kToolVersion = "0.1.0";

struct CommandResult {
  int exit_code = kOk;
  std::string output;
  std::string error;
};

/// DerivedConstants for a {"r_values":[...]} document.
CommandResult cmd_constants(const std::string& config_json, const std::string& format = "json");

/// Rows k, mu_{k,r}, r^k, |mu_{k,r} - r^k| for k = 0..K.
CommandResult cmd_spectral(int n, double r, int K, const std::string& format = "csv");

/// Cap threshold t0 with the requested measure.
CommandResult cmd_threshold(int n, double measure);

struct EstimateRequest {
  nlohmann::json spec;
  std::optional<std::uint64_t> samples;
  std::optional<std::uint64_t> seed;
  int workers = 1;
  std::optional<std::filesystem::path> out_dir;  ///< writes report.json, report.csv, manifest.json
  std::string format = "json";
};

struct EstimateResult {
  int exit_code = kOk;
  nlohmann::json report;
  std::string csv;
  nlohmann::json manifest;
  std::string error;
};

EstimateResult cmd_estimate(const EstimateRequest& request);

/// Re-runs the command recorded in a manifest.
EstimateResult cmd_replay(const nlohmann::json& manifest, int workers,
                          const std::optional<std::filesystem::path>& out_dir);

CommandResult cmd_verify(int workers = 1);

std::string sha256_hex(const std::string& bytes);

/// Serializes JSON with round-trip number formatting.
std::string dump_json(const nlohmann::json& doc);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace spherelab::cli
