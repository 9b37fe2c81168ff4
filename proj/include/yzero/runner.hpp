#pragma once

// Scenario runner behind the `yzero` command line tool.

#include "yzero/config.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace yzero {

inline constexpr const char* kToolVersion = "0.3.1";

struct RunOptions {
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed;  // overrides master_seed
  int threads = 1;
  std::string config_path;
};

struct RunResult {
  std::vector<std::filesystem::path> data_files;
  std::filesystem::path manifest;
};

struct BoundsRow {
  int bases = 0;
  double energy = 0.0;
  BoundsMethod method = BoundsMethod::helstrom_mixed_bit;
  double p_error = 0.0;
  Eigen::Index dim_used = 0;
  double truncation_deficit = 0.0;
};

std::vector<BoundsRow> compute_bounds(const ScenarioConfig& cfg, int threads = 1);

struct KeygenTable {
  std::vector<KeygenRow> plain;
  std::vector<KeygenRow> randomized;
  std::optional<ExponentFit> fit_bob, fit_eve;
  std::optional<ExponentFit> fit_bob_randomized, fit_eve_randomized;
};

KeygenTable compute_keygen(const ScenarioConfig& cfg);

RunResult run_bounds(const ScenarioConfig& cfg, const RunOptions& opts);
RunResult run_attack(const ScenarioConfig& cfg, const RunOptions& opts);
RunResult run_entropy(const ScenarioConfig& cfg, const RunOptions& opts);
RunResult run_keygen(const ScenarioConfig& cfg, const RunOptions& opts);
RunResult run(const ScenarioConfig& cfg, const RunOptions& opts);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace yzero
