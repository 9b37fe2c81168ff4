#pragma once

// Scenario files: INI-style text with [constellation], [keystream],
// [scenario] and [output] sections of `key = value` lines. Lists are comma
// separated; `#` and `;` start comments.

#include "yzero/attacks.hpp"
#include "yzero/codec.hpp"
#include "yzero/detection.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace yzero {

/// Malformed or incomplete configuration. `line` is 0 when the problem is a
/// missing key rather than a specific line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& what)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

enum class Family { bounds, attack, entropy, keygen };
std::string to_string(Family f);
std::optional<Family> parse_family(const std::string& s);

enum class BoundsMethod { helstrom_mixed_bit, srm_2M, updown };
std::string to_string(BoundsMethod m);

enum class EntropyAnalysis { ciphertext_only, known_plaintext, both };

struct ScenarioConfig {
  Family family = Family::bounds;

  // [constellation]
  std::vector<int> bases;
  std::vector<double> energies;
  double phase_offset = 0.0;
  bool osk = false;
  bool half_step = false;

  // [keystream]
  std::optional<KeystreamSpec> keystream;

  // [scenario]
  std::vector<BoundsMethod> methods;
  EvalPath path = EvalPath::automatic;
  double truncation_tol = tol::truncation;
  double prior0 = 0.5;
  std::size_t length = 64;
  std::vector<std::size_t> error_positions;
  std::vector<double> misalign{0.0};
  int misalign_uniform_draws = 0;
  Dsr dsr;
  bool otp = false;
  EveRegime regime = EveRegime::classical;
  EntropyAnalysis analysis = EntropyAnalysis::both;
  std::optional<std::uint64_t> master_seed;
  int trials = 0;
  std::vector<double> sprime;
  std::uint64_t homodyne_trials = 0;
  double homodyne_check_energy = 4.0;

  // [output]
  std::string csv;
  std::string json;
  std::string seeds_csv;
  std::string manifest;

  // Provenance.
  std::string text;
  std::map<std::string, int> lines;  // "section.key" -> line number

  int line_of(const std::string& key) const;
  bool uses_monte_carlo() const;
  KeyFamily key_family() const;
  AttackScenario attack_scenario(double misalign_value) const;
};

/// Parses and validates. Structural and semantic problems raise ConfigError;
/// requests beyond the exhaustive-enumeration caps raise RegimeError.
ScenarioConfig parse_config(const std::string& text, std::optional<Family> expected = std::nullopt);
ScenarioConfig load_config(const std::filesystem::path& path, std::optional<Family> expected = std::nullopt);

void validate(const ScenarioConfig& cfg);

/// FNV-1a 64-bit hash of the config text, as 16 hex digits.
std::string config_hash(const std::string& text);

}  // namespace yzero
