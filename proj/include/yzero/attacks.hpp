#pragma once

// Replays of the label-measurement attack and the countermeasures
// against it: injected label errors, a misaligned phase reference, deliberate
// signal randomization (DSR), the one-time-pad stage model, and exhaustive
// small-key entropy estimates.

#include "yzero/codec.hpp"
#include "yzero/detection.hpp"
#include "yzero/random.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace yzero {

inline constexpr int kMaxSearchKeyBits = 20;
inline constexpr int kMaxEntropyKeyBits = 12;
inline constexpr std::size_t kMaxEntropyLength = 32;

/// A request outside the exhaustive-enumeration regime.
class RegimeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class DsrKind { none, binary, jitter };
std::string to_string(DsrKind k);

struct Dsr {
  DsrKind kind = DsrKind::none;
  double flip = 0.0;    // binary: label flip probability f
  double jitter = 0.0;  // jitter: half-width of the uniform phase noise, radians
};

struct AttackScenario {
  int key_bits = 8;
  std::size_t length = 64;  // N
  Bits errors;              // e; empty means no injected errors
  double misalign = 0.0;    // Eve's axis offset, radians
  Dsr dsr;
  bool otp_mode = false;

  void validate() const;
  Bit error_at(std::size_t i) const { return errors.empty() ? Bit{0} : errors[i]; }
};

Bits error_sequence(std::size_t n, const std::vector<std::size_t>& positions);
Bits inject_errors(const Bits& labels, const Bits& e);

/// Constellation indices whose label changes when the axis turns by `delta`.
std::vector<int> misalignment_flips(const Constellation& c, double delta);

/// Probability that Eve records "up" for a state at `phase`, measuring
/// against `eve_axis`, with the injected error bit and DSR applied.
double eve_up_probability(double phase, double eve_axis, const Dsr& dsr, Bit error);

/// Eve's label sequence L_m: label against the axis turned by the scenario's
/// misalignment (after jitter, if any), xor the injected errors, xor the
/// binary DSR flips.
Bits measure_labels(const std::vector<SymbolRecord>& symbols, const Constellation& c,
                    const AttackScenario& scenario, Rng& rng);

struct CandidateSummary {
  std::uint64_t seeds_tried = 0;
  std::uint64_t candidate_count = 0;  // distinct candidate sequences
  bool true_in_candidates = false;
  std::optional<std::uint64_t> true_key_rank;  // 1 = best match
  int true_seed_distance = 0;
  std::uint64_t collisions = 0;  // other seeds with the same parity sequence as the true seed
  std::vector<double> match_fraction;          // indexed by seed - 1
  std::vector<std::uint64_t> distance_histogram;  // seeds per Hamming distance 0..N
};

/// Applies every nonzero seed's parity sequence to `observed` and compares
/// each candidate `observed xor K~_j` against `target`.
CandidateSummary brute_force_candidates(const Bits& observed, const Bits& target, const KeyFamily& family,
                                        std::optional<std::uint64_t> true_seed, int threads = 1);

struct AttackRecord {
  double misalign = 0.0;
  std::uint64_t true_seed = 0;
  Bits data;             // R_T
  Bits true_labels;      // L_T
  Bits measured_labels;  // L_m
  Bits plaintext;        // X (OTP stage only)
  Bits ciphertext;       // C (OTP stage only)
  std::optional<bool> otp_identity;  // C xor L_m xor K~ == X
  CandidateSummary candidates;
  std::optional<double> mutual_info_estimate;  // bits per symbol
};

/// Direct-encryption replay: Alice sends random R_T under `true_seed`, Eve
/// measures labels and runs the seed search against R_T. `mi_trials` > 0 also
/// estimates I(L_m; R) (requires |K| <= 12).
AttackRecord simulate_attack(const Constellation& c, const KeyFamily& family, std::uint64_t true_seed,
                             const AttackScenario& scenario, std::uint64_t master_seed, int mi_trials = 0,
                             int threads = 1);

/// One-time-pad stage: C = X xor R, R sent through the keyed PSK channel, candidates
/// X_j = C xor L_m xor K~_j.
AttackRecord otp_stage_attack(const Bits& plaintext, const Constellation& c, const KeyFamily& family,
                              std::uint64_t true_seed, const AttackScenario& scenario,
                              std::uint64_t master_seed, int mi_trials = 0, int threads = 1);

/// Exact I(C; X) for C = X xor R, X and R uniform on n bits, by enumerating
/// the joint distribution.
double otp_ciphertext_information(int n_bits);

/// Monte Carlo estimate of I(L_m; R) in bits per symbol, averaging
/// N + log2 P(L_m | R) over trials with the exact channel likelihood
/// (L_m is uniform under every supported channel). Clamped to [0, 1].
double label_mutual_information(const Constellation& c, const KeyFamily& family, const AttackScenario& scenario,
                                std::uint64_t master_seed, int trials, int threads = 1);

/// Shannon entropy in bits of the distribution proportional to exp(logw).
/// Equal or -inf weights give exact results.
double entropy_from_log_weights(const std::vector<double>& logw);

enum class EveRegime { classical, quantum };
std::string to_string(EveRegime r);

struct CiphertextOnlyEntropy {
  double key_entropy = 0.0;     // H(K) = log2(2^|K| - 1)
  double key_given_obs = 0.0;   // H(K | Y_E)
  double data_given_obs = 0.0;  // H(X | Y_E)
  int trials = 0;
};

/// Exhaustive seed posterior given Eve's labels, averaged over `trials`
/// sampled transmissions.
CiphertextOnlyEntropy ciphertext_only_entropy(const Constellation& c, const KeyFamily& family,
                                              const AttackScenario& scenario, std::uint64_t master_seed,
                                              int trials, int threads = 1);

struct KnownPlaintextEntropy {
  double key_entropy = 0.0;
  double key_given_obs_data = 0.0;  // H(K | Y_E, X)
  double residual_floor = 0.0;      // entropy left with perfect observations
  EveRegime regime = EveRegime::classical;
  int trials = 0;
};

/// Exhaustive seed posterior given Eve's observations and the plaintext.
/// Classical regime observes labels; quantum regime observes nearest-of-2M
/// heterodyne decisions.
KnownPlaintextEntropy known_plaintext_key_entropy(const Constellation& c, const KeyFamily& family,
                                                  const AttackScenario& scenario, EveRegime regime,
                                                  std::uint64_t master_seed, int trials, int threads = 1);

struct KeygenRow {
  double energy = 0.0;
  double pe_bob = 0.5;
  double pe_eve = 0.5;
  double advantage = 0.0;  // h2(pe_eve) - h2(pe_bob)
};

/// Bob: Helstrom bound on the keyed antipodal pair. Eve: threshold homodyne.
KeygenRow keygen_advantage(double energy);
std::vector<KeygenRow> keygen_advantage(const std::vector<double>& energies);

/// Randomized scheme with effective energy S': both receivers see an
/// antipodal pair of energy S'/2, so the exponents become 2S' and S'.
KeygenRow randomized_keygen_row(double effective_energy);

}  // namespace yzero
