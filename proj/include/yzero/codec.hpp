#pragma once

// Coding layer: 2M-phase constellation, LFSR running key, and the
// bit-to-state encoder.

#include "yzero/fockspace.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace yzero {

using Bit = std::uint8_t;
using Bits = std::vector<Bit>;

/// Half-plane side of a phase relative to a labeling axis. up = 1, down = 0,
/// which is what makes l = r xor parity reproduce the (up, even) -> 1 table.
enum class Label : Bit { down = 0, up = 1 };

inline Bit to_bit(Label l) { return static_cast<Bit>(l); }

/// up iff sin(phase - axis) > 0. A phase on the axis is up; on the opposite
/// ray it is down. Phases within 1e-12 rad of either ray count as on it.
Label halfplane_label(double phase, double axis);

/// 2M coherent states on a circle of radius sqrt(S). Basis b pairs the
/// antipodal states j = b and j = b + M.
class Constellation {
 public:
  Constellation(int bases, double energy, double phase_offset = 0.0, bool osk = false,
                bool half_step = false);

  int bases() const { return bases_; }
  int size() const { return 2 * bases_; }
  double energy() const { return energy_; }
  double phase_offset() const { return phase_offset_; }
  bool osk() const { return osk_; }
  /// States sit at offset + pi (j + 1/2) / M, so none lies on the axis.
  bool half_step() const { return half_step_; }
  /// Labeling axis of the legitimate frame.
  double axis() const { return phase_offset_; }

  double phase(int j) const;
  Amplitude amplitude(int j) const;
  std::vector<Amplitude> amplitudes() const;

  /// Index of the state whose phase is nearest to `phase`.
  int nearest_index(double phase) const;

 private:
  int bases_;
  double energy_;
  double phase_offset_;
  bool osk_;
  bool half_step_;
};

bool is_power_of_two(std::uint64_t v);
int log2_exact(std::uint64_t v);

/// Running-key bits consumed per symbol: log2(M), plus one when OSK is on.
int bits_per_symbol(int bases, bool osk);

/// Degree of a feedback polynomial given as a bitmask including the x^d term,
/// e.g. x^4 + x + 1 -> 0x13.
int poly_degree(std::uint64_t poly);

/// A primitive polynomial of the given degree (2..32), as a bitmask.
std::uint64_t primitive_polynomial(int degree);

/// Serialized keystream description: {poly_bitmask_hex, seed_hex, bits_per_symbol}.
struct KeystreamSpec {
  std::uint64_t poly = 0;
  std::uint64_t seed = 0;
  int bits_per_symbol = 0;
};

std::string to_hex(std::uint64_t v);

struct RunningKey {
  int key = 0;      // in [0, M)
  Bit parity = 0;   // key mod 2
  Bit osk_bit = 0;  // extra bit, 0 unless OSK
};

/// Fibonacci LFSR. Each shift outputs bit 0 of the register and feeds the
/// parity of (register & taps) into the top bit. Running keys are assembled
/// most-significant-bit first from log2(M) consecutive output bits; with OSK
/// one further bit becomes the overlap-selection bit.
class Keystream {
 public:
  Keystream(std::uint64_t poly, std::uint64_t seed, int bases, bool osk);
  static Keystream from_spec(const KeystreamSpec& spec, int bases, bool osk);

  Bit step();
  RunningKey next();

  std::uint64_t state() const { return state_; }
  int degree() const { return degree_; }
  int bases() const { return bases_; }
  bool osk() const { return osk_; }
  KeystreamSpec spec(std::uint64_t seed) const { return {poly_, seed, bits_}; }
  std::uint64_t poly() const { return poly_; }

 private:
  std::uint64_t poly_;
  std::uint64_t taps_;
  std::uint64_t state_;
  std::uint64_t top_;
  int degree_;
  int bases_;
  int key_bits_;
  int bits_;
  bool osk_;
};

/// Everything an observer needs to regenerate keystreams for any seed.
struct KeyFamily {
  std::uint64_t poly = 0;
  int bases = 1;
  bool osk = false;

  int key_bits() const { return poly_degree(poly); }
  /// Number of admissible (nonzero) seeds, 2^|K| - 1.
  std::uint64_t seed_count() const { return (std::uint64_t{1} << key_bits()) - 1; }
};

std::vector<RunningKey> running_keys(const KeyFamily& family, std::uint64_t seed, std::size_t n);
/// The parity sequence K~ for a seed.
Bits parity_sequence(const KeyFamily& family, std::uint64_t seed, std::size_t n);

struct SymbolRecord {
  int index = 0;  // j in [0, 2M)
  int basis = 0;  // b in [0, M)
  Bit bit = 0;    // r
  Bit parity = 0;
  Bit osk_flip = 0;
  Label label = Label::down;
  double phase = 0.0;
};

SymbolRecord encode(Bit r, int key, Bit osk_bit, const Constellation& c);
SymbolRecord encode(Bit r, const RunningKey& k, const Constellation& c);

std::vector<SymbolRecord> encode_sequence(const Bits& data, Keystream& ks, const Constellation& c);

Bits labels_of(const std::vector<SymbolRecord>& symbols);
Bits parities_of(const std::vector<SymbolRecord>& symbols);

Bits xor_bits(const Bits& a, const Bits& b);
int hamming(const Bits& a, const Bits& b);

/// Per-index mixture weights (length 2M) of the states carrying a given bit,
/// with the running key uniform over its M values (and over the OSK bit).
std::vector<double> bit_weights(const Constellation& c, Bit r);
/// Per-index weights of the up (or down) labeled states, uniform 1/M.
std::vector<double> label_weights(const Constellation& c, Label l);

struct BitEnsembles {
  DensityMatrix<double> rho0;
  DensityMatrix<double> rho1;
  DensityMatrix<double> rho_total;
  double p0 = 0.5;
};

/// Eve's bit-conditional density operators on a truncated number basis of
/// dimension `dim` (0 picks the dimension from the energy and `trunc_tol`).
BitEnsembles bit_ensembles(const Constellation& c, double p0 = 0.5, Eigen::Index dim = 0,
                           double trunc_tol = tol::truncation);

/// Weighted mixture of the constellation states on a number basis.
DensityMatrix<double> constellation_density(const Constellation& c, const std::vector<double>& weights,
                                            Eigen::Index dim);

}  // namespace yzero
