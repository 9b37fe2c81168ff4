#include "yzero/codec.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace yzero {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kBoundaryTol = 1e-12;

// x^d + ... + 1 for d = 2..32; all primitive over GF(2).
constexpr std::array<std::uint64_t, 33> kPrimitive = {
    0,          0,          0x7,        0xB,        0x13,       0x25,       0x43,
    0x83,       0x11D,      0x211,      0x409,      0x805,      0x1053,     0x201B,
    0x4443,     0x8003,     0x1100B,    0x20009,    0x40081,    0x80027,    0x100009,
    0x200005,   0x400003,   0x800021,   0x100001B,  0x2000009,  0x4000047,  0x8000027,
    0x10000009, 0x20000005, 0x40000053, 0x80000009, 0x1000000AF};

}  // namespace

Label halfplane_label(double phase, double axis) {
  const double d = phase - axis;
  const double s = std::sin(d);
  if (std::abs(s) <= kBoundaryTol) return std::cos(d) > 0.0 ? Label::up : Label::down;
  return s > 0.0 ? Label::up : Label::down;
}

bool is_power_of_two(std::uint64_t v) { return std::has_single_bit(v); }

int log2_exact(std::uint64_t v) {
  if (!is_power_of_two(v)) throw std::invalid_argument("value is not a power of two");
  return std::countr_zero(v);
}

Constellation::Constellation(int bases, double energy, double phase_offset, bool osk, bool half_step)
    : bases_(bases), energy_(energy), phase_offset_(phase_offset), osk_(osk), half_step_(half_step) {
  if (bases < 1 || !is_power_of_two(static_cast<std::uint64_t>(bases)))
    throw std::invalid_argument("Constellation: M must be a positive power of two");
  if (!(energy >= 0.0) || !std::isfinite(energy))
    throw std::invalid_argument("Constellation: energy must be finite and >= 0");
  if (!std::isfinite(phase_offset)) throw std::invalid_argument("Constellation: phase offset must be finite");
}

double Constellation::phase(int j) const {
  const double slot = half_step_ ? j + 0.5 : static_cast<double>(j);
  return phase_offset_ + kPi * slot / bases_;
}

Amplitude Constellation::amplitude(int j) const { return std::polar(std::sqrt(energy_), phase(j)); }

std::vector<Amplitude> Constellation::amplitudes() const {
  std::vector<Amplitude> out(static_cast<std::size_t>(size()));
  for (int j = 0; j < size(); ++j) out[static_cast<std::size_t>(j)] = amplitude(j);
  return out;
}

int Constellation::nearest_index(double phase) const {
  const double step = kPi / bases_;
  const double rel = phase - phase_offset_ - (half_step_ ? 0.5 * step : 0.0);
  const long k = std::lround(rel / step);
  const long n = size();
  return static_cast<int>(((k % n) + n) % n);
}

int bits_per_symbol(int bases, bool osk) {
  return log2_exact(static_cast<std::uint64_t>(bases)) + (osk ? 1 : 0);
}

int poly_degree(std::uint64_t poly) {
  if (poly < 2) throw std::invalid_argument("feedback polynomial must have degree >= 1");
  return 63 - std::countl_zero(poly);
}

std::uint64_t primitive_polynomial(int degree) {
  if (degree < 2 || degree > 32) throw std::out_of_range("primitive_polynomial: degree must be in [2, 32]");
  return kPrimitive[static_cast<std::size_t>(degree)];
}

std::string to_hex(std::uint64_t v) {
  std::ostringstream os;
  os << "0x" << std::hex << std::uppercase << v;
  return os.str();
}

Keystream::Keystream(std::uint64_t poly, std::uint64_t seed, int bases, bool osk)
    : poly_(poly), bases_(bases), osk_(osk) {
  degree_ = poly_degree(poly);
  if (degree_ > 63) throw std::invalid_argument("Keystream: degree too large");
  if ((poly & 1) == 0) throw std::invalid_argument("Keystream: polynomial needs a constant term");
  top_ = std::uint64_t{1} << (degree_ - 1);
  taps_ = poly & ((std::uint64_t{1} << degree_) - 1);
  const std::uint64_t mask = (std::uint64_t{1} << degree_) - 1;
  if (seed == 0 || (seed & ~mask) != 0)
    throw std::invalid_argument("Keystream: seed must be a nonzero " + std::to_string(degree_) + "-bit value");
  state_ = seed;
  key_bits_ = log2_exact(static_cast<std::uint64_t>(bases));
  bits_ = key_bits_ + (osk ? 1 : 0);
}

Keystream Keystream::from_spec(const KeystreamSpec& spec, int bases, bool osk) {
  Keystream ks(spec.poly, spec.seed, bases, osk);
  if (spec.bits_per_symbol != 0 && spec.bits_per_symbol != ks.bits_)
    throw std::invalid_argument("Keystream: bits_per_symbol " + std::to_string(spec.bits_per_symbol) +
                                " does not match M/OSK (expected " + std::to_string(ks.bits_) + ")");
  return ks;
}

Bit Keystream::step() {
  const auto out = static_cast<Bit>(state_ & 1u);
  const auto fb = static_cast<std::uint64_t>(std::popcount(state_ & taps_) & 1);
  state_ = (state_ >> 1) | (fb ? top_ : 0);
  return out;
}

RunningKey Keystream::next() {
  RunningKey rk;
  for (int i = 0; i < key_bits_; ++i) rk.key = (rk.key << 1) | step();
  rk.parity = static_cast<Bit>(rk.key & 1);
  if (osk_) rk.osk_bit = step();
  return rk;
}

std::vector<RunningKey> running_keys(const KeyFamily& family, std::uint64_t seed, std::size_t n) {
  Keystream ks(family.poly, seed, family.bases, family.osk);
  std::vector<RunningKey> out(n);
  for (auto& k : out) k = ks.next();
  return out;
}

Bits parity_sequence(const KeyFamily& family, std::uint64_t seed, std::size_t n) {
  Keystream ks(family.poly, seed, family.bases, family.osk);
  Bits out(n);
  for (auto& b : out) b = ks.next().parity;
  return out;
}

SymbolRecord encode(Bit r, int key, Bit osk_bit, const Constellation& c) {
  if (key < 0 || key >= c.bases()) throw std::out_of_range("encode: running key outside [0, M)");
  SymbolRecord s;
  s.basis = key;
  s.bit = r & 1u;
  s.parity = static_cast<Bit>(key & 1);
  s.osk_flip = osk_bit & 1u;
  const Bit effective = s.bit ^ s.osk_flip;
  const auto target = static_cast<Label>(effective ^ s.parity);
  s.index = halfplane_label(c.phase(key), c.axis()) == target ? key : key + c.bases();
  s.label = target;
  s.phase = c.phase(s.index);
  return s;
}

SymbolRecord encode(Bit r, const RunningKey& k, const Constellation& c) {
  return encode(r, k.key, k.osk_bit, c);
}

std::vector<SymbolRecord> encode_sequence(const Bits& data, Keystream& ks, const Constellation& c) {
  if (ks.bases() != c.bases() || ks.osk() != c.osk())
    throw std::invalid_argument("encode_sequence: keystream and constellation disagree on M/OSK");
  std::vector<SymbolRecord> out;
  out.reserve(data.size());
  for (Bit r : data) out.push_back(encode(r, ks.next(), c));
  return out;
}

Bits labels_of(const std::vector<SymbolRecord>& symbols) {
  Bits out(symbols.size());
  for (std::size_t i = 0; i < symbols.size(); ++i) out[i] = to_bit(symbols[i].label);
  return out;
}

Bits parities_of(const std::vector<SymbolRecord>& symbols) {
  Bits out(symbols.size());
  for (std::size_t i = 0; i < symbols.size(); ++i) out[i] = symbols[i].parity;
  return out;
}

Bits xor_bits(const Bits& a, const Bits& b) {
  if (a.size() != b.size()) throw std::invalid_argument("xor_bits: length mismatch");
  Bits out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] ^ b[i];
  return out;
}

int hamming(const Bits& a, const Bits& b) {
  if (a.size() != b.size()) throw std::invalid_argument("hamming: length mismatch");
  int d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] != b[i]);
  return d;
}

std::vector<double> bit_weights(const Constellation& c, Bit r) {
  std::vector<double> w(static_cast<std::size_t>(c.size()), 0.0);
  const int flips = c.osk() ? 2 : 1;
  const double q = 1.0 / (c.bases() * flips);
  for (int k = 0; k < c.bases(); ++k)
    for (int s = 0; s < flips; ++s) w[static_cast<std::size_t>(encode(r, k, static_cast<Bit>(s), c).index)] += q;
  return w;
}

std::vector<double> label_weights(const Constellation& c, Label l) {
  std::vector<double> w(static_cast<std::size_t>(c.size()), 0.0);
  for (int j = 0; j < c.size(); ++j)
    if (halfplane_label(c.phase(j), c.axis()) == l) w[static_cast<std::size_t>(j)] = 1.0 / c.bases();
  return w;
}

DensityMatrix<double> constellation_density(const Constellation& c, const std::vector<double>& weights,
                                            Eigen::Index dim) {
  std::vector<FockVector<double>> states;
  std::vector<double> probs;
  for (int j = 0; j < c.size(); ++j) {
    const double w = weights.at(static_cast<std::size_t>(j));
    if (w == 0.0) continue;
    states.push_back(coherent_fock(c.amplitude(j), dim));
    probs.push_back(w);
  }
  return density_from_ensemble(states, probs);
}

BitEnsembles bit_ensembles(const Constellation& c, double p0, Eigen::Index dim, double trunc_tol) {
  if (!(p0 >= 0.0 && p0 <= 1.0)) throw std::invalid_argument("bit_ensembles: prior outside [0, 1]");
  if (dim == 0) dim = truncation_dim(c.energy(), trunc_tol);
  auto rho0 = constellation_density(c, bit_weights(c, 0), dim);
  auto rho1 = constellation_density(c, bit_weights(c, 1), dim);
  MatrixXcd total = p0 * rho0.matrix() + (1.0 - p0) * rho1.matrix();
  auto rho_total = DensityMatrix<double>::from_matrix(
      std::move(total), std::max(rho0.truncation_deficit(), rho1.truncation_deficit()));
  return {std::move(rho0), std::move(rho1), std::move(rho_total), p0};
}

}  // namespace yzero
