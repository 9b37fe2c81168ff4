#include "yzero/attacks.hpp"

#include "yzero/parallel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <unordered_map>

namespace yzero {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::uint64_t kEnumerationBudget = std::uint64_t{1} << 24;
constexpr int kInnerSamples = 256;
constexpr double kConfusionFloor = 1e-300;

// Random-stream ids under one master seed.
enum Stream : std::uint64_t { data_stream = 0, dsr_stream = 1, mi_stream = 3, cto_stream = 4, cto_inner = 5, kpa_stream = 6 };

using Words = std::vector<std::uint64_t>;

std::size_t word_count(std::size_t n) { return (n + 63) / 64; }

void pack_into(const Bits& b, std::uint64_t* out) {
  for (std::size_t i = 0; i < b.size(); ++i)
    if (b[i]) out[i / 64] |= std::uint64_t{1} << (i % 64);
}

Bits random_bits(std::size_t n, Rng& rng) {
  std::bernoulli_distribution coin(0.5);
  Bits out(n);
  for (auto& b : out) b = coin(rng) ? 1 : 0;
  return out;
}

std::uint64_t random_seed(const KeyFamily& family, Rng& rng) {
  return std::uniform_int_distribution<std::uint64_t>(1, family.seed_count())(rng);
}

// Measure of {x in [0, t] : x mod 2pi in [0, pi)}, extended to negative t.
double up_measure(double t) {
  const double turns = std::floor(t / (2.0 * kPi));
  const double rem = t - turns * 2.0 * kPi;
  return turns * kPi + std::min(rem, kPi);
}

double logsumexp(const std::vector<double>& v) {
  const double m = *std::max_element(v.begin(), v.end());
  if (m == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double x : v) acc += std::exp(x - m);
  return m + std::log(acc);
}

// Sample mean; exact when every sample is the same value.
double mean_of(const std::vector<double>& v) {
  if (std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); })) return v.front();
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

void require_entropy_regime(const KeyFamily& family, const AttackScenario& scenario) {
  if (family.key_bits() > kMaxEntropyKeyBits)
    throw RegimeError("entropy estimates need |K| <= " + std::to_string(kMaxEntropyKeyBits));
  if (scenario.length > kMaxEntropyLength)
    throw RegimeError("entropy estimates need N <= " + std::to_string(kMaxEntropyLength));
}

void check_family(const Constellation& c, const KeyFamily& family, const AttackScenario& scenario) {
  scenario.validate();
  if (family.bases != c.bases() || family.osk != c.osk())
    throw std::invalid_argument("key family and constellation disagree on M/OSK");
  if (family.key_bits() != scenario.key_bits)
    throw std::invalid_argument("scenario |K| does not match the feedback polynomial degree");
}

// Eve's per-symbol label channel for every seed: P(up | r, seed) at each
// position, with misalignment, injected errors and DSR folded in.
class LabelChannel {
 public:
  LabelChannel(const Constellation& c, const KeyFamily& family, const AttackScenario& scenario)
      : seeds_(family.seed_count()), n_(scenario.length), up_(seeds_ * n_ * 2) {
    const double eve_axis = c.axis() + scenario.misalign;
    for (std::uint64_t s = 0; s < seeds_; ++s) {
      const auto keys = running_keys(family, s + 1, n_);
      for (std::size_t i = 0; i < n_; ++i)
        for (Bit r = 0; r < 2; ++r) {
          const int j = encode(r, keys[i], c).index;
          up_[(s * n_ + i) * 2 + r] = eve_up_probability(c.phase(j), eve_axis, scenario.dsr, scenario.error_at(i));
        }
    }
  }

  std::uint64_t seeds() const { return seeds_; }
  std::size_t length() const { return n_; }

  double prob(std::uint64_t s, std::size_t i, Bit r, Bit l) const {
    const double p = up_[(s * n_ + i) * 2 + r];
    return l ? p : 1.0 - p;
  }

  double log_likelihood(std::uint64_t s, const Bits& labels, const Bits& data) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < n_; ++i) acc += std::log(prob(s, i, data[i], labels[i]));
    return acc;
  }

  // log P(L | seed) with R uniform.
  double log_marginal(std::uint64_t s, const Bits& labels) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < n_; ++i)
      acc += std::log(0.5 * (prob(s, i, 0, labels[i]) + prob(s, i, 1, labels[i])));
    return acc;
  }

  // P(r_i = 1 | l_i, seed) with a uniform prior on r_i.
  double bit_one_posterior(std::uint64_t s, std::size_t i, Bit l) const {
    const double p0 = prob(s, i, 0, l), p1 = prob(s, i, 1, l);
    return p1 / (p0 + p1);
  }

 private:
  std::uint64_t seeds_;
  std::size_t n_;
  std::vector<double> up_;
};

// H(R | L = labels) for the seed mixture with log weights `logw`.
double data_entropy_given_labels(const LabelChannel& ch, const Bits& labels, const std::vector<double>& logw,
                                 Rng& rng) {
  const std::size_t n = ch.length();
  const double top = *std::max_element(logw.begin(), logw.end());
  std::vector<std::uint64_t> active;
  std::vector<double> u;
  for (std::uint64_t s = 0; s < ch.seeds(); ++s)
    if (logw[s] != kNegInf) {
      active.push_back(s);
      u.push_back(std::exp(logw[s] - top));
    }
  const double z = std::accumulate(u.begin(), u.end(), 0.0);

  std::vector<double> pi(active.size() * n);
  bool deterministic = true, flat = true;
  for (std::size_t a = 0; a < active.size(); ++a)
    for (std::size_t i = 0; i < n; ++i) {
      const double p = ch.bit_one_posterior(active[a], i, labels[i]);
      pi[a * n + i] = p;
      deterministic = deterministic && (p == 0.0 || p == 1.0);
      flat = flat && p == 0.5;
    }

  if (flat) return static_cast<double>(n);

  if (deterministic) {
    std::unordered_map<std::uint64_t, double> groups;
    for (std::size_t a = 0; a < active.size(); ++a) {
      std::uint64_t key = 0;
      for (std::size_t i = 0; i < n; ++i)
        if (pi[a * n + i] == 1.0) key |= std::uint64_t{1} << i;
      groups[key] += u[a];
    }
    double acc = 0.0;
    for (const auto& [key, w] : groups) acc += w * std::log2(w);
    return std::log2(z) - acc / z;
  }

  auto log_mixture = [&](std::uint64_t r) {
    std::vector<double> terms(active.size());
    for (std::size_t a = 0; a < active.size(); ++a) {
      double acc = std::log(u[a] / z);
      for (std::size_t i = 0; i < n && acc != kNegInf; ++i) {
        const double p = pi[a * n + i];
        acc += std::log(((r >> i) & 1u) ? p : 1.0 - p);
      }
      terms[a] = acc;
    }
    return logsumexp(terms);
  };

  if ((std::uint64_t{1} << n) * active.size() <= kEnumerationBudget) {
    double h = 0.0;
    for (std::uint64_t r = 0; r < (std::uint64_t{1} << n); ++r) {
      const double lp = log_mixture(r);
      if (lp != kNegInf) h -= std::exp(lp) * lp;
    }
    return h / std::numbers::ln2;
  }

  std::discrete_distribution<std::size_t> pick(u.begin(), u.end());
  double h = 0.0;
  for (int t = 0; t < kInnerSamples; ++t) {
    const std::size_t a = pick(rng);
    std::uint64_t r = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) < pi[a * n + i]) r |= std::uint64_t{1} << i;
    h -= log_mixture(r);
  }
  return h / kInnerSamples / std::numbers::ln2;
}

}  // namespace

std::string to_string(DsrKind k) {
  switch (k) {
    case DsrKind::binary: return "binary";
    case DsrKind::jitter: return "jitter";
    default: return "none";
  }
}

std::string to_string(EveRegime r) { return r == EveRegime::quantum ? "quantum" : "classical"; }

void AttackScenario::validate() const {
  if (key_bits < 2) throw std::invalid_argument("scenario: |K| must be >= 2");
  if (length == 0) throw std::invalid_argument("scenario: N must be >= 1");
  if (!errors.empty() && errors.size() != length)
    throw std::invalid_argument("scenario: error sequence length must equal N");
  if (!(dsr.flip >= 0.0 && dsr.flip <= 1.0)) throw std::invalid_argument("scenario: DSR flip probability outside [0, 1]");
  if (!(dsr.jitter >= 0.0 && dsr.jitter <= kPi)) throw std::invalid_argument("scenario: DSR jitter outside [0, pi]");
  if (!std::isfinite(misalign)) throw std::invalid_argument("scenario: misalignment must be finite");
}

Bits error_sequence(std::size_t n, const std::vector<std::size_t>& positions) {
  Bits e(n, 0);
  for (auto p : positions) {
    if (p >= n) throw std::out_of_range("error position " + std::to_string(p) + " beyond sequence length");
    e[p] ^= 1;
  }
  return e;
}

Bits inject_errors(const Bits& labels, const Bits& e) { return e.empty() ? labels : xor_bits(labels, e); }

std::vector<int> misalignment_flips(const Constellation& c, double delta) {
  std::vector<int> out;
  for (int j = 0; j < c.size(); ++j)
    if (halfplane_label(c.phase(j), c.axis()) != halfplane_label(c.phase(j), c.axis() + delta)) out.push_back(j);
  return out;
}

double eve_up_probability(double phase, double eve_axis, const Dsr& dsr, Bit error) {
  double p;
  if (dsr.kind == DsrKind::jitter && dsr.jitter > 0.0) {
    const double centre = phase - eve_axis;
    p = (up_measure(centre + dsr.jitter) - up_measure(centre - dsr.jitter)) / (2.0 * dsr.jitter);
  } else {
    p = halfplane_label(phase, eve_axis) == Label::up ? 1.0 : 0.0;
  }
  if (error) p = 1.0 - p;
  if (dsr.kind == DsrKind::binary) p = p * (1.0 - dsr.flip) + (1.0 - p) * dsr.flip;
  return p;
}

Bits measure_labels(const std::vector<SymbolRecord>& symbols, const Constellation& c,
                    const AttackScenario& scenario, Rng& rng) {
  scenario.validate();
  if (symbols.size() != scenario.length) throw std::invalid_argument("measure_labels: expected N symbols");
  const double eve_axis = c.axis() + scenario.misalign;
  std::uniform_real_distribution<double> jitter(-scenario.dsr.jitter, scenario.dsr.jitter);
  std::bernoulli_distribution flip(scenario.dsr.flip);
  Bits out(symbols.size());
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    double phase = symbols[i].phase;
    if (scenario.dsr.kind == DsrKind::jitter) phase += jitter(rng);
    Bit l = to_bit(halfplane_label(phase, eve_axis)) ^ scenario.error_at(i);
    if (scenario.dsr.kind == DsrKind::binary && flip(rng)) l ^= 1;
    out[i] = l;
  }
  return out;
}

CandidateSummary brute_force_candidates(const Bits& observed, const Bits& target, const KeyFamily& family,
                                        std::optional<std::uint64_t> true_seed, int threads) {
  if (observed.size() != target.size()) throw std::invalid_argument("brute_force_candidates: length mismatch");
  if (family.key_bits() > kMaxSearchKeyBits)
    throw RegimeError("seed search needs |K| <= " + std::to_string(kMaxSearchKeyBits));
  const std::size_t n = observed.size();
  const std::size_t words = word_count(n);
  const std::uint64_t seeds = family.seed_count();
  if (true_seed && (*true_seed == 0 || *true_seed > seeds))
    throw std::invalid_argument("brute_force_candidates: true seed outside the key space");

  // Candidate j equals target iff K~_j == observed xor target.
  Words diff(words, 0);
  pack_into(xor_bits(observed, target), diff.data());

  std::vector<std::uint64_t> parity(seeds * words, 0);
  std::vector<int> distance(seeds, 0);
  parallel_for(seeds, threads, [&](std::size_t s) {
    std::uint64_t* row = parity.data() + s * words;
    pack_into(parity_sequence(family, s + 1, n), row);
    int d = 0;
    for (std::size_t w = 0; w < words; ++w) d += std::popcount(row[w] ^ diff[w]);
    distance[s] = d;
  });

  CandidateSummary out;
  out.seeds_tried = seeds;
  out.match_fraction.resize(seeds);
  out.distance_histogram.assign(n + 1, 0);
  for (std::uint64_t s = 0; s < seeds; ++s) {
    out.match_fraction[s] = 1.0 - static_cast<double>(distance[s]) / static_cast<double>(n);
    ++out.distance_histogram[static_cast<std::size_t>(distance[s])];
  }
  out.true_in_candidates = out.distance_histogram[0] > 0;

  std::vector<std::uint64_t> order(seeds);
  std::iota(order.begin(), order.end(), 0);
  auto row_less = [&](std::uint64_t a, std::uint64_t b) {
    return std::lexicographical_compare(parity.begin() + static_cast<long>(a * words),
                                        parity.begin() + static_cast<long>((a + 1) * words),
                                        parity.begin() + static_cast<long>(b * words),
                                        parity.begin() + static_cast<long>((b + 1) * words));
  };
  auto row_equal = [&](std::uint64_t a, std::uint64_t b) {
    return std::equal(parity.begin() + static_cast<long>(a * words), parity.begin() + static_cast<long>((a + 1) * words),
                      parity.begin() + static_cast<long>(b * words));
  };
  std::sort(order.begin(), order.end(), row_less);
  out.candidate_count = seeds == 0 ? 0 : 1;
  for (std::uint64_t i = 1; i < seeds; ++i)
    if (!row_equal(order[i - 1], order[i])) ++out.candidate_count;

  if (true_seed) {
    const std::uint64_t t = *true_seed - 1;
    out.true_seed_distance = distance[t];
    std::uint64_t better = 0;
    for (std::uint64_t s = 0; s < seeds; ++s) {
      better += distance[s] < distance[t];
      if (s != t && row_equal(s, t)) ++out.collisions;
    }
    out.true_key_rank = better + 1;
  }
  return out;
}

AttackRecord simulate_attack(const Constellation& c, const KeyFamily& family, std::uint64_t true_seed,
                             const AttackScenario& scenario, std::uint64_t master_seed, int mi_trials, int threads) {
  check_family(c, family, scenario);
  AttackRecord rec;
  rec.misalign = scenario.misalign;
  rec.true_seed = true_seed;
  Rng data_rng = make_rng(master_seed, data_stream);
  rec.data = random_bits(scenario.length, data_rng);

  Keystream ks(family.poly, true_seed, family.bases, family.osk);
  const auto symbols = encode_sequence(rec.data, ks, c);
  rec.true_labels = labels_of(symbols);
  Rng noise = make_rng(master_seed, dsr_stream);
  rec.measured_labels = measure_labels(symbols, c, scenario, noise);
  rec.candidates = brute_force_candidates(rec.measured_labels, rec.data, family, true_seed, threads);
  if (mi_trials > 0)
    rec.mutual_info_estimate = label_mutual_information(c, family, scenario, master_seed, mi_trials, threads);
  return rec;
}

AttackRecord otp_stage_attack(const Bits& plaintext, const Constellation& c, const KeyFamily& family,
                              std::uint64_t true_seed, const AttackScenario& scenario, std::uint64_t master_seed,
                              int mi_trials, int threads) {
  check_family(c, family, scenario);
  if (!scenario.otp_mode) throw std::invalid_argument("otp_stage_attack: scenario is not in OTP mode");
  if (plaintext.size() != scenario.length) throw std::invalid_argument("otp_stage_attack: plaintext length must be N");
  AttackRecord rec;
  rec.misalign = scenario.misalign;
  rec.true_seed = true_seed;
  rec.plaintext = plaintext;
  Rng data_rng = make_rng(master_seed, data_stream);
  rec.data = random_bits(scenario.length, data_rng);
  rec.ciphertext = xor_bits(plaintext, rec.data);

  Keystream ks(family.poly, true_seed, family.bases, family.osk);
  const auto symbols = encode_sequence(rec.data, ks, c);
  rec.true_labels = labels_of(symbols);
  Rng noise = make_rng(master_seed, dsr_stream);
  rec.measured_labels = measure_labels(symbols, c, scenario, noise);

  const Bits observed = xor_bits(rec.ciphertext, rec.measured_labels);
  rec.otp_identity = xor_bits(observed, parities_of(symbols)) == plaintext;
  rec.candidates = brute_force_candidates(observed, plaintext, family, true_seed, threads);
  // With X uniform and independent of everything else, I(X; C, L_m) = I(R; L_m).
  if (mi_trials > 0)
    rec.mutual_info_estimate = label_mutual_information(c, family, scenario, master_seed, mi_trials, threads);
  return rec;
}

double otp_ciphertext_information(int n_bits) {
  if (n_bits < 1 || n_bits > 10) throw RegimeError("otp_ciphertext_information: n_bits must be in [1, 10]");
  const std::uint64_t size = std::uint64_t{1} << n_bits;
  std::vector<double> joint(size * size, 0.0), px(size, 0.0), pc(size, 0.0);
  const double w = 1.0 / static_cast<double>(size * size);
  for (std::uint64_t x = 0; x < size; ++x)
    for (std::uint64_t r = 0; r < size; ++r) {
      const std::uint64_t cph = x ^ r;
      joint[x * size + cph] += w;
      px[x] += w;
      pc[cph] += w;
    }
  double info = 0.0;
  for (std::uint64_t x = 0; x < size; ++x)
    for (std::uint64_t cph = 0; cph < size; ++cph) {
      const double p = joint[x * size + cph];
      if (p > 0.0) info += p * std::log2(p / (px[x] * pc[cph]));
    }
  return std::max(0.0, info);
}

double label_mutual_information(const Constellation& c, const KeyFamily& family, const AttackScenario& scenario,
                                std::uint64_t master_seed, int trials, int threads) {
  check_family(c, family, scenario);
  if (family.key_bits() > kMaxEntropyKeyBits)
    throw RegimeError("label mutual information needs |K| <= " + std::to_string(kMaxEntropyKeyBits));
  if (trials < 1) throw std::invalid_argument("label_mutual_information: trials must be >= 1");
  const LabelChannel channel(c, family, scenario);
  const auto n = static_cast<double>(scenario.length);
  const double log_seeds = std::log(static_cast<double>(family.seed_count()));

  std::vector<double> per_trial(static_cast<std::size_t>(trials));
  parallel_for(per_trial.size(), threads, [&](std::size_t t) {
    Rng rng = make_rng(master_seed, mi_stream, t);
    const std::uint64_t seed = random_seed(family, rng);
    const Bits data = random_bits(scenario.length, rng);
    Keystream ks(family.poly, seed, family.bases, family.osk);
    const Bits labels = measure_labels(encode_sequence(data, ks, c), c, scenario, rng);
    std::vector<double> ll(channel.seeds());
    for (std::uint64_t s = 0; s < channel.seeds(); ++s) ll[s] = channel.log_likelihood(s, labels, data);
    per_trial[t] = n + (logsumexp(ll) - log_seeds) / std::numbers::ln2;
  });
  const double mean = mean_of(per_trial);
  return std::clamp(mean / n, 0.0, 1.0);
}

double entropy_from_log_weights(const std::vector<double>& logw) {
  if (logw.empty()) throw std::invalid_argument("entropy_from_log_weights: empty distribution");
  const double top = *std::max_element(logw.begin(), logw.end());
  if (top == kNegInf) throw std::invalid_argument("entropy_from_log_weights: all weights are zero");
  double z = 0.0, acc = 0.0;
  for (double l : logw) {
    if (l == kNegInf) continue;
    const double u = std::exp(l - top);
    z += u;
    acc += u * std::log2(u);
  }
  return std::max(0.0, std::log2(z) - acc / z);
}

CiphertextOnlyEntropy ciphertext_only_entropy(const Constellation& c, const KeyFamily& family,
                                              const AttackScenario& scenario, std::uint64_t master_seed, int trials,
                                              int threads) {
  check_family(c, family, scenario);
  require_entropy_regime(family, scenario);
  if (trials < 1) throw std::invalid_argument("ciphertext_only_entropy: trials must be >= 1");
  const LabelChannel channel(c, family, scenario);

  std::vector<double> hk(static_cast<std::size_t>(trials)), hx(static_cast<std::size_t>(trials));
  parallel_for(hk.size(), threads, [&](std::size_t t) {
    Rng rng = make_rng(master_seed, cto_stream, t);
    const std::uint64_t seed = random_seed(family, rng);
    const Bits data = random_bits(scenario.length, rng);
    Keystream ks(family.poly, seed, family.bases, family.osk);
    const Bits labels = measure_labels(encode_sequence(data, ks, c), c, scenario, rng);
    std::vector<double> logw(channel.seeds());
    for (std::uint64_t s = 0; s < channel.seeds(); ++s) logw[s] = channel.log_marginal(s, labels);
    hk[t] = entropy_from_log_weights(logw);
    Rng inner = make_rng(master_seed, cto_inner, t);
    hx[t] = data_entropy_given_labels(channel, labels, logw, inner);
  });

  CiphertextOnlyEntropy out;
  out.key_entropy = std::log2(static_cast<double>(family.seed_count()));
  out.key_given_obs = mean_of(hk);
  out.data_given_obs = mean_of(hx);
  out.trials = trials;
  return out;
}

KnownPlaintextEntropy known_plaintext_key_entropy(const Constellation& c, const KeyFamily& family,
                                                  const AttackScenario& scenario, EveRegime regime,
                                                  std::uint64_t master_seed, int trials, int threads) {
  check_family(c, family, scenario);
  require_entropy_regime(family, scenario);
  if (trials < 1) throw std::invalid_argument("known_plaintext_key_entropy: trials must be >= 1");
  const std::uint64_t seeds = family.seed_count();
  const std::size_t n = scenario.length;

  // Transmitted index for every (seed, position, bit).
  std::vector<int> index(seeds * n * 2);
  std::vector<Bits> parity(seeds);
  for (std::uint64_t s = 0; s < seeds; ++s) {
    const auto keys = running_keys(family, s + 1, n);
    parity[s].resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      parity[s][i] = keys[i].parity;
      for (Bit r = 0; r < 2; ++r) index[(s * n + i) * 2 + r] = encode(r, keys[i], c).index;
    }
  }
  std::optional<LabelChannel> channel;
  std::vector<double> log_q;
  if (regime == EveRegime::classical) {
    channel.emplace(c, family, scenario);
  } else {
    for (double q : heterodyne_confusion(c)) log_q.push_back(std::log(std::max(q, kConfusionFloor)));
  }
  const int two_m = c.size();

  std::vector<double> h(static_cast<std::size_t>(trials)), floor(static_cast<std::size_t>(trials));
  parallel_for(h.size(), threads, [&](std::size_t t) {
    Rng rng = make_rng(master_seed, kpa_stream, t);
    const std::uint64_t seed = random_seed(family, rng);
    const std::uint64_t ts = seed - 1;
    const Bits data = random_bits(n, rng);
    std::vector<double> logw(seeds);
    std::uint64_t same = 0;
    if (regime == EveRegime::classical) {
      Keystream ks(family.poly, seed, family.bases, family.osk);
      const Bits labels = measure_labels(encode_sequence(data, ks, c), c, scenario, rng);
      for (std::uint64_t s = 0; s < seeds; ++s) {
        logw[s] = channel->log_likelihood(s, labels, data);
        same += parity[s] == parity[ts];
      }
    } else {
      std::vector<int> seen(n);
      for (std::size_t i = 0; i < n; ++i) {
        const int j = index[(ts * n + i) * 2 + data[i]];
        seen[i] = c.nearest_index(std::arg(heterodyne_sample(c.amplitude(j), rng)));
      }
      for (std::uint64_t s = 0; s < seeds; ++s) {
        double acc = 0.0;
        bool identical = true;
        for (std::size_t i = 0; i < n; ++i) {
          const int j = index[(s * n + i) * 2 + data[i]];
          identical = identical && j == index[(ts * n + i) * 2 + data[i]];
          acc += log_q[static_cast<std::size_t>(((seen[i] - j) % two_m + two_m) % two_m)];
        }
        logw[s] = acc;
        same += identical;
      }
    }
    h[t] = entropy_from_log_weights(logw);
    floor[t] = std::log2(static_cast<double>(same));
  });

  KnownPlaintextEntropy out;
  out.key_entropy = std::log2(static_cast<double>(seeds));
  out.key_given_obs_data = mean_of(h);
  out.residual_floor = mean_of(floor);
  out.regime = regime;
  out.trials = trials;
  return out;
}

KeygenRow keygen_advantage(double energy) {
  if (!(energy >= 0.0)) throw std::invalid_argument("keygen_advantage: energy must be >= 0");
  const double amp = std::sqrt(energy);
  KeygenRow row;
  row.energy = energy;
  row.pe_bob = helstrom_pure(Amplitude(amp, 0.0), Amplitude(-amp, 0.0), 0.5).p_error;
  row.pe_eve = homodyne_antipodal_error(energy);
  row.advantage = binary_entropy(row.pe_eve) - binary_entropy(row.pe_bob);
  return row;
}

std::vector<KeygenRow> keygen_advantage(const std::vector<double>& energies) {
  std::vector<KeygenRow> rows;
  rows.reserve(energies.size());
  for (double s : energies) rows.push_back(keygen_advantage(s));
  return rows;
}

KeygenRow randomized_keygen_row(double effective_energy) {
  KeygenRow row = keygen_advantage(0.5 * effective_energy);
  row.energy = effective_energy;
  return row;
}

}  // namespace yzero
