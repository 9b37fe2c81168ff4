#include "yzero/runner.hpp"

#include "yzero/parallel.hpp"

#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <numbers>
#include <sstream>

namespace yzero {

namespace {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr std::uint64_t kMisalignStream = 7;
constexpr std::uint64_t kPlaintextStream = 2;
constexpr std::uint64_t kHomodyneStream = 8;

std::string bits_string(const Bits& b) {
  std::string s(b.size(), '0');
  for (std::size_t i = 0; i < b.size(); ++i) s[i] = b[i] ? '1' : '0';
  return s;
}

std::uint64_t master_seed(const ScenarioConfig& cfg, const RunOptions& opts) {
  if (opts.seed) return *opts.seed;
  return cfg.master_seed.value_or(0);
}

std::string manifest_name(const ScenarioConfig& cfg) {
  return cfg.manifest.empty() ? to_string(cfg.family) + ".manifest.json" : cfg.manifest;
}

std::string timestamp() {
  std::time_t t;
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  } else {
    t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ordered_json manifest_ref(const ScenarioConfig& cfg) {
  return {{"file", manifest_name(cfg)}, {"config_hash", config_hash(cfg.text)}};
}

std::string csv_header_comment(const ScenarioConfig& cfg) {
  return "# manifest=" + manifest_name(cfg) + " config_hash=" + config_hash(cfg.text) + "\n";
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
}

std::string tie_break_description(const ScenarioConfig& cfg) {
  return cfg.half_step ? "half-step offset pi/(2M): no state on the labeling axis"
                       : "phase on axis -> up, phase on axis+pi -> down";
}

RunResult write_manifest(const ScenarioConfig& cfg, const RunOptions& opts, std::vector<fs::path> files,
                         ordered_json notes) {
  ordered_json m;
  m["tool"] = "yzero";
  m["tool_version"] = kToolVersion;
  m["family"] = to_string(cfg.family);
  m["config_path"] = opts.config_path;
  m["config_hash"] = config_hash(cfg.text);
  m["master_seed"] = cfg.uses_monte_carlo() || opts.seed ? ordered_json(master_seed(cfg, opts)) : ordered_json();
  m["seed_overridden"] = opts.seed.has_value();
  m["threads"] = opts.threads;
  m["created_utc"] = timestamp();
  m["tolerances"] = {
      {"truncation", cfg.truncation_tol},
      {"hermitian_entry", tol::hermitian_entry},
      {"hermitian_input", tol::hermitian_input},
      {"unit_trace", tol::unit_trace},
      {"psd_floor", tol::psd_floor},
      {"probability_sum", tol::prob_sum},
  };
  m["modeling"] = {
      {"eve_receiver",
       "threshold homodyne along the labeling axis for exponent fits; heterodyne nearest-of-2M phase decision in the "
       "quantum known-plaintext regime"},
      {"tie_break", tie_break_description(cfg)},
      {"label_encoding", "up = 1, down = 0"},
      {"dsr_model", to_string(cfg.dsr.kind) == "none"
                        ? std::string("none")
                        : to_string(cfg.dsr.kind) + (cfg.dsr.kind == DsrKind::binary
                                                         ? " (label flip, f = " + format_double(cfg.dsr.flip) + ")"
                                                         : " (uniform phase noise, half-width " +
                                                               format_double(cfg.dsr.jitter) + " rad)")},
      {"running_key_extraction",
       "Fibonacci LFSR, output = register bit 0, log2(M) bits per key assembled most significant first, one extra "
       "bit per symbol for OSK"},
      {"mixed_bound_path", to_string(cfg.path)},
  };
  ordered_json list = ordered_json::array();
  for (const auto& f : files) list.push_back(f.filename().string());
  m["data_files"] = list;
  m["notes"] = std::move(notes);
  const fs::path path = opts.out_dir / manifest_name(cfg);
  write_file(path, m.dump(2) + "\n");
  for (auto& f : files) f = fs::absolute(f);
  return {std::move(files), fs::absolute(path)};
}

Constellation constellation_for(const ScenarioConfig& cfg, int bases, double energy) {
  return Constellation(bases, energy, cfg.phase_offset, cfg.osk, cfg.half_step);
}

std::optional<ExponentFit> try_fit(const std::vector<KeygenRow>& rows, bool bob) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : rows) {
    const double p = bob ? r.pe_bob : r.pe_eve;
    if (p > 0.0 && p < 0.5) pts.emplace_back(r.energy, p);
  }
  if (pts.size() < 4) return std::nullopt;
  return exponent_fit(pts);
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::vector<BoundsRow> compute_bounds(const ScenarioConfig& cfg, int threads) {
  std::vector<BoundsRow> rows;
  for (int m : cfg.bases)
    for (double s : cfg.energies)
      for (auto method : cfg.methods) rows.push_back({m, s, method, 0.0, 0, 0.0});

  parallel_for(rows.size(), threads, [&](std::size_t i) {
    auto& row = rows[i];
    const Constellation c = constellation_for(cfg, row.bases, row.energy);
    switch (row.method) {
      case BoundsMethod::helstrom_mixed_bit: {
        const auto b = bit_bound(c, cfg.prior0, cfg.path, cfg.truncation_tol);
        row.p_error = b.p_error;
        row.dim_used = b.dim_used;
        row.truncation_deficit = b.truncation_deficit;
        break;
      }
      case BoundsMethod::updown: {
        const auto b = updown_bound(c, cfg.path, cfg.truncation_tol);
        row.p_error = b.p_error;
        row.dim_used = b.dim_used;
        row.truncation_deficit = b.truncation_deficit;
        break;
      }
      case BoundsMethod::srm_2M: {
        row.p_error = srm_mary_error(c).p_error;
        row.dim_used = c.size();
        row.truncation_deficit = 0.0;
        break;
      }
    }
  });
  return rows;
}

KeygenTable compute_keygen(const ScenarioConfig& cfg) {
  KeygenTable t;
  t.plain = keygen_advantage(cfg.energies);
  for (double sp : cfg.sprime) t.randomized.push_back(randomized_keygen_row(sp));
  t.fit_bob = try_fit(t.plain, true);
  t.fit_eve = try_fit(t.plain, false);
  t.fit_bob_randomized = try_fit(t.randomized, true);
  t.fit_eve_randomized = try_fit(t.randomized, false);
  return t;
}

RunResult run_bounds(const ScenarioConfig& cfg, const RunOptions& opts) {
  const auto rows = compute_bounds(cfg, opts.threads);
  std::ostringstream csv;
  csv << csv_header_comment(cfg);
  csv << "M,S,method,p_error,dim_used,truncation_deficit\n";
  for (const auto& r : rows)
    csv << r.bases << ',' << format_double(r.energy) << ',' << to_string(r.method) << ',' << format_double(r.p_error)
        << ',' << r.dim_used << ',' << format_double(r.truncation_deficit) << '\n';
  const fs::path path = opts.out_dir / cfg.csv;
  write_file(path, csv.str());
  ordered_json notes = ordered_json::array();
  notes.push_back("srm_2M assumes uniform priors over the 2M states; the square-root measurement is optimal there");
  return write_manifest(cfg, opts, {path}, notes);
}

RunResult run_attack(const ScenarioConfig& cfg, const RunOptions& opts) {
  const std::uint64_t seed = master_seed(cfg, opts);
  const Constellation c = constellation_for(cfg, cfg.bases.front(), cfg.energies.front());
  const KeyFamily family = cfg.key_family();
  const std::uint64_t true_seed = cfg.keystream->seed;
  const int key_bits = family.key_bits();

  std::vector<double> deltas = cfg.misalign;
  if (cfg.misalign_uniform_draws > 0) {
    Rng rng = make_rng(seed, kMisalignStream);
    std::uniform_real_distribution<double> axis(0.0, 2.0 * std::numbers::pi);
    for (int i = 0; i < cfg.misalign_uniform_draws; ++i) deltas.push_back(axis(rng));
  }

  Bits plaintext;
  if (cfg.otp) {
    Rng rng = make_rng(seed, kPlaintextStream);
    std::bernoulli_distribution coin(0.5);
    plaintext.resize(cfg.length);
    for (auto& b : plaintext) b = coin(rng) ? 1 : 0;
  }

  ordered_json records = ordered_json::array();
  std::ostringstream seeds_csv;
  seeds_csv << csv_header_comment(cfg) << "misalign,seed,match_fraction,distance\n";
  double sum_match = 0.0, sum_mi = 0.0;
  int in_candidates = 0, mi_count = 0;
  for (double delta : deltas) {
    const AttackScenario sc = cfg.attack_scenario(delta);
    const AttackRecord rec = cfg.otp ? otp_stage_attack(plaintext, c, family, true_seed, sc, seed, cfg.trials, opts.threads)
                                     : simulate_attack(c, family, true_seed, sc, seed, cfg.trials, opts.threads);
    const auto& cand = rec.candidates;
    ordered_json r;
    r["misalign"] = delta;
    r["data"] = bits_string(rec.data);
    if (cfg.otp) {
      r["plaintext"] = bits_string(rec.plaintext);
      r["ciphertext"] = bits_string(rec.ciphertext);
      r["otp_identity"] = *rec.otp_identity;
    }
    r["true_labels"] = bits_string(rec.true_labels);
    r["measured_labels"] = bits_string(rec.measured_labels);
    r["label_errors"] = hamming(rec.true_labels, rec.measured_labels);
    r["seeds_tried"] = cand.seeds_tried;
    r["candidate_count"] = cand.candidate_count;
    r["true_R_in_candidates"] = cand.true_in_candidates;
    r["true_key_rank"] = cand.true_key_rank ? ordered_json(*cand.true_key_rank) : ordered_json();
    r["true_seed_distance"] = cand.true_seed_distance;
    r["true_seed_match_fraction"] = cand.match_fraction[true_seed - 1];
    r["seed_collisions"] = cand.collisions;
    r["distance_histogram"] = cand.distance_histogram;
    r["misaligned_states"] = misalignment_flips(c, delta);
    r["mutual_info_estimate"] = rec.mutual_info_estimate ? ordered_json(*rec.mutual_info_estimate) : ordered_json();
    records.push_back(std::move(r));

    sum_match += cand.match_fraction[true_seed - 1];
    in_candidates += cand.true_in_candidates;
    if (rec.mutual_info_estimate) {
      sum_mi += *rec.mutual_info_estimate;
      ++mi_count;
    }
    if (!cfg.seeds_csv.empty()) {
      const std::string d = format_double(delta);
      for (std::size_t s = 0; s < cand.match_fraction.size(); ++s) {
        const double f = cand.match_fraction[s];
        seeds_csv << d << ',' << to_hex(s + 1) << ',' << format_double(f) << ','
                  << static_cast<long>(std::lround((1.0 - f) * static_cast<double>(cfg.length))) << '\n';
      }
    }
  }

  ordered_json doc;
  doc["manifest"] = manifest_ref(cfg);
  doc["family"] = "attack";
  doc["stage"] = cfg.otp ? "one_time_pad" : "direct_encryption";
  doc["constellation"] = {{"M", c.bases()}, {"S", c.energy()}, {"phase_offset", c.phase_offset()},
                          {"osk", c.osk()}, {"half_step", c.half_step()}};
  doc["keystream"] = {{"poly_bitmask_hex", to_hex(family.poly)},
                      {"seed_hex", to_hex(true_seed)},
                      {"bits_per_symbol", bits_per_symbol(c.bases(), c.osk())},
                      {"key_bits", key_bits}};
  doc["scenario"] = {{"N", cfg.length},
                     {"errors", cfg.error_positions},
                     {"dsr", to_string(cfg.dsr.kind)},
                     {"dsr_flip", cfg.dsr.flip},
                     {"dsr_jitter", cfg.dsr.jitter},
                     {"mi_trials", cfg.trials}};
  doc["records"] = std::move(records);
  const double nd = static_cast<double>(deltas.size());
  doc["summary"] = {{"misalign_values", deltas.size()},
                    {"mean_true_seed_match_fraction", sum_match / nd},
                    {"fraction_true_R_in_candidates", in_candidates / nd},
                    {"mean_mutual_info_estimate", mi_count ? ordered_json(sum_mi / mi_count) : ordered_json()}};
  doc["analytic"] = {
      {"log2_seed_search", key_bits},
      {"log2_search_with_unknown_label_errors", std::ldexp(1.0, key_bits)},
      {"note", "seed search enumerates 2^|K| - 1 keys; when label errors are unknown the search space grows toward "
               "2^(2^|K|), which is reported here analytically and never enumerated"}};

  std::vector<fs::path> files;
  const fs::path json_path = opts.out_dir / cfg.json;
  write_file(json_path, doc.dump(2) + "\n");
  files.push_back(json_path);
  if (!cfg.seeds_csv.empty()) {
    const fs::path csv_path = opts.out_dir / cfg.seeds_csv;
    write_file(csv_path, seeds_csv.str());
    files.push_back(csv_path);
  }
  ordered_json notes = ordered_json::array();
  notes.push_back("true_R_in_candidates uses exact sequence equality; seed collisions are counted separately");
  if (cfg.misalign_uniform_draws > 0)
    notes.push_back("Eve's axis offset drawn uniformly on [0, 2pi) for " + std::to_string(cfg.misalign_uniform_draws) +
                    " extra misalign values");
  return write_manifest(cfg, opts, std::move(files), notes);
}

RunResult run_entropy(const ScenarioConfig& cfg, const RunOptions& opts) {
  const std::uint64_t seed = master_seed(cfg, opts);
  const Constellation c = constellation_for(cfg, cfg.bases.front(), cfg.energies.front());
  const KeyFamily family = cfg.key_family();
  const AttackScenario sc = cfg.attack_scenario(cfg.misalign.empty() ? 0.0 : cfg.misalign.front());

  ordered_json doc;
  doc["manifest"] = manifest_ref(cfg);
  doc["family"] = "entropy";
  doc["constellation"] = {{"M", c.bases()}, {"S", c.energy()}, {"osk", c.osk()}};
  doc["key_bits"] = family.key_bits();
  doc["N"] = cfg.length;
  doc["trials"] = cfg.trials;
  doc["H_K"] = std::log2(static_cast<double>(family.seed_count()));
  if (cfg.analysis != EntropyAnalysis::known_plaintext) {
    const auto e = ciphertext_only_entropy(c, family, sc, seed, cfg.trials, opts.threads);
    doc["ciphertext_only"] = {{"observation", "labels"},
                              {"H_K_given_Y", e.key_given_obs},
                              {"H_X_given_Y", e.data_given_obs},
                              {"H_X_given_Y_exceeds_H_K", e.data_given_obs > e.key_entropy}};
  }
  if (cfg.analysis != EntropyAnalysis::ciphertext_only) {
    const auto e = known_plaintext_key_entropy(c, family, sc, cfg.regime, seed, cfg.trials, opts.threads);
    doc["known_plaintext"] = {
        {"regime", to_string(e.regime)},
        {"observation", e.regime == EveRegime::quantum ? "heterodyne nearest-of-2M" : "labels"},
        {"H_K_given_Y_X", e.key_given_obs_data},
        {"residual_floor", e.residual_floor},
        {"positive", e.key_given_obs_data > 0.0}};
  }
  const fs::path path = opts.out_dir / cfg.json;
  write_file(path, doc.dump(2) + "\n");
  ordered_json notes = ordered_json::array();
  notes.push_back("H(K) counts the 2^|K| - 1 nonzero LFSR seeds");
  notes.push_back("posteriors are exhaustive over seeds and assume Eve knows her own channel model");
  return write_manifest(cfg, opts, {path}, notes);
}

RunResult run_keygen(const ScenarioConfig& cfg, const RunOptions& opts) {
  const KeygenTable t = compute_keygen(cfg);
  auto fit_cell = [](const std::optional<ExponentFit>& f) { return f ? format_double(f->slope) : std::string(); };

  std::ostringstream csv;
  csv << csv_header_comment(cfg);
  csv << "mode,S,Pe_B,Pe_E,advantage,slope_fit_B,slope_fit_E\n";
  for (const auto& r : t.plain)
    csv << "plain," << format_double(r.energy) << ',' << format_double(r.pe_bob) << ',' << format_double(r.pe_eve)
        << ',' << format_double(r.advantage) << ',' << fit_cell(t.fit_bob) << ',' << fit_cell(t.fit_eve) << '\n';
  for (const auto& r : t.randomized)
    csv << "randomized," << format_double(r.energy) << ',' << format_double(r.pe_bob) << ','
        << format_double(r.pe_eve) << ',' << format_double(r.advantage) << ',' << fit_cell(t.fit_bob_randomized)
        << ',' << fit_cell(t.fit_eve_randomized) << '\n';

  std::vector<fs::path> files;
  const fs::path csv_path = opts.out_dir / cfg.csv;
  write_file(csv_path, csv.str());
  files.push_back(csv_path);

  ordered_json notes = ordered_json::array();
  if (!t.fit_bob || !t.fit_eve) notes.push_back("exponent fit refused: fewer than 4 points with p_error in (0, 0.5)");
  notes.push_back("randomized rows use S' as a free effective-energy parameter; only the slope ratio is meaningful");

  if (!cfg.json.empty()) {
    ordered_json doc;
    doc["manifest"] = manifest_ref(cfg);
    doc["family"] = "keygen";
    auto fit_json = [](const std::optional<ExponentFit>& f) {
      return f ? ordered_json{{"slope", f->slope}, {"intercept", f->intercept}, {"r2", f->r2}} : ordered_json();
    };
    doc["fit_bob"] = fit_json(t.fit_bob);
    doc["fit_eve"] = fit_json(t.fit_eve);
    doc["fit_bob_randomized"] = fit_json(t.fit_bob_randomized);
    doc["fit_eve_randomized"] = fit_json(t.fit_eve_randomized);
    doc["slope_ratio_randomized"] = t.fit_bob_randomized && t.fit_eve_randomized
                                        ? ordered_json(t.fit_bob_randomized->slope / t.fit_eve_randomized->slope)
                                        : ordered_json();
    if (cfg.homodyne_trials > 0) {
      const double s = cfg.homodyne_check_energy;
      const std::uint64_t errs =
          homodyne_antipodal_errors(s, cfg.homodyne_trials, make_rng(master_seed(cfg, opts), kHomodyneStream)(),
                                    opts.threads);
      const double p = homodyne_antipodal_error(s);
      const double n = static_cast<double>(cfg.homodyne_trials);
      const double sigma = std::sqrt(n * p * (1.0 - p));
      doc["homodyne_check"] = {{"S", s},
                               {"trials", cfg.homodyne_trials},
                               {"errors", errs},
                               {"expected", n * p},
                               {"binomial_sigma", sigma},
                               {"within_3_sigma", std::abs(static_cast<double>(errs) - n * p) <= 3.0 * sigma}};
    }
    const fs::path json_path = opts.out_dir / cfg.json;
    write_file(json_path, doc.dump(2) + "\n");
    files.push_back(json_path);
  }
  return write_manifest(cfg, opts, std::move(files), notes);
}

RunResult run(const ScenarioConfig& cfg, const RunOptions& opts) {
  switch (cfg.family) {
    case Family::attack: return run_attack(cfg, opts);
    case Family::entropy: return run_entropy(cfg, opts);
    case Family::keygen: return run_keygen(cfg, opts);
    default: return run_bounds(cfg, opts);
  }
}

}  // namespace yzero
