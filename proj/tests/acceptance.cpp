// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include "oracles.hpp"

#include "yzero/runner.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

using namespace yzero;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kMaster = 0x5EED2024;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int prec = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", prec, v);
  return buf;
}

// 1. Mixed bound on rank-one densities against the pure-state formula.
Outcome rank_one_cross_check() {
  Rng rng = make_rng(kMaster, 1);
  std::uniform_real_distribution<double> radius2(0.0, 9.0), angle(0.0, 2.0 * std::numbers::pi), prior(0.05, 0.95);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Amplitude a = std::polar(std::sqrt(radius2(rng)), angle(rng));
    const Amplitude b = std::polar(std::sqrt(radius2(rng)), angle(rng));
    const double p0 = prior(rng);
    const auto dim = truncation_dim(std::max(std::norm(a), std::norm(b)));
    const std::vector<FockVector<double>> s0{coherent_fock(a, dim)}, s1{coherent_fock(b, dim)};
    const std::vector<double> one{1.0};
    const double mixed = helstrom_mixed(density_from_ensemble(s0, one), density_from_ensemble(s1, one), p0).p_error;
    const double pure = helstrom_pure(a, b, p0).p_error;
    const double ref = oracle::helstrom_pure(a, b, p0);
    worst = std::max({worst, std::abs(mixed - pure), std::abs(pure - ref)});
  }
  return {worst <= 1e-9, "100 pairs, S <= 9, max |mixed - pure| = " + fmt(worst, 3) + " (tol 1e-9)"};
}

// 2. With OSK the bit-conditional densities coincide.
Outcome osk_indistinguishable() {
  double worst_diff = 0.0, worst_pe = 0.0;
  for (int m : {4, 64, 256})
    for (double s : {1.0, 10.0}) {
      const Constellation c(m, s, 0.0, true);
      const auto e = bit_ensembles(c);
      worst_diff = std::max(worst_diff, (e.rho0.matrix() - e.rho1.matrix()).cwiseAbs().maxCoeff());
      worst_pe = std::max(worst_pe, std::abs(helstrom_mixed(e.rho0, e.rho1, 0.5).p_error - 0.5));
    }
  return {worst_diff < 1e-12 && worst_pe <= 1e-12,
          "M in {4,64,256}, S in {1,10}: max |rho0 - rho1| = " + fmt(worst_diff, 3) + ", max |Pe - 1/2| = " +
              fmt(worst_pe, 3)};
}

// 3. Bit bound approaches 1/2 and grows with M.
Outcome bit_bound_limit() {
  const double at256 = bit_bound(Constellation(256, 1.0)).p_error;
  bool monotone = true;
  std::string series;
  for (double s : {1.0, 4.0, 10.0}) {
    double prev = 0.0;
    for (int m = 8; m <= 256; m *= 2) {
      const double p = bit_bound(Constellation(m, s)).p_error;
      if (p < prev) monotone = false;
      prev = p;
      if (s == 1.0) series += (series.empty() ? "" : " ") + fmt(p, 4);
    }
  }
  return {at256 >= 0.45 && monotone, "Pe(M=256,S=1) = " + fmt(at256) + "; S=1 series M=8..256: " + series +
                                          "; nondecreasing for S in {1,4,10}: " + (monotone ? "yes" : "no")};
}

// 4. Square-root measurement error for the full 2M-state set.
Outcome srm_check() {
  const double p = srm_mary_error(Constellation(128, 4.0)).p_error;
  double worst = 0.0;
  for (int m : {1, 2, 4, 8})
    for (double s : {0.5, 1.0, 4.0, 9.0}) {
      const Constellation c(m, s);
      worst = std::max(worst, std::abs(srm_mary_error(c).p_error - oracle::srm_error_direct(c.amplitudes())));
    }
  return {p >= 0.9 && worst <= 1e-8,
          "Pe_SRM(M=128,S=4) = " + fmt(p) + "; max deviation from direct Gram root (M <= 8) = " + fmt(worst, 3)};
}

// 5. Up/down bound in the several-percent range somewhere on the sweep.
Outcome updown_sweep() {
  bool found = false;
  std::string table;
  for (int m : {256, 512})
    for (double s : {10.0, 25.0, 50.0, 100.0}) {
      const auto b = updown_bound(Constellation(m, s), EvalPath::gram);
      found = found || (b.p_error >= 0.003 && b.p_error <= 0.1);
      table += (table.empty() ? "" : ", ") + std::string("(") + std::to_string(m) + "," + fmt(s, 3) + ")=" +
               fmt(b.p_error, 4);
    }
  return {found, "Gram path: " + table};
}

// 6. Error exponents of the keyed receiver and the homodyne eavesdropper.
Outcome exponents() {
  std::vector<std::pair<double, double>> bob, eve;
  for (double s : {2.0, 3.0, 4.0, 5.0, 6.0}) {
    const auto r = keygen_advantage(s);
    bob.emplace_back(s, r.pe_bob);
    eve.emplace_back(s, r.pe_eve);
  }
  const double sb = exponent_fit(bob).slope, se = exponent_fit(eve).slope;
  const std::uint64_t trials = 1'000'000;
  const auto errs = homodyne_antipodal_errors(4.0, trials, make_rng(kMaster, 6)(), 1);
  const double p = homodyne_antipodal_error(4.0);
  const double mean = trials * p, sigma = std::sqrt(trials * p * (1 - p));
  const double z = (static_cast<double>(errs) - mean) / sigma;
  const bool ok = sb >= -4.5 && sb <= -3.5 && se >= -2.5 && se <= -1.5 && std::abs(z) <= 3.0;
  return {ok, "slope Bob = " + fmt(sb, 5) + " in [-4.5,-3.5], slope Eve = " + fmt(se, 5) +
                  " in [-2.5,-1.5]; homodyne MC at S=4: " + std::to_string(errs) + " errors vs " + fmt(mean, 5) +
                  " expected (" + fmt(z, 3) + " sigma)"};
}

// 7. Seed search on noiseless and single-error labels.
Outcome noiseless_attack() {
  const Constellation c(256, 25.0);
  const KeyFamily fam{primitive_polynomial(12), 256, false};
  Rng rng = make_rng(kMaster, 7);
  std::uniform_int_distribution<std::uint64_t> seed(1, fam.seed_count());
  std::uniform_int_distribution<std::size_t> pos(0, 63);
  int in_set = 0, one_off = 0;
  for (int t = 0; t < 20; ++t) {
    const std::uint64_t s = seed(rng);
    AttackScenario sc;
    sc.key_bits = 12;
    sc.length = 64;
    const auto clean = simulate_attack(c, fam, s, sc, kMaster + t);
    in_set += clean.candidates.true_in_candidates && clean.candidates.true_seed_distance == 0;
    sc.errors = error_sequence(64, {pos(rng)});
    const auto noisy = simulate_attack(c, fam, s, sc, kMaster + t);
    one_off += noisy.candidates.true_seed_distance == 1;
  }
  return {in_set == 20 && one_off == 20, "|K|=12, N=64: true R in candidates " + std::to_string(in_set) +
                                             "/20; single error -> distance exactly 1 " + std::to_string(one_off) +
                                             "/20"};
}

// 8. Binary randomization at f = 1/2 removes all information.
Outcome dsr_kill() {
  const Constellation c(16, 10.0);
  const KeyFamily fam{primitive_polynomial(8), 16, false};
  AttackScenario sc;
  sc.key_bits = 8;
  sc.length = 16;
  sc.dsr = {DsrKind::binary, 0.5, 0.0};
  const auto e = ciphertext_only_entropy(c, fam, sc, kMaster, 200);
  const double mi = label_mutual_information(c, fam, sc, kMaster, 10'000);
  // The all-zero register is excluded from the key space, so H(K) = log2(255).
  const double gap = 8.0 - e.key_given_obs;
  const double zero_register = -std::log2(1.0 - std::ldexp(1.0, -8));
  const bool ok = e.key_given_obs == e.key_entropy && std::abs(gap - zero_register) < 1e-12 && mi < 0.02;
  return {ok, "H(K|Y_E) = " + fmt(e.key_given_obs, 12) + " = H(K) over 255 nonzero seeds (8 - H = " + fmt(gap, 6) +
                  ", the excluded zero register); I(L_m;R) = " + fmt(mi, 3) + " bits/symbol over 1e4 trials"};
}

// 9. One-time-pad identity.
Outcome otp_identity() {
  Rng rng = make_rng(kMaster, 9);
  std::uniform_int_distribution<int> key_bits(4, 16), log_m(0, 8);
  std::bernoulli_distribution coin(0.5);
  int ok = 0;
  for (int t = 0; t < 100; ++t) {
    const int k = key_bits(rng);
    const int m = 1 << log_m(rng);
    const KeyFamily fam{primitive_polynomial(k), m, false};
    const std::uint64_t s = std::uniform_int_distribution<std::uint64_t>(1, fam.seed_count())(rng);
    AttackScenario sc;
    sc.key_bits = k;
    sc.length = 48;
    sc.otp_mode = true;
    Bits x(48);
    for (auto& b : x) b = coin(rng);
    const auto rec = otp_stage_attack(x, Constellation(m, 16.0), fam, s, sc, kMaster + t);
    // Independent parity sequence from the bit-array register.
    oracle::BitLfsr l(fam.poly, s);
    Bits parity(48);
    for (auto& b : parity) {
      int key = 0;
      for (int i = 0; i < log2_exact(m); ++i) key = (key << 1) | l.step();
      b = static_cast<Bit>(key & 1);
    }
    ok += xor_bits(xor_bits(rec.ciphertext, rec.measured_labels), parity) == x && *rec.otp_identity;
  }
  return {ok == 100, "C xor L xor K~ == X on " + std::to_string(ok) + "/100 random noiseless scenarios"};
}

// 10. Same seed, same bytes.
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const std::vector<std::pair<std::string, std::string>> scenarios = {
      {"bounds", "[constellation]\nM = 256\nS = 25\n[scenario]\nfamily = bounds\nmethods = updown, srm_2M\npath = gram\n"
                 "[output]\ncsv = b.csv\n"},
      {"keygen", "[constellation]\nM = 1\nS = 2, 3, 4, 5, 6\n[scenario]\nfamily = keygen\nsprime = 4, 6, 8, 10\n"
                 "homodyne_trials = 200000\nmaster_seed = 6\n[output]\ncsv = k.csv\njson = k.json\n"},
      {"attack", "[constellation]\nM = 256\nS = 25\n[keystream]\npoly = 0x1053\nseed = 0x9E3\n[scenario]\n"
                 "family = attack\nN = 64\nerrors = 9\nmisalign = 0, pi/256\nmisalign_uniform_draws = 2\n"
                 "master_seed = 7\n[output]\njson = a.json\nseeds_csv = a.csv\n"},
      {"dsr", "[constellation]\nM = 16\nS = 10\n[keystream]\npoly = 0x11D\nseed = 0x5B\n[scenario]\nfamily = attack\n"
              "N = 16\ndsr = binary\ndsr_flip = 0.5\ntrials = 2000\nmaster_seed = 8\n[output]\njson = d.json\n"},
      {"otp", "[constellation]\nM = 64\nS = 16\n[keystream]\npoly = 0x201B\nseed = 0x1F00\n[scenario]\n"
              "family = attack\nN = 96\notp = true\nmaster_seed = 9\n[output]\njson = o.json\n"},
      {"entropy", "[constellation]\nM = 16\nS = 10\n[keystream]\npoly = 0x11D\nseed = 0x5B\n[scenario]\n"
                  "family = entropy\nN = 16\nregime = quantum\ntrials = 16\nmaster_seed = 10\n[output]\n"
                  "json = e.json\n"},
  };
  const fs::path root = fs::temp_directory_path() / "yzero_acceptance";
  fs::remove_all(root);
  int same = 0, files = 0;
  for (const auto& [name, text] : scenarios) {
    const auto cfg = parse_config(text);
    std::vector<RunResult> results;
    for (int rep = 0; rep < 2; ++rep) {
      RunOptions opts;
      opts.out_dir = root / (name + std::to_string(rep));
      opts.threads = rep + 1;  // thread count must not matter either
      results.push_back(run(cfg, opts));
    }
    bool identical = true;
    for (std::size_t i = 0; i < results[0].data_files.size(); ++i) {
      ++files;
      identical = identical && slurp(results[0].data_files[i]) == slurp(results[1].data_files[i]);
    }
    same += identical;
  }
  return {same == static_cast<int>(scenarios.size()),
          std::to_string(same) + "/" + std::to_string(scenarios.size()) + " scenarios byte-identical across two runs (" +
              std::to_string(files) + " data files, 1 vs 2 threads)"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    double limit_s;  // runtime limit, 0 for none
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria = {
      {1, 10, rank_one_cross_check}, {2, 60, osk_indistinguishable}, {3, 0, bit_bound_limit},
      {4, 0, srm_check},            {5, 600, updown_sweep},         {6, 60, exponents},
      {7, 60, noiseless_attack},    {8, 0, dsr_kill},               {9, 0, otp_identity},
      {10, 0, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string timing = fmt(secs, 3) + " s";
    if (c.limit_s > 0) {
      timing += " / limit " + fmt(c.limit_s, 3) + " s";
      if (secs > c.limit_s) o.pass = false;
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << c.id << ": " << o.detail << " [" << timing << "]"
              << std::endl;
  }
  std::cout << (failed ? "FAILED " : "ALL PASSED ") << 10 - failed << "/10" << std::endl;
  return failed ? 1 : 0;
}
