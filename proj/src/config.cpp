#include "yzero/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

namespace yzero {

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string strip_comment(const std::string& line) {
  for (std::size_t i = 0; i < line.size(); ++i)
    if (line[i] == '#' || line[i] == ';') return line.substr(0, i);
  return line;
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& s, int line) {
  // "pi" multiples are convenient for angles: "pi/512", "0.5*pi".
  std::string t = s;
  if (auto p = t.find("pi"); p != std::string::npos) {
    std::string before = trim(t.substr(0, p)), after = trim(t.substr(p + 2));
    double num = 1.0, den = 1.0;
    if (!before.empty()) {
      if (before.back() != '*') throw ConfigError(line, "cannot parse number '" + s + "'");
      before.pop_back();
      num = parse_double(trim(before), line);
    }
    if (!after.empty()) {
      if (after.front() != '/') throw ConfigError(line, "cannot parse number '" + s + "'");
      den = parse_double(trim(after.substr(1)), line);
    }
    return num * std::numbers::pi / den;
  }
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) throw ConfigError(line, "cannot parse number '" + s + "'");
  if (!std::isfinite(v)) throw ConfigError(line, "non-finite number '" + s + "'");
  return v;
}

std::uint64_t parse_uint(const std::string& s, int line) {
  std::uint64_t v = 0;
  int base = 10;
  std::string_view t = s;
  if (t.size() > 2 && t[0] == '0' && (t[1] == 'x' || t[1] == 'X')) {
    base = 16;
    t.remove_prefix(2);
  }
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v, base);
  if (ec != std::errc() || ptr != t.data() + t.size())
    throw ConfigError(line, "cannot parse unsigned integer '" + s + "'");
  return v;
}

std::uint64_t parse_hex(const std::string& s, int line) {
  std::string t = s;
  if (t.size() > 2 && t[0] == '0' && (t[1] == 'x' || t[1] == 'X')) t = t.substr(2);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v, 16);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
    throw ConfigError(line, "cannot parse hex value '" + s + "'");
  return v;
}

bool parse_bool(const std::string& s, int line) {
  std::string t = s;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "true" || t == "yes" || t == "on" || t == "1") return true;
  if (t == "false" || t == "no" || t == "off" || t == "0") return false;
  throw ConfigError(line, "expected a boolean, got '" + s + "'");
}

}  // namespace

std::string to_string(Family f) {
  switch (f) {
    case Family::attack: return "attack";
    case Family::entropy: return "entropy";
    case Family::keygen: return "keygen";
    default: return "bounds";
  }
}

std::optional<Family> parse_family(const std::string& s) {
  if (s == "bounds") return Family::bounds;
  if (s == "attack") return Family::attack;
  if (s == "entropy") return Family::entropy;
  if (s == "keygen") return Family::keygen;
  return std::nullopt;
}

std::string to_string(BoundsMethod m) {
  switch (m) {
    case BoundsMethod::srm_2M: return "srm_2M";
    case BoundsMethod::updown: return "updown";
    default: return "helstrom_mixed_bit";
  }
}

int ScenarioConfig::line_of(const std::string& key) const {
  auto it = lines.find(key);
  return it == lines.end() ? 0 : it->second;
}

bool ScenarioConfig::uses_monte_carlo() const {
  switch (family) {
    case Family::attack: return trials > 0 || dsr.kind != DsrKind::none || misalign_uniform_draws > 0;
    case Family::entropy: return true;
    case Family::keygen: return homodyne_trials > 0;
    default: return false;
  }
}

KeyFamily ScenarioConfig::key_family() const {
  return {keystream ? keystream->poly : 0, bases.empty() ? 1 : bases.front(), osk};
}

AttackScenario ScenarioConfig::attack_scenario(double misalign_value) const {
  AttackScenario sc;
  sc.key_bits = keystream ? poly_degree(keystream->poly) : 0;
  sc.length = length;
  if (!error_positions.empty()) sc.errors = error_sequence(length, error_positions);
  sc.misalign = misalign_value;
  sc.dsr = dsr;
  sc.otp_mode = otp;
  return sc;
}

ScenarioConfig parse_config(const std::string& text, std::optional<Family> expected) {
  ScenarioConfig cfg;
  cfg.text = text;
  std::map<std::string, std::pair<std::string, int>> kv;

  static const std::map<std::string, std::vector<std::string>> known = {
      {"constellation", {"M", "S", "phase_offset", "osk", "half_step"}},
      {"keystream", {"poly", "seed", "bits_per_symbol"}},
      {"scenario",
       {"family", "methods", "path", "truncation_tol", "prior0", "N", "errors", "misalign", "misalign_uniform_draws",
        "dsr", "dsr_flip", "dsr_jitter", "otp", "regime", "analysis", "master_seed", "trials", "sprime",
        "homodyne_trials", "homodyne_check_S"}},
      {"output", {"csv", "json", "seeds_csv", "manifest"}},
  };

  std::istringstream in(text);
  std::string raw, section;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(lineno, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!known.contains(section)) throw ConfigError(lineno, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(lineno, "expected 'key = value'");
    if (section.empty()) throw ConfigError(lineno, "key outside of any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto& keys = known.at(section);
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      throw ConfigError(lineno, "unknown key '" + key + "' in [" + section + "]");
    const std::string full = section + "." + key;
    if (kv.contains(full)) throw ConfigError(lineno, "duplicate key '" + key + "' in [" + section + "]");
    if (value.empty()) throw ConfigError(lineno, "empty value for '" + key + "'");
    kv[full] = {value, lineno};
    cfg.lines[full] = lineno;
  }

  auto get = [&](const std::string& k) -> const std::pair<std::string, int>* {
    auto it = kv.find(k);
    return it == kv.end() ? nullptr : &it->second;
  };
  auto with = [&](const std::string& k, auto&& fn) {
    if (auto* p = get(k)) fn(p->first, p->second);
  };

  if (auto* f = get("scenario.family")) {
    auto fam = parse_family(f->first);
    if (!fam) throw ConfigError(f->second, "unknown family '" + f->first + "'");
    if (expected && *expected != *fam)
      throw ConfigError(f->second, "config is for family '" + f->first + "' but '" + to_string(*expected) +
                                       "' was requested");
    cfg.family = *fam;
  } else if (expected) {
    cfg.family = *expected;
  } else {
    throw ConfigError(0, "no family given ([scenario] family = ...)");
  }

  with("constellation.M", [&](const std::string& v, int l) {
    for (const auto& item : split_list(v)) {
      const auto m = parse_uint(item, l);
      if (m < 1 || m > 2048 || !is_power_of_two(m)) throw ConfigError(l, "M must be a power of two in [1, 2048]");
      cfg.bases.push_back(static_cast<int>(m));
    }
  });
  with("constellation.S", [&](const std::string& v, int l) {
    for (const auto& item : split_list(v)) {
      const double s = parse_double(item, l);
      if (!(s >= 0.0) || !std::isfinite(s)) throw ConfigError(l, "S must be finite and >= 0");
      cfg.energies.push_back(s);
    }
  });
  with("constellation.phase_offset", [&](const std::string& v, int l) { cfg.phase_offset = parse_double(v, l); });
  with("constellation.osk", [&](const std::string& v, int l) { cfg.osk = parse_bool(v, l); });
  with("constellation.half_step", [&](const std::string& v, int l) { cfg.half_step = parse_bool(v, l); });

  if (get("keystream.poly") || get("keystream.seed") || get("keystream.bits_per_symbol")) {
    KeystreamSpec ks;
    const auto* poly = get("keystream.poly");
    const auto* seed = get("keystream.seed");
    if (!poly) throw ConfigError(0, "[keystream] needs poly (feedback polynomial bitmask, hex)");
    if (!seed) throw ConfigError(0, "[keystream] needs seed (hex)");
    ks.poly = parse_hex(poly->first, poly->second);
    ks.seed = parse_hex(seed->first, seed->second);
    if (ks.poly < 4 || (ks.poly & 1) == 0)
      throw ConfigError(poly->second, "poly must have degree >= 2 and a constant term");
    const int degree = poly_degree(ks.poly);
    if (degree > 32) throw ConfigError(poly->second, "poly degree above 32 is not supported");
    if (ks.seed == 0 || (ks.seed >> degree) != 0)
      throw ConfigError(seed->second, "seed must be a nonzero " + std::to_string(degree) + "-bit value");
    with("keystream.bits_per_symbol", [&](const std::string& v, int l) {
      ks.bits_per_symbol = static_cast<int>(parse_uint(v, l));
    });
    cfg.keystream = ks;
  }

  with("scenario.methods", [&](const std::string& v, int l) {
    for (const auto& item : split_list(v)) {
      if (item == "helstrom_mixed_bit") cfg.methods.push_back(BoundsMethod::helstrom_mixed_bit);
      else if (item == "srm_2M") cfg.methods.push_back(BoundsMethod::srm_2M);
      else if (item == "updown") cfg.methods.push_back(BoundsMethod::updown);
      else throw ConfigError(l, "unknown method '" + item + "'");
    }
  });
  with("scenario.path", [&](const std::string& v, int l) {
    if (v == "automatic") cfg.path = EvalPath::automatic;
    else if (v == "fock") cfg.path = EvalPath::fock;
    else if (v == "gram") cfg.path = EvalPath::gram;
    else throw ConfigError(l, "path must be automatic, fock or gram");
  });
  with("scenario.truncation_tol", [&](const std::string& v, int l) {
    cfg.truncation_tol = parse_double(v, l);
    if (!(cfg.truncation_tol > 0.0 && cfg.truncation_tol < 1.0)) throw ConfigError(l, "truncation_tol must lie in (0, 1)");
  });
  with("scenario.prior0", [&](const std::string& v, int l) {
    cfg.prior0 = parse_double(v, l);
    if (!(cfg.prior0 >= 0.0 && cfg.prior0 <= 1.0)) throw ConfigError(l, "prior0 must lie in [0, 1]");
  });
  with("scenario.N", [&](const std::string& v, int l) {
    cfg.length = parse_uint(v, l);
    if (cfg.length < 1 || cfg.length > (1u << 20)) throw ConfigError(l, "N must lie in [1, 2^20]");
  });
  with("scenario.errors", [&](const std::string& v, int l) {
    if (v == "none") return;
    for (const auto& item : split_list(v)) cfg.error_positions.push_back(parse_uint(item, l));
  });
  with("scenario.misalign", [&](const std::string& v, int l) {
    cfg.misalign.clear();
    for (const auto& item : split_list(v)) cfg.misalign.push_back(parse_double(item, l));
  });
  with("scenario.misalign_uniform_draws", [&](const std::string& v, int l) {
    cfg.misalign_uniform_draws = static_cast<int>(parse_uint(v, l));
  });
  with("scenario.dsr", [&](const std::string& v, int l) {
    if (v == "none") cfg.dsr.kind = DsrKind::none;
    else if (v == "binary") cfg.dsr.kind = DsrKind::binary;
    else if (v == "jitter") cfg.dsr.kind = DsrKind::jitter;
    else throw ConfigError(l, "dsr must be none, binary or jitter");
  });
  with("scenario.dsr_flip", [&](const std::string& v, int l) {
    cfg.dsr.flip = parse_double(v, l);
    if (!(cfg.dsr.flip >= 0.0 && cfg.dsr.flip <= 1.0)) throw ConfigError(l, "dsr_flip must lie in [0, 1]");
  });
  with("scenario.dsr_jitter", [&](const std::string& v, int l) {
    cfg.dsr.jitter = parse_double(v, l);
    if (!(cfg.dsr.jitter >= 0.0 && cfg.dsr.jitter <= std::numbers::pi)) throw ConfigError(l, "dsr_jitter must lie in [0, pi]");
  });
  with("scenario.otp", [&](const std::string& v, int l) { cfg.otp = parse_bool(v, l); });
  with("scenario.regime", [&](const std::string& v, int l) {
    if (v == "classical") cfg.regime = EveRegime::classical;
    else if (v == "quantum") cfg.regime = EveRegime::quantum;
    else throw ConfigError(l, "regime must be classical or quantum");
  });
  with("scenario.analysis", [&](const std::string& v, int l) {
    if (v == "ciphertext_only") cfg.analysis = EntropyAnalysis::ciphertext_only;
    else if (v == "known_plaintext") cfg.analysis = EntropyAnalysis::known_plaintext;
    else if (v == "both") cfg.analysis = EntropyAnalysis::both;
    else throw ConfigError(l, "analysis must be ciphertext_only, known_plaintext or both");
  });
  with("scenario.master_seed", [&](const std::string& v, int l) { cfg.master_seed = parse_uint(v, l); });
  with("scenario.trials", [&](const std::string& v, int l) {
    const auto t = parse_uint(v, l);
    if (t > 100'000'000) throw ConfigError(l, "trials too large");
    cfg.trials = static_cast<int>(t);
  });
  with("scenario.sprime", [&](const std::string& v, int l) {
    for (const auto& item : split_list(v)) cfg.sprime.push_back(parse_double(item, l));
  });
  with("scenario.homodyne_trials", [&](const std::string& v, int l) { cfg.homodyne_trials = parse_uint(v, l); });
  with("scenario.homodyne_check_S", [&](const std::string& v, int l) { cfg.homodyne_check_energy = parse_double(v, l); });

  with("output.csv", [&](const std::string& v, int) { cfg.csv = v; });
  with("output.json", [&](const std::string& v, int) { cfg.json = v; });
  with("output.seeds_csv", [&](const std::string& v, int) { cfg.seeds_csv = v; });
  with("output.manifest", [&](const std::string& v, int) { cfg.manifest = v; });

  validate(cfg);
  return cfg;
}

void validate(const ScenarioConfig& cfg) {
  auto line = [&](const std::string& k) { return cfg.line_of(k); };
  auto need = [&](bool ok, const std::string& key, const std::string& what) {
    if (!ok) throw ConfigError(line(key), what);
  };

  need(!cfg.bases.empty(), "constellation.M", "[constellation] M grid is empty or missing");
  need(!cfg.energies.empty(), "constellation.S", "[constellation] S grid is empty or missing");
  if (cfg.uses_monte_carlo())
    need(cfg.master_seed.has_value(), "scenario.master_seed", "master_seed is required for Monte Carlo scenarios");

  switch (cfg.family) {
    case Family::bounds:
      need(!cfg.methods.empty(), "scenario.methods", "bounds needs a non-empty methods list");
      need(!cfg.csv.empty(), "output.csv", "bounds needs [output] csv");
      if (cfg.osk)
        for (auto m : cfg.methods)
          need(m != BoundsMethod::updown, "scenario.methods", "updown is defined only for non-OSK constellations");
      break;
    case Family::attack:
    case Family::entropy: {
      need(cfg.keystream.has_value(), "keystream.poly", "[keystream] is required for the " + to_string(cfg.family) + " family");
      need(cfg.bases.size() == 1, "constellation.M", "this family takes a single M");
      need(cfg.energies.size() == 1, "constellation.S", "this family takes a single S");
      const int degree = poly_degree(cfg.keystream->poly);
      need(degree >= 2, "keystream.poly", "|K| must be >= 2");
      const int bps = bits_per_symbol(cfg.bases.front(), cfg.osk);
      if (cfg.keystream->bits_per_symbol != 0)
        need(cfg.keystream->bits_per_symbol == bps, "keystream.bits_per_symbol",
             "bits_per_symbol must be " + std::to_string(bps) + " for this M/OSK");
      for (auto p : cfg.error_positions)
        need(p < cfg.length, "scenario.errors", "error position " + std::to_string(p) + " is not below N");
      need(!cfg.misalign.empty() || cfg.misalign_uniform_draws > 0, "scenario.misalign", "misalign grid is empty");
      if (cfg.dsr.kind == DsrKind::binary)
        need(cfg.line_of("scenario.dsr_flip") > 0, "scenario.dsr", "dsr = binary needs dsr_flip");
      if (cfg.dsr.kind == DsrKind::jitter)
        need(cfg.line_of("scenario.dsr_jitter") > 0, "scenario.dsr", "dsr = jitter needs dsr_jitter");
      if (cfg.family == Family::attack) {
        need(!cfg.json.empty(), "output.json", "attack needs [output] json");
        if (degree > kMaxSearchKeyBits)
          throw RegimeError("line " + std::to_string(line("keystream.poly")) + ": seed search needs |K| <= " +
                            std::to_string(kMaxSearchKeyBits));
        if (cfg.trials > 0 && degree > kMaxEntropyKeyBits)
          throw RegimeError("line " + std::to_string(line("scenario.trials")) +
                            ": mutual information estimate needs |K| <= " + std::to_string(kMaxEntropyKeyBits));
      } else {
        need(!cfg.json.empty(), "output.json", "entropy needs [output] json");
        need(cfg.trials > 0, "scenario.trials", "entropy needs trials > 0");
        if (degree > kMaxEntropyKeyBits)
          throw RegimeError("line " + std::to_string(line("keystream.poly")) + ": entropy estimates need |K| <= " +
                            std::to_string(kMaxEntropyKeyBits));
        if (cfg.length > kMaxEntropyLength)
          throw RegimeError("line " + std::to_string(line("scenario.N")) + ": entropy estimates need N <= " +
                            std::to_string(kMaxEntropyLength));
      }
      break;
    }
    case Family::keygen:
      need(!cfg.csv.empty(), "output.csv", "keygen needs [output] csv");
      break;
  }
}

ScenarioConfig load_config(const std::filesystem::path& path, std::optional<Family> expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(0, "cannot read config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), expected);
}

std::string config_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace yzero
