#include "yzero/detection.hpp"

#include "yzero/parallel.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace yzero {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kGramNegativeFloor = -1e-10;
constexpr std::uint64_t kMonteCarloBlock = 1u << 16;

void check_prior(double p0) {
  if (!(p0 >= 0.0 && p0 <= 1.0)) throw std::invalid_argument("prior must lie in [0, 1]");
}

void check_weights(const Constellation& c, const std::vector<double>& w) {
  if (w.size() != static_cast<std::size_t>(c.size()))
    throw std::invalid_argument("weights must have one entry per constellation state");
}

// <a_0|a_k> for states separated by k steps of pi/M on a circle of energy S.
std::vector<std::complex<double>> relative_overlaps(const Constellation& c) {
  const int n = c.size();
  const double s = c.energy();
  std::vector<std::complex<double>> out(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double theta = kPi * k / c.bases();
    out[static_cast<std::size_t>(k)] = std::exp(std::complex<double>(-s * (1.0 - std::cos(theta)), s * std::sin(theta)));
  }
  return out;
}

std::vector<std::complex<double>> twiddles(int n) {
  std::vector<std::complex<double>> tw(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) tw[static_cast<std::size_t>(t)] = std::polar(1.0, -2.0 * kPi * t / n);
  return tw;
}

}  // namespace

std::string to_string(BoundMethod m) {
  return m == BoundMethod::helstrom_pure ? "helstrom_pure" : "helstrom_mixed";
}

std::string to_string(EvalPath p) {
  switch (p) {
    case EvalPath::fock: return "fock";
    case EvalPath::gram: return "gram";
    default: return "automatic";
  }
}

BinaryBound helstrom_pure(Amplitude a0, Amplitude a1, double p0) {
  check_prior(p0);
  const double p1 = 1.0 - p0;
  const double y = 4.0 * p0 * p1 * std::norm(coherent_overlap(a0, a1));
  // (1 - sqrt(1 - y)) / 2 without cancellation for small y.
  const double pe = y / (2.0 * (1.0 + std::sqrt(std::max(0.0, 1.0 - y))));
  return {std::min(pe, std::min(p0, p1)), BoundMethod::helstrom_pure, p0, p1, 0, 0.0, EvalPath::automatic};
}

BinaryBound helstrom_mixed(const DensityMatrix<double>& rho0, const DensityMatrix<double>& rho1, double p0) {
  check_prior(p0);
  if (rho0.dim() != rho1.dim()) throw std::invalid_argument("helstrom_mixed: dimension mismatch");
  const double p1 = 1.0 - p0;
  const MatrixXcd diff = p1 * rho1.matrix() - p0 * rho0.matrix();
  const double pe = 0.5 * (1.0 - trace_norm(diff));
  return {pe, BoundMethod::helstrom_mixed, p0, p1, rho0.dim(),
          std::max(rho0.truncation_deficit(), rho1.truncation_deficit()), EvalPath::fock};
}

RVector<double> constellation_gram_eigenvalues(const Constellation& c) {
  const int n = c.size();
  const auto overlaps = relative_overlaps(c);
  const auto tw = twiddles(n);
  RVector<double> lambda(n);
  for (int m = 0; m < n; ++m) {
    std::complex<double> acc = 0.0;
    for (int k = 0; k < n; ++k)
      acc += overlaps[static_cast<std::size_t>(k)] *
             tw[static_cast<std::size_t>((static_cast<long>(m) * k) % n)];
    lambda(m) = acc.real();
  }
  if (lambda.minCoeff() < kGramNegativeFloor)
    throw std::runtime_error("constellation Gram matrix has a negative eigenvalue: numerical failure");
  return lambda.cwiseMax(0.0);
}

MatrixXcd constellation_gram_sqrt(const Constellation& c) {
  const int n = c.size();
  const RVector<double> root = constellation_gram_eigenvalues(c).cwiseSqrt();
  const auto tw = twiddles(n);
  std::vector<std::complex<double>> g(static_cast<std::size_t>(n));
  for (int d = 0; d < n; ++d) {
    std::complex<double> acc = 0.0;
    for (int m = 0; m < n; ++m)
      acc += root(m) * tw[static_cast<std::size_t>((static_cast<long>(m) * d) % n)];
    g[static_cast<std::size_t>(d)] = acc / static_cast<double>(n);
  }
  MatrixXcd out(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) out(j, k) = g[static_cast<std::size_t>(((j - k) % n + n) % n)];
  return out;
}

BinaryBound helstrom_constellation(const Constellation& c, const std::vector<double>& w0,
                                   const std::vector<double>& w1, double p0, EvalPath path, double trunc_tol) {
  check_prior(p0);
  check_weights(c, w0);
  check_weights(c, w1);
  const Eigen::Index fock_dim = truncation_dim(c.energy(), trunc_tol);
  if (path == EvalPath::automatic) path = c.size() < fock_dim ? EvalPath::gram : EvalPath::fock;

  if (path == EvalPath::fock) {
    const auto rho0 = constellation_density(c, w0, fock_dim);
    const auto rho1 = constellation_density(c, w1, fock_dim);
    return helstrom_mixed(rho0, rho1, p0);
  }

  const double p1 = 1.0 - p0;
  RVector<double> w(c.size());
  for (int j = 0; j < c.size(); ++j) {
    const auto i = static_cast<std::size_t>(j);
    w(j) = p1 * w1[i] - p0 * w0[i];
  }
  const MatrixXcd root = constellation_gram_sqrt(c);
  const MatrixXcd b = root * w.asDiagonal() * root;
  const double pe = 0.5 * (1.0 - trace_norm(b));
  return {pe, BoundMethod::helstrom_mixed, p0, p1, c.size(), 0.0, EvalPath::gram};
}

BinaryBound bit_bound(const Constellation& c, double p0, EvalPath path, double trunc_tol) {
  return helstrom_constellation(c, bit_weights(c, 0), bit_weights(c, 1), p0, path, trunc_tol);
}

BinaryBound updown_bound(const Constellation& c, EvalPath path, double trunc_tol) {
  if (c.osk()) throw std::invalid_argument("updown_bound: defined for non-OSK constellations");
  return helstrom_constellation(c, label_weights(c, Label::down), label_weights(c, Label::up), 0.5, path,
                                trunc_tol);
}

MaryBound srm_mary_error(const Constellation& c) {
  const RVector<double> lambda = constellation_gram_eigenvalues(c);
  const double n = c.size();
  const double amp = lambda.cwiseSqrt().sum() / n;
  return {std::clamp(1.0 - amp * amp, 0.0, 1.0), c.size()};
}

double homodyne_sample(Amplitude a, double axis, Rng& rng) {
  const double mean = std::abs(a) * std::cos(std::arg(a) - axis);
  return std::normal_distribution<double>(mean, kHomodyneSd)(rng);
}

std::complex<double> heterodyne_sample(Amplitude a, Rng& rng) {
  std::normal_distribution<double> noise(0.0, std::sqrt(kHeterodyneVar));
  const double re = a.real() + noise(rng);
  const double im = a.imag() + noise(rng);
  return {re, im};
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double homodyne_antipodal_error(double energy) { return normal_cdf(-2.0 * std::sqrt(energy)); }

std::uint64_t homodyne_antipodal_errors(double energy, std::uint64_t trials, std::uint64_t seed, int threads) {
  const std::uint64_t blocks = (trials + kMonteCarloBlock - 1) / kMonteCarloBlock;
  std::vector<std::uint64_t> counts(blocks, 0);
  const double amp = std::sqrt(energy);
  parallel_for(blocks, threads, [&](std::size_t b) {
    Rng rng = make_rng(seed, b);
    std::bernoulli_distribution coin(0.5);
    const std::uint64_t begin = b * kMonteCarloBlock;
    const std::uint64_t end = std::min(trials, begin + kMonteCarloBlock);
    std::uint64_t errs = 0;
    for (std::uint64_t t = begin; t < end; ++t) {
      const bool one = coin(rng);
      const double x = homodyne_sample(Amplitude(one ? -amp : amp, 0.0), 0.0, rng);
      errs += static_cast<std::uint64_t>((x < 0.0) != one);
    }
    counts[b] = errs;
  });
  std::uint64_t total = 0;
  for (auto v : counts) total += v;
  return total;
}

double heterodyne_phase_density(double phi, double energy) {
  const double beta = std::sqrt(energy) * std::cos(phi);
  const double sin_phi = std::sin(phi);
  return (std::exp(-energy) +
          std::sqrt(kPi) * beta * std::exp(-energy * sin_phi * sin_phi) * (1.0 + std::erf(beta))) /
         (2.0 * kPi);
}

std::vector<double> heterodyne_confusion(const Constellation& c) {
  using boost::math::quadrature::gauss_kronrod;
  const int n = c.size();
  const double step = kPi / c.bases();
  const double s = c.energy();
  auto density = [s](double phi) { return heterodyne_phase_density(phi, s); };
  std::vector<double> q(static_cast<std::size_t>(n));
  for (int d = 0; d < n; ++d) {
    const double mid = d * step;
    q[static_cast<std::size_t>(d)] =
        gauss_kronrod<double, 61>::integrate(density, mid - 0.5 * step, mid + 0.5 * step, 15, 1e-13);
  }
  return q;
}

double heterodyne_nearest_error(const Constellation& c, std::uint64_t trials, std::uint64_t seed) {
  Rng rng = make_rng(seed, 0);
  std::uniform_int_distribution<int> pick(0, c.size() - 1);
  std::uint64_t errs = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const int j = pick(rng);
    const auto y = heterodyne_sample(c.amplitude(j), rng);
    errs += static_cast<std::uint64_t>(c.nearest_index(std::arg(y)) != j);
  }
  return static_cast<double>(errs) / static_cast<double>(trials);
}

ExponentFit exponent_fit(std::span<const std::pair<double, double>> points) {
  if (points.size() < 4) throw std::invalid_argument("exponent_fit: need at least 4 points");
  for (const auto& [s, p] : points)
    if (!(p > 0.0 && p < 0.5) || !std::isfinite(s))
      throw std::invalid_argument("exponent_fit: every p_error must lie in (0, 0.5)");

  const double n = static_cast<double>(points.size());
  double sx = 0, sy = 0;
  for (const auto& [s, p] : points) {
    sx += s;
    sy += std::log(p);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& [s, p] : points) {
    const double dx = s - mx, dy = std::log(p) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw std::invalid_argument("exponent_fit: energies must not all coincide");
  ExponentFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  const double ss_res = syy - fit.slope * sxy;
  fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

}  // namespace yzero
