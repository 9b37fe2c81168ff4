#include "oracles.hpp"

#include "yzero/codec.hpp"
#include "yzero/detection.hpp"

#include <doctest.h>

#include <numbers>

using namespace yzero;

namespace {

// Helstrom error by dense Fock construction and SVD trace norm.
double dense_helstrom(const Constellation& c, const std::vector<double>& w0, const std::vector<double>& w1,
                      double p0) {
  const auto dim = truncation_dim(c.energy(), 1e-14);
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(dim, dim);
  for (int j = 0; j < c.size(); ++j) {
    const auto v = oracle::coherent(c.amplitude(j), dim);
    d += ((1.0 - p0) * w1[j] - p0 * w0[j]) * v * v.adjoint();
  }
  return 0.5 * (1.0 - oracle::trace_norm_svd(d));
}

}  // namespace

TEST_CASE("pure Helstrom matches the closed form") {
  for (double p0 : {0.5, 0.3, 0.9}) {
    const Amplitude a{1.0, 0.2}, b{-0.4, 0.7};
    CHECK(helstrom_pure(a, b, p0).p_error == doctest::Approx(oracle::helstrom_pure(a, b, p0)).epsilon(1e-12));
  }
  CHECK(helstrom_pure({1.0, 0.0}, {1.0, 0.0}, 0.3).p_error == doctest::Approx(0.3));
  // Far-apart states: tiny but positive, no cancellation.
  const double p = helstrom_pure({5.0, 0.0}, {-5.0, 0.0}, 0.5).p_error;
  CHECK(p > 0.0);
  CHECK(p == doctest::Approx(0.25 * std::exp(-100.0)).epsilon(1e-6));
}

TEST_CASE("mixed Helstrom on rank-one densities equals pure result") {
  const Amplitude a{1.2, -0.3}, b{0.1, 1.1};
  const auto dim = truncation_dim(std::max(std::norm(a), std::norm(b)));
  std::vector<FockVector<double>> s0{coherent_fock(a, dim)}, s1{coherent_fock(b, dim)};
  const std::vector<double> one{1.0};
  const auto r = helstrom_mixed(density_from_ensemble(s0, one), density_from_ensemble(s1, one), 0.4);
  CHECK(r.p_error == doctest::Approx(oracle::helstrom_pure(a, b, 0.4)).epsilon(1e-10));
  CHECK(r.method == BoundMethod::helstrom_mixed);
}

TEST_CASE("bit bound agrees between Fock, Gram and a dense SVD reference") {
  for (int m : {2, 4, 8}) {
    for (double s : {0.5, 2.0}) {
      const Constellation c(m, s, 0.1);
      const auto w0 = bit_weights(c, 0), w1 = bit_weights(c, 1);
      const double ref = dense_helstrom(c, w0, w1, 0.5);
      CHECK(bit_bound(c, 0.5, EvalPath::fock).p_error == doctest::Approx(ref).epsilon(1e-8));
      CHECK(bit_bound(c, 0.5, EvalPath::gram).p_error == doctest::Approx(ref).epsilon(1e-8));
    }
  }
}

TEST_CASE("updown bound agrees between paths") {
  const Constellation c(8, 3.0);
  const auto f = updown_bound(c, EvalPath::fock);
  const auto g = updown_bound(c, EvalPath::gram);
  CHECK(f.p_error == doctest::Approx(g.p_error).epsilon(1e-8));
  CHECK(g.path == EvalPath::gram);
  CHECK_THROWS_AS(updown_bound(Constellation(8, 3.0, 0.0, true)), std::invalid_argument);
}

TEST_CASE("unequal priors are honoured") {
  const Constellation c(4, 1.0);
  const auto w0 = bit_weights(c, 0), w1 = bit_weights(c, 1);
  const auto r = helstrom_constellation(c, w0, w1, 0.8, EvalPath::gram);
  CHECK(r.p_error == doctest::Approx(dense_helstrom(c, w0, w1, 0.8)).epsilon(1e-8));
  CHECK(r.p_error <= 0.2 + 1e-12);
}

TEST_CASE("circulant Gram eigenvalues sum to the number of states") {
  const Constellation c(16, 5.0);
  const auto lam = constellation_gram_eigenvalues(c);
  CHECK(lam.sum() == doctest::Approx(32.0).epsilon(1e-10));
  CHECK(lam.minCoeff() >= 0.0);
  const auto g = oracle::gram(c.amplitudes());
  const auto root = constellation_gram_sqrt(c);
  CHECK((root * root - g).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("SRM error matches direct Gram square root") {
  for (int m : {1, 2, 4, 8})
    for (double s : {0.3, 1.0, 4.0, 9.0}) {
      const Constellation c(m, s, 0.25);
      CHECK(srm_mary_error(c).p_error == doctest::Approx(oracle::srm_error_direct(c.amplitudes())).epsilon(1e-8));
    }
  // 2 states: SRM is optimal, so it equals the Helstrom bound.
  const Constellation bpsk(1, 2.0);
  CHECK(srm_mary_error(bpsk).p_error == doctest::Approx(helstrom_pure(bpsk.amplitude(0), bpsk.amplitude(1), 0.5).p_error));
}

TEST_CASE("normal CDF and antipodal homodyne error") {
  for (double x : {-3.0, -1.0, 0.0, 0.7, 2.5}) CHECK(normal_cdf(x) == doctest::Approx(oracle::normal_cdf(x)).epsilon(1e-10));
  CHECK(homodyne_antipodal_error(0.0) == doctest::Approx(0.5));
  CHECK(homodyne_antipodal_error(1.0) == doctest::Approx(oracle::normal_cdf(-2.0)).epsilon(1e-10));
}

TEST_CASE("homodyne Monte Carlo is thread-count independent") {
  const auto a = homodyne_antipodal_errors(1.0, 200000, 11, 1);
  const auto b = homodyne_antipodal_errors(1.0, 200000, 11, 3);
  CHECK(a == b);
  const double p = homodyne_antipodal_error(1.0);
  CHECK(std::abs(a - 200000 * p) < 4.0 * std::sqrt(200000 * p * (1 - p)));
}

TEST_CASE("heterodyne phase density integrates to one") {
  for (double s : {0.0, 1.0, 10.0}) {
    const int n = 4000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double phi = -std::numbers::pi + (i + 0.5) * 2.0 * std::numbers::pi / n;
      sum += heterodyne_phase_density(phi, s);
    }
    CHECK(sum * 2.0 * std::numbers::pi / n == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("heterodyne confusion matches sampling") {
  const Constellation c(4, 3.0);
  const auto q = heterodyne_confusion(c);
  double total = 0.0;
  for (double x : q) total += x;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
  const double pe = 1.0 - q[0];
  const double mc = heterodyne_nearest_error(c, 200000, 5);
  CHECK(std::abs(mc - pe) < 4.0 * std::sqrt(pe * (1 - pe) / 200000));
}

TEST_CASE("exponent fit recovers a pure exponential") {
  std::vector<std::pair<double, double>> pts;
  for (double s : {2.0, 3.0, 4.0, 5.0}) pts.emplace_back(s, 0.3 * std::exp(-2.0 * s));
  const auto f = exponent_fit(pts);
  CHECK(f.slope == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(f.r2 == doctest::Approx(1.0));
  pts.pop_back();
  CHECK_THROWS_AS(exponent_fit(pts), std::invalid_argument);
}

TEST_CASE("binary entropy") {
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(0.5) == doctest::Approx(1.0));
  CHECK(binary_entropy(0.11) == doctest::Approx(-0.11 * std::log2(0.11) - 0.89 * std::log2(0.89)));
}
