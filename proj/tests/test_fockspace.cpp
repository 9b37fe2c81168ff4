#include "oracles.hpp"

#include "yzero/fockspace.hpp"

#include <doctest.h>

#include <random>

using namespace yzero;

TEST_CASE("coherent overlap magnitude matches exp(-|a-b|^2/2)") {
  const Amplitude a{1.3, -0.4}, b{-0.2, 0.9};
  CHECK(std::abs(coherent_overlap(a, b)) == doctest::Approx(std::exp(-0.5 * std::norm(a - b))).epsilon(1e-14));
  CHECK(coherent_overlap(a, a).real() == doctest::Approx(1.0));
  CHECK(std::abs(coherent_overlap(a, a).imag()) < 1e-15);
}

TEST_CASE("truncation dimension leaves a tail below tolerance") {
  for (double s : {0.5, 1.0, 4.0, 10.0, 25.0, 100.0}) {
    const auto n = truncation_dim(s, 1e-10);
    CHECK(oracle::poisson_tail(s, n) < 1e-10L);
    CHECK(oracle::poisson_tail(s, n - 1) >= 1e-10L);
  }
  CHECK(truncation_dim(0.0) == 1);
  CHECK_THROWS_AS(truncation_dim(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(truncation_dim(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("coherent Fock coefficients agree with the recurrence") {
  for (Amplitude a : {Amplitude{0.0, 0.0}, Amplitude{1.0, 0.5}, Amplitude{-2.0, 1.5}, Amplitude{3.0, -3.0}}) {
    const auto dim = truncation_dim(std::norm(a));
    const auto v = coherent_fock(a, dim);
    const auto ref = oracle::coherent(a, dim);
    CHECK((v.coeffs - ref).cwiseAbs().maxCoeff() < 1e-13);
    CHECK(v.truncation_deficit() < 1e-9);
  }
}

TEST_CASE("coherent Fock coefficients stay finite at large amplitude") {
  const auto v = coherent_fock(Amplitude{std::sqrt(400.0), 0.0}, truncation_dim(400.0));
  CHECK(v.coeffs.allFinite());
  CHECK(v.norm2() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("trace norm agrees with singular values") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (int t = 0; t < 10; ++t) {
    MatrixXcd a(6, 6);
    for (Eigen::Index i = 0; i < 6; ++i)
      for (Eigen::Index j = 0; j < 6; ++j) a(i, j) = {g(rng), g(rng)};
    const MatrixXcd h = a + a.adjoint();
    CHECK(trace_norm(h) == doctest::Approx(oracle::trace_norm_svd(h)).epsilon(1e-12));
  }
}

TEST_CASE("hermitian_eig rejects non-Hermitian input") {
  MatrixXcd m = MatrixXcd::Identity(3, 3);
  m(0, 1) = {1e-6, 0.0};
  CHECK_THROWS_AS(hermitian_eig(m), std::invalid_argument);
  CHECK_THROWS_AS(hermitian_eig(MatrixXcd(2, 3)), std::invalid_argument);
}

TEST_CASE("DensityMatrix validation") {
  MatrixXcd ok = MatrixXcd::Zero(2, 2);
  ok(0, 0) = 0.25;
  ok(1, 1) = 0.75;
  CHECK(DensityMatrix<double>::from_matrix(ok).trace() == doctest::Approx(1.0));

  MatrixXcd bad_trace = ok * 2.0;
  CHECK_THROWS_AS(DensityMatrix<double>::from_matrix(bad_trace), std::invalid_argument);

  MatrixXcd not_psd = MatrixXcd::Zero(2, 2);
  not_psd(0, 0) = 1.5;
  not_psd(1, 1) = -0.5;
  CHECK_THROWS_AS(DensityMatrix<double>::from_matrix(not_psd), std::invalid_argument);

  MatrixXcd skew = ok;
  skew(0, 1) = {0.0, 1e-9};
  CHECK_THROWS_AS(DensityMatrix<double>::from_matrix(skew), std::invalid_argument);
}

TEST_CASE("ensemble density is Hermitian with unit trace") {
  std::vector<FockVector<double>> states;
  const auto dim = truncation_dim(9.0);
  for (int j = 0; j < 8; ++j) states.push_back(coherent_fock(std::polar(3.0, j * 0.7), dim));
  const std::vector<double> w(8, 1.0 / 8);
  const auto rho = density_from_ensemble(states, w);
  CHECK(hermiticity_error(rho.matrix()) <= tol::hermitian_entry);
  CHECK(std::abs(rho.trace() - 1.0) <= tol::unit_trace);
  CHECK(rho.truncation_deficit() < 1e-9);
  CHECK(hermitian_eig(rho.matrix(), false).eigenvalues.minCoeff() >= -tol::psd_floor);
}

TEST_CASE("ensemble_trace_norm via Gram matches Fock-space trace norm") {
  std::vector<Amplitude> amps;
  std::vector<double> w;
  for (int j = 0; j < 6; ++j) {
    amps.push_back(std::polar(2.0, j * 1.1));
    w.push_back(j % 2 ? 0.2 : -0.13);
  }
  const auto dim = truncation_dim(4.0, 1e-14);
  MatrixXcd m = MatrixXcd::Zero(dim, dim);
  for (std::size_t j = 0; j < amps.size(); ++j) {
    const auto v = oracle::coherent(amps[j], dim);
    m += w[j] * v * v.adjoint();
  }
  const double gram = ensemble_trace_norm<double>(amps, w);
  CHECK(gram == doctest::Approx(oracle::trace_norm_svd(m)).epsilon(1e-10));
}

TEST_CASE("psd_sqrt squares back") {
  const std::vector<std::complex<double>> amps{{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.2}};
  const auto g = oracle::gram(amps);
  const auto r = psd_sqrt(g);
  CHECK((r * r - g).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("templates instantiate for long double") {
  const std::complex<long double> a{1.0L, 0.5L};
  const auto v = coherent_fock(a, 30);
  CHECK(static_cast<double>(v.norm2()) == doctest::Approx(1.0).epsilon(1e-12));
}
