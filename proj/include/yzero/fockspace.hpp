#pragma once

// Truncated number-basis numerics for single-mode coherent states.
//
// Everything here is templated on the real scalar so the same code can be
// instantiated at double (the default everywhere else in the library) or at
// long double for cross-checks. Matrices are dense Eigen types.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace yzero {

template <typename Real>
using CMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using CVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using RVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

using Amplitude = std::complex<double>;
using MatrixXcd = CMatrix<double>;
using VectorXcd = CVector<double>;

namespace tol {
inline constexpr double truncation = 1e-10;
inline constexpr double hermitian_entry = 1e-12;
inline constexpr double hermitian_input = 1e-10;
inline constexpr double unit_trace = 1e-9;
inline constexpr double psd_floor = 1e-9;
inline constexpr double prob_sum = 1e-12;
}  // namespace tol

/// Mean photon number of a coherent amplitude.
template <typename Real>
Real energy(std::complex<Real> a) {
  return std::norm(a);
}

/// <a|b> = exp(-|a|^2/2 - |b|^2/2 + conj(a) b)
template <typename Real>
std::complex<Real> coherent_overlap(std::complex<Real> a, std::complex<Real> b) {
  return std::exp(-Real(0.5) * (std::norm(a) + std::norm(b)) + std::conj(a) * b);
}

/// Smallest number-basis dimension whose Poisson(max_energy) tail beyond the
/// last kept level is below `tol`.
Eigen::Index truncation_dim(double max_energy, double tol = tol::truncation);

template <typename Real>
struct FockVector {
  CVector<Real> coeffs;

  Eigen::Index dim() const { return coeffs.size(); }
  Real norm2() const { return coeffs.squaredNorm(); }
  /// Probability mass lost to truncation, 1 - ||c||^2.
  Real truncation_deficit() const { return std::max(Real(0), Real(1) - norm2()); }
  FockVector normalized() const { return {coeffs / coeffs.norm()}; }
};

/// c_n = exp(-|a|^2/2) a^n / sqrt(n!), evaluated in log-magnitude form so that
/// large amplitudes do not underflow the prefactor.
template <typename Real>
FockVector<Real> coherent_fock(std::complex<Real> a, Eigen::Index dim) {
  if (dim < 1) throw std::invalid_argument("coherent_fock: dim must be >= 1");
  CVector<Real> c = CVector<Real>::Zero(dim);
  const Real r = std::abs(a);
  if (r == Real(0)) {
    c(0) = Real(1);
    return {c};
  }
  const Real log_r = std::log(r);
  const Real phase = std::arg(a);
  const Real half_s = Real(0.5) * r * r;
  for (Eigen::Index n = 0; n < dim; ++n) {
    const Real nn = static_cast<Real>(n);
    const Real log_mag = -half_s + nn * log_r - Real(0.5) * std::lgamma(nn + Real(1));
    c(n) = std::polar(std::exp(log_mag), nn * phase);
  }
  return {c};
}

/// Hermitian, unit-trace, positive semidefinite operator on a truncated basis.
template <typename Real>
class DensityMatrix {
 public:
  /// Validates every invariant, including positivity.
  static DensityMatrix from_matrix(CMatrix<Real> m, Real truncation_deficit = Real(0));

  const CMatrix<Real>& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }
  Real trace() const { return m_.trace().real(); }
  /// Largest pre-normalization deficit among the states that built this matrix.
  Real truncation_deficit() const { return deficit_; }

 private:
  template <typename R>
  friend DensityMatrix<R> density_from_ensemble(std::span<const FockVector<R>>, std::span<const R>);

  DensityMatrix(CMatrix<Real> m, Real deficit) : m_(std::move(m)), deficit_(deficit) {}

  CMatrix<Real> m_;
  Real deficit_ = 0;
};

template <typename Real>
struct HermitianEig {
  RVector<Real> eigenvalues;  // ascending
  CMatrix<Real> eigenvectors;
};

template <typename Derived>
typename Derived::RealScalar hermiticity_error(const Eigen::MatrixBase<Derived>& m) {
  if (m.rows() == 0) return 0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues sorted ascending.
/// Throws std::invalid_argument when the input departs from Hermitian by more
/// than `tol::hermitian_input` in any entry.
template <typename Derived>
HermitianEig<typename Derived::RealScalar> hermitian_eig(const Eigen::MatrixBase<Derived>& m,
                                                         bool vectors = true) {
  using Real = typename Derived::RealScalar;
  if (m.rows() != m.cols()) throw std::invalid_argument("hermitian_eig: matrix is not square");
  if (hermiticity_error(m) > Real(tol::hermitian_input))
    throw std::invalid_argument("hermitian_eig: matrix is not Hermitian");
  const CMatrix<Real> h = (Real(0.5) * (m + m.adjoint())).eval();
  Eigen::SelfAdjointEigenSolver<CMatrix<Real>> es(
      h, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("hermitian_eig: no convergence");
  HermitianEig<Real> out;
  out.eigenvalues = es.eigenvalues();
  if (vectors) out.eigenvectors = es.eigenvectors();
  return out;
}

/// Tr|A| for Hermitian A.
template <typename Derived>
typename Derived::RealScalar trace_norm(const Eigen::MatrixBase<Derived>& m) {
  return hermitian_eig(m, false).eigenvalues.cwiseAbs().sum();
}

template <typename Real>
DensityMatrix<Real> DensityMatrix<Real>::from_matrix(CMatrix<Real> m, Real truncation_deficit) {
  if (m.rows() == 0 || m.rows() != m.cols())
    throw std::invalid_argument("DensityMatrix: matrix must be square and non-empty");
  if (hermiticity_error(m) > Real(tol::hermitian_entry))
    throw std::invalid_argument("DensityMatrix: not Hermitian");
  if (std::abs(m.trace().real() - Real(1)) > Real(tol::unit_trace))
    throw std::invalid_argument("DensityMatrix: trace differs from 1");
  if (hermitian_eig(m, false).eigenvalues(0) < -Real(tol::psd_floor))
    throw std::invalid_argument("DensityMatrix: not positive semidefinite");
  return DensityMatrix(std::move(m), truncation_deficit);
}

/// rho = sum_i p_i |psi_i><psi_i| with each state renormalized first.
template <typename Real>
DensityMatrix<Real> density_from_ensemble(std::span<const FockVector<Real>> states,
                                          std::span<const Real> probs) {
  if (states.empty() || states.size() != probs.size())
    throw std::invalid_argument("density_from_ensemble: need one probability per state");
  const Eigen::Index dim = states.front().dim();
  Real total = 0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i].dim() != dim) throw std::invalid_argument("density_from_ensemble: dimension mismatch");
    if (!(probs[i] >= Real(0))) throw std::invalid_argument("density_from_ensemble: negative probability");
    total += probs[i];
  }
  if (std::abs(total - Real(1)) > Real(tol::prob_sum))
    throw std::invalid_argument("density_from_ensemble: probabilities do not sum to 1");

  // rho = Psi Psi^dagger with columns sqrt(p_i) psi_i / ||psi_i||.
  CMatrix<Real> psi(dim, static_cast<Eigen::Index>(states.size()));
  Real deficit = 0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto col = static_cast<Eigen::Index>(i);
    deficit = std::max(deficit, states[i].truncation_deficit());
    psi.col(col) = states[i].coeffs * (std::sqrt(probs[i]) / states[i].coeffs.norm());
  }
  CMatrix<Real> rho = psi * psi.adjoint();
  rho = (Real(0.5) * (rho + rho.adjoint())).eval();
  return DensityMatrix<Real>(std::move(rho), deficit);
}

template <typename Real>
DensityMatrix<Real> density_from_ensemble(const std::vector<FockVector<Real>>& states,
                                          const std::vector<Real>& probs) {
  return density_from_ensemble(std::span<const FockVector<Real>>(states), std::span<const Real>(probs));
}

/// G_ij = <a_i|a_j>.
template <typename Real>
CMatrix<Real> gram_matrix(std::span<const std::complex<Real>> amps) {
  const auto n = static_cast<Eigen::Index>(amps.size());
  CMatrix<Real> g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    g(i, i) = Real(1);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      g(i, j) = coherent_overlap(amps[i], amps[j]);
      g(j, i) = std::conj(g(i, j));
    }
  }
  return g;
}

/// Principal square root of a positive semidefinite Hermitian matrix. Small
/// negative eigenvalues from rounding are clamped to zero.
template <typename Derived>
CMatrix<typename Derived::RealScalar> psd_sqrt(const Eigen::MatrixBase<Derived>& m) {
  using Real = typename Derived::RealScalar;
  auto eig = hermitian_eig(m);
  const RVector<Real> root = eig.eigenvalues.cwiseMax(Real(0)).cwiseSqrt();
  return eig.eigenvectors * root.asDiagonal() * eig.eigenvectors.adjoint();
}

/// Tr|sum_i w_i |a_i><a_i|| computed inside the span of the coherent vectors.
///
/// With Psi the (infinite-dimensional) matrix of state columns, the operator is
/// Psi W Psi^dagger; its nonzero spectrum equals that of G^{1/2} W G^{1/2}
/// where G = Psi^dagger Psi is the Gram matrix. No number-basis truncation is
/// involved.
template <typename Real>
Real ensemble_trace_norm(std::span<const std::complex<Real>> amps, std::span<const Real> weights) {
  if (amps.size() != weights.size() || amps.empty())
    throw std::invalid_argument("ensemble_trace_norm: need one weight per state");
  const CMatrix<Real> root = psd_sqrt(gram_matrix(amps));
  RVector<Real> w(static_cast<Eigen::Index>(weights.size()));
  for (std::size_t i = 0; i < weights.size(); ++i) w(static_cast<Eigen::Index>(i)) = weights[i];
  const CMatrix<Real> b = root * w.asDiagonal() * root;
  return trace_norm(b);
}

}  // namespace yzero
