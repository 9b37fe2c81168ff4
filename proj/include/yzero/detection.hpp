#pragma once

// Minimum-error detection bounds for the keyed PSK signal sets and Monte Carlo
// stand-ins for physical receivers.

#include "yzero/codec.hpp"
#include "yzero/fockspace.hpp"
#include "yzero/random.hpp"

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace yzero {

enum class BoundMethod { helstrom_pure, helstrom_mixed };
std::string to_string(BoundMethod m);

/// Which representation a mixed-state bound is evaluated in. `automatic`
/// takes the Gram (coherent-span) route when 2M is smaller than the number
/// basis would need to be, and the number basis otherwise.
enum class EvalPath { automatic, fock, gram };
std::string to_string(EvalPath p);

struct BinaryBound {
  double p_error = 0.5;
  BoundMethod method = BoundMethod::helstrom_pure;
  double p0 = 0.5;
  double p1 = 0.5;
  Eigen::Index dim_used = 0;
  double truncation_deficit = 0.0;
  EvalPath path = EvalPath::automatic;
};

struct MaryBound {
  double p_error = 0.0;
  int states = 0;  // 2M
};

BinaryBound helstrom_pure(Amplitude a0, Amplitude a1, double p0);

/// P_e = (1 - ||p1 rho1 - p0 rho0||_1) / 2.
BinaryBound helstrom_mixed(const DensityMatrix<double>& rho0, const DensityMatrix<double>& rho1, double p0);

/// Helstrom bound between two mixtures of the constellation states, given as
/// per-index weights (each summing to 1).
BinaryBound helstrom_constellation(const Constellation& c, const std::vector<double>& w0,
                                   const std::vector<double>& w1, double p0,
                                   EvalPath path = EvalPath::automatic, double trunc_tol = tol::truncation);

/// Eve's ciphertext-only bit error bound from rho_0 vs rho_1.
BinaryBound bit_bound(const Constellation& c, double p0 = 0.5, EvalPath path = EvalPath::automatic,
                      double trunc_tol = tol::truncation);

/// Up/down half-plane discrimination with equal priors. Rejects OSK.
BinaryBound updown_bound(const Constellation& c, EvalPath path = EvalPath::automatic,
                         double trunc_tol = tol::truncation);

/// Eigenvalues of the circulant Gram matrix of the 2M states,
/// lambda_m = sum_k <a_0|a_k> exp(-2 pi i m k / 2M).
RVector<double> constellation_gram_eigenvalues(const Constellation& c);

/// Square root of the circulant Gram matrix, assembled from its spectrum.
MatrixXcd constellation_gram_sqrt(const Constellation& c);

/// Minimum error for discriminating all 2M states with uniform priors, via
/// the square-root measurement (optimal for this symmetric set).
MaryBound srm_mary_error(const Constellation& c);

// --- receivers ---------------------------------------------------------------

enum class ReceiverKind { homodyne, heterodyne };

struct ReceiverModel {
  ReceiverKind kind = ReceiverKind::homodyne;
  double axis = 0.0;
  std::uint64_t noise_seed = 0;
};

inline constexpr double kHomodyneSd = 0.5;       // vacuum quadrature variance 1/4
inline constexpr double kHeterodyneVar = 0.5;    // per quadrature

/// Quadrature along `axis`: N(|a| cos(arg a - axis), 1/4).
double homodyne_sample(Amplitude a, double axis, Rng& rng);
/// Both quadratures at once: a + complex Gaussian with variance 1/2 per part.
std::complex<double> heterodyne_sample(Amplitude a, Rng& rng);

double normal_cdf(double x);
double binary_entropy(double p);

/// Threshold homodyne error for antipodal states of energy S: Phi(-2 sqrt S).
double homodyne_antipodal_error(double energy);

/// Counts threshold-decision errors over `trials` antipodal homodyne shots.
/// Work is split into fixed blocks with their own streams.
std::uint64_t homodyne_antipodal_errors(double energy, std::uint64_t trials, std::uint64_t seed,
                                        int threads = 1);

/// Probability density of arg(y) for heterodyne output y with mean sqrt(S)
/// on the positive real axis.
double heterodyne_phase_density(double phi, double energy);

/// q[d] = P(nearest-of-2M decision is j + d | j sent).
std::vector<double> heterodyne_confusion(const Constellation& c);

/// Monte Carlo nearest-of-2M error rate with heterodyne detection.
double heterodyne_nearest_error(const Constellation& c, std::uint64_t trials, std::uint64_t seed);

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Unweighted least squares of ln(p_error) against S. Needs at least four
/// points, each with p_error in (0, 0.5).
ExponentFit exponent_fit(std::span<const std::pair<double, double>> points);

}  // namespace yzero
