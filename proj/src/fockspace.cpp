#include "yzero/fockspace.hpp"

namespace yzero {

Eigen::Index truncation_dim(double max_energy, double tol) {
  if (!(tol > 0.0 && tol < 1.0)) throw std::invalid_argument("truncation_dim: tol must lie in (0, 1)");
  if (!(max_energy >= 0.0) || !std::isfinite(max_energy))
    throw std::invalid_argument("truncation_dim: max_energy must be finite and >= 0");
  if (max_energy == 0.0) return 1;

  // Poisson pmf up to far past the bulk, then tails by backward accumulation
  // so small tails are not lost to cancellation against 1.
  const auto hi = static_cast<std::size_t>(std::ceil(max_energy + 40.0 * std::sqrt(max_energy) + 100.0));
  const double log_s = std::log(max_energy);
  std::vector<double> pmf(hi + 1);
  for (std::size_t n = 0; n <= hi; ++n) {
    const double nn = static_cast<double>(n);
    pmf[n] = std::exp(-max_energy + nn * log_s - std::lgamma(nn + 1.0));
  }
  std::vector<double> tail(hi + 1, 0.0);  // tail[n] = sum_{m > n} pmf[m]
  for (std::size_t n = hi; n-- > 0;) tail[n] = tail[n + 1] + pmf[n + 1];
  for (std::size_t n = 0; n <= hi; ++n)
    if (tail[n] < tol) return static_cast<Eigen::Index>(n + 1);
  return static_cast<Eigen::Index>(hi + 1);
}

}  // namespace yzero
