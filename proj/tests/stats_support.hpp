// Inverse-Gaussian sampling and the two-sample Kolmogorov-Smirnov test.

#ifndef FLEETCBM_TESTS_STATS_SUPPORT_HPP_
#define FLEETCBM_TESTS_STATS_SUPPORT_HPP_

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace fleetcbm::testing {

// Michael, Schucany and Haas transformation.
template <class Rng>
double sample_inverse_gaussian(double mean, double shape, Rng& rng) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif;
  const double nu = normal(rng);
  const double y = nu * nu;
  const double x = mean + mean * mean * y / (2 * shape) -
                   mean / (2 * shape) * std::sqrt(4 * mean * shape * y + mean * mean * y * y);
  return unif(rng) <= mean / (mean + x) ? x : mean * mean / x;
}

struct KsResult {
  double statistic = 0.0;
  double p_value = 0.0;
};

// Asymptotic two-sided p-value.
inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = double(a.size()), nb = double(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(double(i) / na - double(j) / nb));
  }
  const double en = std::sqrt(na * nb / (na + nb));
  const double lambda = (en + 0.12 + 0.11 / en) * d;
  if (lambda < 0.2) return {d, 1.0};
  double p = 0.0;
  for (int k = 1; k <= 100; ++k) {
    p += 2 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
  }
  return {d, std::clamp(p, 0.0, 1.0)};
}

}  // namespace fleetcbm::testing

#endif  // FLEETCBM_TESTS_STATS_SUPPORT_HPP_
