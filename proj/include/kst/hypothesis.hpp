#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "kst/distributions.hpp"
#include "kst/ecdf.hpp"

namespace kst {

inline constexpr double kDefaultAlpha = 0.05;

/// Outcome of an asymptotic Kolmogorov-Smirnov test.
struct KsResult {
  double d_stat = 0.0;          ///< sup distance, in [0, 1]
  double t_stat = 0.0;          ///< sqrt(n_effective) * d_stat
  double p_value = 1.0;         ///< Kolmogorov survival function at t_stat
  double critical_value = 0.0;  ///< k_{1-alpha}
  double n_effective = 0.0;     ///< sample size governing the asymptotics
  double alpha = kDefaultAlpha;
  bool reject = false;          ///< t_stat > k_{1-alpha}
};

struct BandInterval {
  double lower = 0.0;
  double upper = 1.0;
};

/// Simultaneous KS confidence band of constant half-width around an ecdf.
struct ConfidenceBand {
  double level = 0.95;
  double half_width = 0.0;
  std::size_t n = 0;

  /// [F_n(x) - h, F_n(x) + h] clipped to [0, 1].
  BandInterval at(const EmpiricalCdf& ecdf, double x) const;
};

struct TransformTestResult {
  KsResult result;
  TransformReport report;
};

/// Applies the asymptotic rejection rule to a sup distance.
KsResult finish_ks(double d_stat, double n_effective, double alpha);

/// Exact sup |F_n - F_0|, attained at the order statistics.
KsResult ks_one_sample(std::span<const double> sample, const ContinuousDist& f0,
                       double alpha = kDefaultAlpha);

/// One-sample test against U(0,1); every value must already lie in [0, 1].
KsResult ks_one_sample_uniform(std::span<const double> sample,
                               double alpha = kDefaultAlpha);

/// Classic two-sample test with n_effective = n m / (n + m).
KsResult ks_two_sample(std::span<const double> x, std::span<const double> y,
                       double alpha = kDefaultAlpha);

/// Two-sample problem reduced to a uniformity test of the comparison sample
/// pushed through the reference ecdf. n_effective is the comparison size m.
TransformTestResult ks_transform_test(const EmpiricalCdf& reference,
                                      std::span<const double> comparison,
                                      double alpha = kDefaultAlpha,
                                      const TransformOptions& options = {});

// Tests many comparison windows against one shared reference. Window w is
// dithered with seed derive({seed, w}), so results do not depend on `threads`.
// `options.threads` is used inside each window transform only when there is
// a single window.
std::vector<TransformTestResult> ks_transform_batch(
    const EmpiricalCdf& reference, std::span<const std::vector<double>> windows,
    double alpha, const TransformOptions& options, unsigned threads);

ConfidenceBand ks_confidence_band(const EmpiricalCdf& ecdf, double level = 0.95);

}  // namespace kst
