#pragma once

namespace kst {

// Limiting distribution of sqrt(n) * sup|F_n - F| under the null:
//
//   K(t) = 1 - 2 * sum_{j>=1} (-1)^(j-1) exp(-2 j^2 t^2),  t > 0
//
// Evaluated by direct summation of the alternating series. Below t = 0.15 the
// CDF is smaller than 3e-23 and is returned as exactly 0.
class KolmogorovDist {
 public:
  static constexpr double kDefaultTolerance = 1e-12;
  static constexpr int kDefaultMaxTerms = 100;
  static constexpr double kNegligibleBelow = 0.15;

  explicit KolmogorovDist(double tolerance = kDefaultTolerance,
                          int max_terms = kDefaultMaxTerms);

  double cdf(double t) const;

  /// 1 - cdf(t), summed directly so upper-tail p-values keep their precision.
  double sf(double t) const;

  /// Bisection on [1e-6, 10] down to a bracket width of 1e-10.
  double quantile(double p) const;

  /// Number of series terms summed at t before the stopping rule fires.
  int terms_used(double t) const;

  /// 2 * sum_{j=1}^{terms} (-1)^(j-1) exp(-2 j^2 t^2), no truncation rule.
  static double alternating_sum(double t, int terms);

  double tolerance() const noexcept { return tolerance_; }
  int max_terms() const noexcept { return max_terms_; }

 private:
  double tail_series(double t) const;

  double tolerance_;
  int max_terms_;
};

double kolmogorov_cdf(double t);
double kolmogorov_sf(double t);
double kolmogorov_quantile(double p);

}  // namespace kst
