#include "kst/kolmogorov.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kst/error.hpp"

namespace kst {
namespace {

constexpr double kQuantileLow = 1e-6;
constexpr double kQuantileHigh = 10.0;
constexpr double kQuantileBracket = 1e-10;

void require_finite(double t) {
  if (!std::isfinite(t)) {
    throw InvalidInput("Kolmogorov distribution argument must be finite");
  }
}

}  // namespace

KolmogorovDist::KolmogorovDist(double tolerance, int max_terms)
    : tolerance_(tolerance), max_terms_(max_terms) {
  if (!(tolerance > 0.0) || !std::isfinite(tolerance)) {
    throw InvalidInput("series tolerance must be positive");
  }
  if (max_terms < 1) {
    throw InvalidInput("series needs at least one term");
  }
}

int KolmogorovDist::terms_used(double t) const {
  const double two_t2 = 2.0 * t * t;
  int j = 1;
  for (; j <= max_terms_; ++j) {
    const double term = std::exp(-two_t2 * j * j);
    if (term < tolerance_) break;
  }
  return std::min(j, max_terms_);
}

double KolmogorovDist::alternating_sum(double t, int terms) {
  const double two_t2 = 2.0 * t * t;
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= terms; ++j) {
    sum += sign * std::exp(-two_t2 * j * j);
    sign = -sign;
  }
  return 2.0 * sum;
}

double KolmogorovDist::tail_series(double t) const {
  return alternating_sum(t, terms_used(t));
}

double KolmogorovDist::cdf(double t) const {
  require_finite(t);
  if (t < kNegligibleBelow) return 0.0;
  return std::clamp(1.0 - tail_series(t), 0.0, 1.0);
}

double KolmogorovDist::sf(double t) const {
  require_finite(t);
  if (t < kNegligibleBelow) return 1.0;
  return std::clamp(tail_series(t), 0.0, 1.0);
}

double KolmogorovDist::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) {
    throw InvalidInput("Kolmogorov quantile needs p in (0, 1), got " +
                       std::to_string(p));
  }
  double lo = kQuantileLow;
  double hi = kQuantileHigh;
  while (hi - lo > kQuantileBracket) {
    const double mid = 0.5 * (lo + hi);
    if (cdf(mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double kolmogorov_cdf(double t) { return KolmogorovDist{}.cdf(t); }
double kolmogorov_sf(double t) { return KolmogorovDist{}.sf(t); }
double kolmogorov_quantile(double p) { return KolmogorovDist{}.quantile(p); }

}  // namespace kst
