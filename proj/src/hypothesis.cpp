#include "kst/hypothesis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kst/error.hpp"
#include "kst/kolmogorov.hpp"
#include "kst/parallel.hpp"
#include "kst/rng.hpp"

namespace kst {
namespace {

void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidInput("alpha must lie in (0, 1), got " + std::to_string(alpha));
  }
}

std::vector<double> sorted_copy(std::span<const double> sample, const char* what) {
  if (sample.empty()) throw EmptySample(std::string(what) + " is empty");
  std::vector<double> out(sample.begin(), sample.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!std::isfinite(out[i])) {
      throw InvalidData(std::string("non-finite value in ") + what + " at index " +
                            std::to_string(i),
                        i);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// sorted must be ascending; cdf maps each value to F_0(value).
template <class Cdf>
double one_sample_distance(std::span<const double> sorted, Cdf&& cdf) {
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    const double above = static_cast<double>(i + 1) / n - f;
    const double below = f - static_cast<double>(i) / n;
    d = std::max({d, above, below});
  }
  return d;
}

}  // namespace

KsResult finish_ks(double d_stat, double n_effective, double alpha) {
  require_alpha(alpha);
  KsResult r;
  r.d_stat = d_stat;
  r.n_effective = n_effective;
  r.t_stat = std::sqrt(n_effective) * d_stat;
  r.p_value = kolmogorov_sf(r.t_stat);
  r.critical_value = kolmogorov_quantile(1.0 - alpha);
  r.alpha = alpha;
  r.reject = r.t_stat > r.critical_value;
  return r;
}

BandInterval ConfidenceBand::at(const EmpiricalCdf& ecdf, double x) const {
  const double f = ecdf.eval(x);
  return {std::max(0.0, f - half_width), std::min(1.0, f + half_width)};
}

KsResult ks_one_sample(std::span<const double> sample, const ContinuousDist& f0,
                       double alpha) {
  require_alpha(alpha);
  const auto sorted = sorted_copy(sample, "sample");
  const double d = one_sample_distance(sorted, [&](double x) { return f0.cdf(x); });
  return finish_ks(d, static_cast<double>(sorted.size()), alpha);
}

KsResult ks_one_sample_uniform(std::span<const double> sample, double alpha) {
  require_alpha(alpha);
  for (std::size_t i = 0; i < sample.size(); ++i) {
    if (!(sample[i] >= 0.0 && sample[i] <= 1.0)) {
      throw InvalidInput("uniformity test value outside [0, 1] at index " +
                         std::to_string(i));
    }
  }
  const auto sorted = sorted_copy(sample, "sample");
  const double d = one_sample_distance(sorted, [](double u) { return u; });
  return finish_ks(d, static_cast<double>(sorted.size()), alpha);
}

KsResult ks_two_sample(std::span<const double> x, std::span<const double> y,
                       double alpha) {
  require_alpha(alpha);
  const auto xs = sorted_copy(x, "first sample");
  const auto ys = sorted_copy(y, "second sample");
  const double n = static_cast<double>(xs.size());
  const double m = static_cast<double>(ys.size());

  // Walk the pooled jump points; ties are consumed together so both ecdfs
  // are evaluated at the same right-continuous position.
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < xs.size() && j < ys.size()) {
    const double v = std::min(xs[i], ys[j]);
    while (i < xs.size() && xs[i] == v) ++i;
    while (j < ys.size() && ys[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  // Past this point one ecdf sits at 1 and the gap can only shrink.
  return finish_ks(d, n * m / (n + m), alpha);
}

TransformTestResult ks_transform_test(const EmpiricalCdf& reference,
                                      std::span<const double> comparison, double alpha,
                                      const TransformOptions& options) {
  require_alpha(alpha);
  TransformTestResult out;
  out.report = transform_sample(reference, comparison, options);
  out.result = ks_one_sample_uniform(out.report.transformed, alpha);
  out.result.n_effective = static_cast<double>(out.report.m);
  return out;
}

std::vector<TransformTestResult> ks_transform_batch(
    const EmpiricalCdf& reference, std::span<const std::vector<double>> windows,
    double alpha, const TransformOptions& options, unsigned threads) {
  require_alpha(alpha);
  std::optional<std::uint64_t> seed = options.seed;
  if (options.dither && !seed) seed = SeededRng::fresh_seed();

  std::vector<TransformTestResult> results(windows.size());
  const bool single = windows.size() == 1;
  parallel_for(windows.size(), single ? 1u : threads, [&](std::size_t w) {
    TransformOptions window_options = options;
    window_options.threads = single ? options.threads : 1;
    if (seed) window_options.seed = SeededRng::derive({*seed, w});
    results[w] = ks_transform_test(reference, windows[w], alpha, window_options);
  });
  return results;
}

ConfidenceBand ks_confidence_band(const EmpiricalCdf& ecdf, double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw InvalidInput("confidence level must lie in (0, 1)");
  }
  ConfidenceBand band;
  band.level = level;
  band.n = ecdf.size();
  band.half_width = kolmogorov_quantile(level) / std::sqrt(static_cast<double>(band.n));
  return band;
}

}  // namespace kst
