#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "kst/rng.hpp"

namespace kst {

struct Uniform01 {};

struct Normal {
  double mu = 0.0;
  double sigma = 1.0;
};

struct Exponential {
  double rate = 1.0;
};

/// Fully specified continuous reference distribution (the null F_0).
class ContinuousDist {
 public:
  using Family = std::variant<Uniform01, Normal, Exponential>;

  static ContinuousDist uniform01();
  static ContinuousDist normal(double mu, double sigma);
  static ContinuousDist exponential(double rate);

  /// Parses "uniform", "normal", "normal:MU,SIGMA", "exponential" or
  /// "exponential:RATE". Throws InvalidInput on anything else.
  static ContinuousDist parse(const std::string& text);

  const Family& family() const noexcept { return family_; }

  double cdf(double x) const;

  /// Inverse CDF on (0, 1).
  double quantile(double p) const;

  std::vector<double> sample(std::size_t count, SeededRng& rng) const;

  std::string describe() const;

 private:
  explicit ContinuousDist(Family family) : family_(family) {}

  Family family_;
};

double dist_cdf(const ContinuousDist& d, double x);
std::vector<double> dist_sample(const ContinuousDist& d, std::size_t count,
                                SeededRng& rng);

/// Standard normal CDF.
double normal_cdf(double z);

/// Standard normal quantile: rational initial guess refined by one Halley step.
double normal_quantile(double p);

}  // namespace kst
