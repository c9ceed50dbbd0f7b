#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kst/distributions.hpp"

namespace kst {

enum class Method { two_sample = 0, transform = 1 };

std::string_view method_name(Method method);
Method parse_method(std::string_view name);

/// 41 equally spaced points on [-1, 1].
std::vector<double> default_mu_grid();

/// 21 rate multipliers 2^(k/10), k = -10..10, for the exponential null.
std::vector<double> default_rate_grid();

inline constexpr std::size_t kMinReplications = 100;

// Monte-Carlo power study. Each grid value parameterises the comparison
// distribution: a mean shift added to a normal null, or a rate multiplier
// applied to an exponential null.
struct SimulationConfig {
  std::size_t n_reference = 2000;
  std::size_t m_comparison = 200;
  std::size_t replications = 10000;
  double alpha = 0.05;
  std::vector<double> mu_grid = default_mu_grid();
  ContinuousDist null_family = ContinuousDist::normal(0.0, 1.0);
  std::vector<Method> methods = {Method::two_sample, Method::transform};
  std::uint64_t master_seed = 0;
  bool dither = false;
  /// Draw one reference sample per (method, grid point) instead of per trial.
  bool shared_reference = false;

  /// Throws InvalidInput describing the first violated constraint.
  void validate() const;

  ContinuousDist alternative(double grid_value) const;
};

struct PowerPoint {
  double mu = 0.0;
  double rejection_rate = 0.0;
  double mc_stderr = 0.0;
  std::size_t rejections = 0;
};

struct PowerCurve {
  Method method = Method::two_sample;
  std::vector<PowerPoint> points;
  SimulationConfig config;
};

struct GapPoint {
  double mu = 0.0;
  double gap = 0.0;           ///< rate(a) - rate(b)
  double joint_stderr = 0.0;  ///< sqrt(se_a^2 + se_b^2)
};

/// Rejection frequency per method and grid point. Deterministic in
/// config.master_seed for any thread count: trial t of grid point g under
/// method k draws from stream derive({k, g, t}).
std::vector<PowerCurve> estimate_power(const SimulationConfig& config,
                                       unsigned threads = 1);

/// estimate_power for an exponential null; grid values are rate multipliers.
std::vector<PowerCurve> exponential_variant(const SimulationConfig& config,
                                            unsigned threads = 1);

std::vector<GapPoint> power_gap(const PowerCurve& a, const PowerCurve& b);

/// One row per grid point:
/// method,mu,rejection_rate,mc_stderr,n,m,replications,alpha,seed
void write_power_csv(std::ostream& out, std::span<const PowerCurve> curves);

double mc_stderr(double rate, std::size_t replications);

}  // namespace kst
