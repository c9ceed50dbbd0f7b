#include "kst/simulation.hpp"

#include <cmath>
#include <numeric>
#include <ostream>
#include <string>
#include <variant>

#include "kst/ecdf.hpp"
#include "kst/error.hpp"
#include "kst/hypothesis.hpp"
#include "kst/parallel.hpp"
#include "kst/rng.hpp"

namespace kst {
namespace {

constexpr std::uint64_t kSharedReferenceTrial = ~std::uint64_t{0};

bool run_trial(const SimulationConfig& config, Method method,
               const ContinuousDist& alternative, const std::vector<double>* shared,
               SeededRng& rng) {
  std::vector<double> reference;
  if (shared == nullptr) reference = config.null_family.sample(config.n_reference, rng);
  const std::vector<double>& x = shared != nullptr ? *shared : reference;
  const auto y = alternative.sample(config.m_comparison, rng);

  if (method == Method::two_sample) {
    return ks_two_sample(x, y, config.alpha).reject;
  }
  TransformOptions options;
  options.dither = config.dither;
  if (config.dither) options.seed = rng.next_u64();
  return ks_transform_test(build_ecdf(x), y, config.alpha, options).result.reject;
}

}  // namespace

std::string_view method_name(Method method) {
  return method == Method::two_sample ? "two_sample" : "transform";
}

Method parse_method(std::string_view name) {
  if (name == "two_sample") return Method::two_sample;
  if (name == "transform") return Method::transform;
  throw InvalidInput("unknown method '" + std::string(name) +
                     "' (expected two_sample or transform)");
}

std::vector<double> default_mu_grid() {
  std::vector<double> grid(41);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid[i] = (static_cast<double>(i) - 20.0) / 20.0;
  }
  return grid;
}

std::vector<double> default_rate_grid() {
  std::vector<double> grid(21);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid[i] = std::exp2((static_cast<double>(i) - 10.0) / 10.0);
  }
  return grid;
}

double mc_stderr(double rate, std::size_t replications) {
  return std::sqrt(rate * (1.0 - rate) / static_cast<double>(replications));
}

void SimulationConfig::validate() const {
  if (n_reference < 1) throw InvalidInput("reference size n must be at least 1");
  if (m_comparison < 1) throw InvalidInput("comparison size m must be at least 1");
  if (replications < kMinReplications) {
    throw InvalidInput("replications must be at least " +
                       std::to_string(kMinReplications) + ", got " +
                       std::to_string(replications));
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("alpha must lie in (0, 1)");
  if (mu_grid.empty()) throw InvalidInput("alternative grid is empty");
  if (methods.empty()) throw InvalidInput("no test methods selected");
  if (std::holds_alternative<Uniform01>(null_family.family())) {
    throw InvalidInput("power simulation needs a normal or exponential null");
  }
  for (double g : mu_grid) {
    if (!std::isfinite(g)) throw InvalidInput("alternative grid value is not finite");
    (void)alternative(g);
  }
}

ContinuousDist SimulationConfig::alternative(double grid_value) const {
  if (const auto* normal = std::get_if<Normal>(&null_family.family())) {
    return ContinuousDist::normal(normal->mu + grid_value, normal->sigma);
  }
  if (const auto* expo = std::get_if<Exponential>(&null_family.family())) {
    if (!(grid_value > 0.0)) {
      throw InvalidInput("exponential rate multiplier must be positive, got " +
                         format_double(grid_value));
    }
    return ContinuousDist::exponential(expo->rate * grid_value);
  }
  throw InvalidInput("power simulation needs a normal or exponential null");
}

std::vector<PowerCurve> estimate_power(const SimulationConfig& config, unsigned threads) {
  config.validate();

  std::vector<PowerCurve> curves;
  for (Method method : config.methods) {
    const auto method_index = static_cast<std::uint64_t>(method);
    PowerCurve curve{method, {}, config};
    for (std::size_t g = 0; g < config.mu_grid.size(); ++g) {
      const ContinuousDist alternative = config.alternative(config.mu_grid[g]);

      std::vector<double> shared;
      if (config.shared_reference) {
        SeededRng rng(config.master_seed,
                      SeededRng::derive({method_index, g, kSharedReferenceTrial}));
        shared = config.null_family.sample(config.n_reference, rng);
      }

      std::vector<unsigned char> rejected(config.replications, 0);
      parallel_for(config.replications, threads, [&](std::size_t t) {
        SeededRng rng(config.master_seed, SeededRng::derive({method_index, g, t}));
        rejected[t] = run_trial(config, method, alternative,
                                config.shared_reference ? &shared : nullptr, rng);
      });

      PowerPoint point;
      point.mu = config.mu_grid[g];
      point.rejections = std::accumulate(rejected.begin(), rejected.end(), std::size_t{0});
      point.rejection_rate = static_cast<double>(point.rejections) /
                             static_cast<double>(config.replications);
      point.mc_stderr = mc_stderr(point.rejection_rate, config.replications);
      curve.points.push_back(point);
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

std::vector<PowerCurve> exponential_variant(const SimulationConfig& config,
                                            unsigned threads) {
  if (!std::holds_alternative<Exponential>(config.null_family.family())) {
    throw InvalidInput("exponential variant needs an exponential null family");
  }
  return estimate_power(config, threads);
}

std::vector<GapPoint> power_gap(const PowerCurve& a, const PowerCurve& b) {
  if (a.points.size() != b.points.size()) {
    throw InvalidInput("power curves have different grid sizes");
  }
  std::vector<GapPoint> gaps;
  gaps.reserve(a.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    const auto& pa = a.points[i];
    const auto& pb = b.points[i];
    if (pa.mu != pb.mu) throw InvalidInput("power curves have different grids");
    gaps.push_back({pa.mu, pa.rejection_rate - pb.rejection_rate,
                    std::hypot(pa.mc_stderr, pb.mc_stderr)});
  }
  return gaps;
}

void write_power_csv(std::ostream& out, std::span<const PowerCurve> curves) {
  out << "method,mu,rejection_rate,mc_stderr,n,m,replications,alpha,seed\n";
  for (const auto& curve : curves) {
    const auto& c = curve.config;
    for (const auto& p : curve.points) {
      out << method_name(curve.method) << ',' << format_double(p.mu) << ','
          << format_double(p.rejection_rate) << ',' << format_double(p.mc_stderr) << ','
          << c.n_reference << ',' << c.m_comparison << ',' << c.replications << ','
          << format_double(c.alpha) << ',' << c.master_seed << '\n';
    }
  }
}

}  // namespace kst
