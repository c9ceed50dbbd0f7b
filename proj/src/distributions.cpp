#include "kst/distributions.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "kst/error.hpp"

namespace kst {
namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

void require_finite(double x) {
  if (!std::isfinite(x)) throw InvalidInput("distribution argument must be finite");
}

// Acklam's rational approximation to the normal quantile, |rel err| < 1.2e-9.
double acklam_quantile(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - p_low) {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

double parse_number(std::string_view text) {
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || !std::isfinite(value)) {
    throw InvalidInput("bad distribution parameter '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

double normal_cdf(double z) { return 0.5 * std::erfc(-z * std::numbers::sqrt2 / 2.0); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidInput("normal quantile needs p in (0, 1)");
  double x = acklam_quantile(p);
  // Halley refinement against the erfc-based CDF.
  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

ContinuousDist ContinuousDist::uniform01() { return ContinuousDist(Uniform01{}); }

ContinuousDist ContinuousDist::normal(double mu, double sigma) {
  if (!std::isfinite(mu) || !std::isfinite(sigma) || !(sigma > 0.0)) {
    throw InvalidInput("normal distribution needs finite mu and sigma > 0");
  }
  return ContinuousDist(Normal{mu, sigma});
}

ContinuousDist ContinuousDist::exponential(double rate) {
  if (!std::isfinite(rate) || !(rate > 0.0)) {
    throw InvalidInput("exponential distribution needs rate > 0");
  }
  return ContinuousDist(Exponential{rate});
}

ContinuousDist ContinuousDist::parse(const std::string& text) {
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  std::vector<double> params;
  if (colon != std::string::npos) {
    std::string_view rest(text);
    rest.remove_prefix(colon + 1);
    while (true) {
      const auto comma = rest.find(',');
      params.push_back(parse_number(rest.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
  }
  if ((name == "uniform" || name == "uniform01") && params.empty()) return uniform01();
  if (name == "normal" && params.empty()) return normal(0.0, 1.0);
  if (name == "normal" && params.size() == 2) return normal(params[0], params[1]);
  if (name == "exponential" && params.empty()) return exponential(1.0);
  if (name == "exponential" && params.size() == 1) return exponential(params[0]);
  throw InvalidInput("unknown distribution '" + text +
                     "' (expected uniform, normal[:MU,SIGMA] or exponential[:RATE])");
}

double ContinuousDist::cdf(double x) const {
  require_finite(x);
  return std::visit(
      Overloaded{
          [x](Uniform01) { return std::clamp(x, 0.0, 1.0); },
          [x](const Normal& n) { return normal_cdf((x - n.mu) / n.sigma); },
          [x](const Exponential& e) { return x > 0.0 ? -std::expm1(-e.rate * x) : 0.0; },
      },
      family_);
}

double ContinuousDist::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw InvalidInput("quantile needs p in (0, 1)");
  return std::visit(
      Overloaded{
          [p](Uniform01) { return p; },
          [p](const Normal& n) { return n.mu + n.sigma * normal_quantile(p); },
          [p](const Exponential& e) { return -std::log1p(-p) / e.rate; },
      },
      family_);
}

std::vector<double> ContinuousDist::sample(std::size_t count, SeededRng& rng) const {
  if (count < 1) throw InvalidInput("sample count must be at least 1");
  std::vector<double> out(count);
  for (auto& v : out) v = quantile(rng.uniform_open());
  return out;
}

std::string ContinuousDist::describe() const {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](Uniform01) { os << "uniform01"; },
                 [&](const Normal& n) { os << "normal(" << n.mu << "," << n.sigma << ")"; },
                 [&](const Exponential& e) { os << "exponential(" << e.rate << ")"; },
             },
             family_);
  return os.str();
}

double dist_cdf(const ContinuousDist& d, double x) { return d.cdf(x); }

std::vector<double> dist_sample(const ContinuousDist& d, std::size_t count,
                                SeededRng& rng) {
  return d.sample(count, rng);
}

}  // namespace kst
