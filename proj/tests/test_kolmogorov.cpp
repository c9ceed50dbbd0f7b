#include <doctest.h>

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <cmath>
#include <limits>

#include "kst/error.hpp"
#include "kst/kolmogorov.hpp"

using kst::KolmogorovDist;

namespace {

using Big = boost::multiprecision::cpp_dec_float_50;

// 50-digit evaluation of 1 - 2 sum (-1)^(j-1) exp(-2 j^2 t^2).
double series_oracle(double t, int terms = 100) {
  const Big tt(t);
  Big sum = 0;
  for (int j = 1; j <= terms; ++j) {
    const Big term = exp(Big(-2) * j * j * tt * tt);
    sum += (j % 2 == 1) ? term : Big(-term);
  }
  return static_cast<double>(Big(1) - 2 * sum);
}

}  // namespace

TEST_CASE("cdf is zero on the non-positive axis") {
  CHECK(kst::kolmogorov_cdf(-1.0) == 0.0);
  CHECK(kst::kolmogorov_cdf(0.0) == 0.0);
  CHECK(kst::kolmogorov_sf(0.0) == 1.0);
  CHECK(kst::kolmogorov_sf(-3.0) == 1.0);
}

TEST_CASE("cdf matches the extended-precision series") {
  for (double t : {0.3, 0.5, 0.8, 1.0, 1.3581, 2.0, 3.0}) {
    CAPTURE(t);
    CHECK(std::abs(kst::kolmogorov_cdf(t) - series_oracle(t)) < 1e-12);
  }
  CHECK(kst::kolmogorov_cdf(0.5) == doctest::Approx(0.0361).epsilon(1e-3));
  CHECK(kst::kolmogorov_cdf(1.3581) == doctest::Approx(0.95).epsilon(1e-5));
  CHECK(kst::kolmogorov_sf(0.5) == doctest::Approx(0.9639).epsilon(1e-4));
}

TEST_CASE("negligible region below the cutoff") {
  // The shortcut returns 0; the true value there is below 3e-22.
  CHECK(series_oracle(KolmogorovDist::kNegligibleBelow, 400) < 3e-22);
  CHECK(kst::kolmogorov_cdf(0.1) == 0.0);
  CHECK(kst::kolmogorov_cdf(0.2) == doctest::Approx(series_oracle(0.2)).epsilon(1e-2));
}

TEST_CASE("far upper tail keeps relative precision") {
  const double sf = kst::kolmogorov_sf(10.0);
  CHECK(sf > 0.0);
  CHECK(sf < 1e-80);
  CHECK(sf == doctest::Approx(2.0 * std::exp(-200.0)).epsilon(1e-12));
}

TEST_CASE("quantiles") {
  CHECK(kst::kolmogorov_quantile(0.95) == doctest::Approx(1.3581).epsilon(1e-4));
  CHECK(kst::kolmogorov_quantile(0.99) == doctest::Approx(1.6276).epsilon(1e-4));
  CHECK(std::abs(kst::kolmogorov_cdf(kst::kolmogorov_quantile(0.5)) - 0.5) < 1e-9);

  double previous = 0.0;
  for (int i = 1; i <= 99; ++i) {
    const double p = i / 100.0;
    const double q = kst::kolmogorov_quantile(p);
    CAPTURE(p);
    CHECK(std::abs(kst::kolmogorov_cdf(q) - p) < 1e-8);
    CHECK(q > previous);
    previous = q;
  }
}

TEST_CASE("monotone and complementary on a fine grid") {
  double previous = 0.0;
  for (int i = 0; i <= 10000; ++i) {
    const double t = 5.0 * i / 10000.0;
    const double c = kst::kolmogorov_cdf(t);
    CHECK(c >= previous - 1e-12);
    CHECK(c >= 0.0);
    CHECK(c <= 1.0);
    const double total = c + kst::kolmogorov_sf(t);
    CHECK(total >= 1.0 - 1e-12);
    CHECK(total <= 1.0 + 1e-12);
    previous = c;
  }
}

TEST_CASE("ten extra series terms change nothing") {
  const KolmogorovDist dist;
  for (double t = 0.05; t <= 5.0; t += 0.01) {
    const int used = dist.terms_used(t);
    const double base = KolmogorovDist::alternating_sum(t, used);
    const double more = KolmogorovDist::alternating_sum(t, used + 10);
    CAPTURE(t);
    CHECK(std::abs(base - more) < 1e-10);
  }
}

TEST_CASE("configurable truncation") {
  const KolmogorovDist coarse(1e-3, 100);
  const KolmogorovDist capped(1e-12, 1);
  CHECK(coarse.terms_used(1.0) < KolmogorovDist{}.terms_used(1.0));
  CHECK(capped.terms_used(0.5) == 1);
  CHECK(capped.sf(1.0) == doctest::Approx(2.0 * std::exp(-2.0)));
  CHECK_THROWS_AS(KolmogorovDist(0.0, 10), kst::InvalidInput);
  CHECK_THROWS_AS(KolmogorovDist(1e-12, 0), kst::InvalidInput);
}

TEST_CASE("invalid arguments") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(kst::kolmogorov_cdf(nan), kst::InvalidInput);
  CHECK_THROWS_AS(kst::kolmogorov_sf(inf), kst::InvalidInput);
  CHECK_THROWS_AS(kst::kolmogorov_quantile(0.0), kst::InvalidInput);
  CHECK_THROWS_AS(kst::kolmogorov_quantile(1.0), kst::InvalidInput);
  CHECK_THROWS_AS(kst::kolmogorov_quantile(nan), kst::InvalidInput);
}
