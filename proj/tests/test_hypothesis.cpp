#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "kst/distributions.hpp"
#include "kst/ecdf.hpp"
#include "kst/error.hpp"
#include "kst/hypothesis.hpp"
#include "kst/kolmogorov.hpp"
#include "kst/rng.hpp"

using kst::ContinuousDist;
using kst::SeededRng;

namespace {

std::vector<double> vec(std::initializer_list<double> v) { return std::vector<double>(v); }

double count_le(const std::vector<double>& s, double x) {
  return static_cast<double>(std::count_if(s.begin(), s.end(), [x](double v) { return v <= x; }));
}

double count_lt(const std::vector<double>& s, double x) {
  return static_cast<double>(std::count_if(s.begin(), s.end(), [x](double v) { return v < x; }));
}

// sup_x |F_n(x) - F_0(x)| from the left and right limits at every jump.
double brute_one_sample(const std::vector<double>& s, const ContinuousDist& f0) {
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (double v : s) {
    const double f = f0.cdf(v);
    d = std::max({d, count_le(s, v) / n - f, f - count_lt(s, v) / n});
  }
  return d;
}

// max |F_n - G_m| over pooled points, midpoints and both ends.
double brute_two_sample(const std::vector<double>& x, const std::vector<double>& y) {
  std::set<double> pooled(x.begin(), x.end());
  pooled.insert(y.begin(), y.end());
  std::vector<double> grid(pooled.begin(), pooled.end());
  const std::size_t k = grid.size();
  for (std::size_t i = 0; i + 1 < k; ++i) grid.push_back(0.5 * (grid[i] + grid[i + 1]));
  grid.push_back(*pooled.begin() - 1.0);
  grid.push_back(*pooled.rbegin() + 1.0);
  const double n = static_cast<double>(x.size());
  const double m = static_cast<double>(y.size());
  double d = 0.0;
  for (double g : grid) d = std::max(d, std::abs(count_le(x, g) / n - count_le(y, g) / m));
  return d;
}

std::vector<double> coarse_sample(SeededRng& rng, std::size_t max_size, int levels) {
  std::vector<double> s(1 + rng.next_u64() % max_size);
  for (auto& v : s) v = static_cast<double>(rng.next_u64() % levels) / levels;
  return s;
}

}  // namespace

TEST_CASE("one-sample examples") {
  const auto r = kst::ks_one_sample(vec({0.25, 0.75}), ContinuousDist::uniform01());
  CHECK(r.d_stat == 0.25);
  CHECK(r.t_stat == doctest::Approx(std::sqrt(2.0) * 0.25));
  CHECK(r.n_effective == 2.0);

  const auto normal = ContinuousDist::normal(0, 1);
  std::vector<double> centred;
  for (int i = 1; i <= 10; ++i) centred.push_back(normal.quantile((i - 0.5) / 10.0));
  CHECK(kst::ks_one_sample(centred, normal).d_stat == doctest::Approx(0.05).epsilon(1e-12));

  const std::vector<double> stacked(10, 0.999);
  CHECK(kst::ks_one_sample(stacked, ContinuousDist::uniform01()).d_stat == 0.999);
}

TEST_CASE("uniform specialisation") {
  CHECK(kst::ks_one_sample_uniform(vec({0.5})).d_stat == 0.5);
  std::vector<double> tenths;
  for (int i = 1; i <= 10; ++i) tenths.push_back(i / 10.0);
  CHECK(kst::ks_one_sample_uniform(tenths).d_stat == doctest::Approx(0.1).epsilon(1e-12));
  CHECK_THROWS_AS(kst::ks_one_sample_uniform(vec({0.5, 1.5})), kst::InvalidInput);
  CHECK_THROWS_AS(kst::ks_one_sample_uniform(vec({-0.1})), kst::InvalidInput);
  CHECK_THROWS_AS(kst::ks_one_sample_uniform({}), kst::EmptySample);
}

TEST_CASE("one-sample statistic equals the brute-force supremum") {
  SeededRng rng(2718, 0);
  const auto uni = ContinuousDist::uniform01();
  const auto normal = ContinuousDist::normal(0.5, 0.3);
  for (int trial = 0; trial < 500; ++trial) {
    const auto s = coarse_sample(rng, 12, 1 + static_cast<int>(rng.next_u64() % 20));
    const auto& f0 = trial % 2 == 0 ? uni : normal;
    CAPTURE(trial);
    CHECK(kst::ks_one_sample(s, f0).d_stat == brute_one_sample(s, f0));
  }
}

TEST_CASE("two-sample examples") {
  CHECK(kst::ks_two_sample(vec({1, 2}), vec({1.5, 2.5, 3.5})).d_stat ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-15));

  const auto same = vec({0.3, -1.2, 4.0, 4.0, 2.2});
  const auto r = kst::ks_two_sample(same, same);
  CHECK(r.d_stat == 0.0);
  CHECK_FALSE(r.reject);

  CHECK(kst::ks_two_sample(vec({1, 2, 3}), vec({3.5, 9})).d_stat == 1.0);

  const auto sizes = kst::ks_two_sample(vec({1, 2, 3, 4}), vec({1, 2}));
  CHECK(sizes.n_effective == doctest::Approx(8.0 / 6.0));
}

TEST_CASE("two-sample statistic equals the grid enumeration") {
  SeededRng rng(1618, 0);
  for (int trial = 0; trial < 500; ++trial) {
    const int levels = 1 + static_cast<int>(rng.next_u64() % 15);
    const auto x = coarse_sample(rng, 10, levels);
    const auto y = coarse_sample(rng, 10, levels);
    CAPTURE(trial);
    CHECK(kst::ks_two_sample(x, y).d_stat == brute_two_sample(x, y));
  }
}

TEST_CASE("two-sample statistic is invariant under increasing maps") {
  SeededRng rng(4, 4);
  const auto normal = ContinuousDist::normal(0, 2);
  for (int trial = 0; trial < 100; ++trial) {
    auto x = normal.sample(1 + rng.next_u64() % 40, rng);
    auto y = normal.sample(1 + rng.next_u64() % 40, rng);
    const double before = kst::ks_two_sample(x, y).d_stat;
    for (auto& v : x) v = std::exp(v);
    for (auto& v : y) v = std::exp(v);
    CHECK(kst::ks_two_sample(x, y).d_stat == before);
  }
}

TEST_CASE("reject agrees with the p-value") {
  SeededRng rng(6, 6);
  const auto normal = ContinuousDist::normal(0, 1);
  for (int trial = 0; trial < 1000; ++trial) {
    const double alpha = 0.001 + 0.5 * rng.uniform();
    const auto x = normal.sample(1 + rng.next_u64() % 60, rng);
    const auto y = ContinuousDist::normal(rng.uniform(), 1).sample(1 + rng.next_u64() % 60, rng);
    for (const auto& r : {kst::ks_two_sample(x, y, alpha), kst::ks_one_sample(y, normal, alpha)}) {
      CHECK(r.d_stat >= 0.0);
      CHECK(r.d_stat <= 1.0);
      CHECK(r.t_stat == doctest::Approx(std::sqrt(r.n_effective) * r.d_stat));
      if (std::abs(r.p_value - alpha) > 1e-9) CHECK(r.reject == (r.p_value < alpha));
      CHECK(r.reject == (r.t_stat > kst::kolmogorov_quantile(1.0 - alpha)));
    }
  }
}

TEST_CASE("argument validation") {
  const auto s = vec({0.1, 0.2});
  CHECK_THROWS_AS(kst::ks_one_sample(s, ContinuousDist::uniform01(), 0.0), kst::InvalidInput);
  CHECK_THROWS_AS(kst::ks_one_sample(s, ContinuousDist::uniform01(), 1.0), kst::InvalidInput);
  CHECK_THROWS_AS(kst::ks_one_sample({}, ContinuousDist::uniform01()), kst::EmptySample);
  CHECK_THROWS_AS(kst::ks_two_sample(s, {}), kst::EmptySample);
  CHECK_THROWS_AS(kst::ks_two_sample({}, s), kst::EmptySample);
  CHECK_THROWS_AS(kst::ks_two_sample(s, vec({std::nan("")})), kst::InvalidData);
  CHECK_THROWS_AS(kst::ks_confidence_band(kst::build_ecdf(s), 1.0), kst::InvalidInput);
}

TEST_CASE("transform test composes transform and uniformity test") {
  SeededRng rng(12, 0);
  const auto normal = ContinuousDist::normal(0, 1);
  const auto ref = kst::build_ecdf(normal.sample(1000, rng));
  const auto cmp = normal.sample(50, rng);
  const auto out = kst::ks_transform_test(ref, cmp, 0.05);
  const auto direct = kst::ks_one_sample_uniform(kst::transform_sample(ref, cmp).transformed);
  CHECK(out.result.d_stat == direct.d_stat);
  CHECK(out.result.n_effective == 50.0);
  CHECK(out.result.p_value == direct.p_value);
  CHECK_FALSE(out.report.ratio_warning);

  const auto tight = kst::build_ecdf(normal.sample(100, rng));
  CHECK(kst::ks_transform_test(tight, normal.sample(100, rng)).report.ratio_warning);

  // Degenerate comparison sample is fine and far from uniform.
  const auto flat = kst::ks_transform_test(ref, std::vector<double>(40, 0.0));
  CHECK(flat.result.reject);
}

TEST_CASE("transform test calibration and power") {
  const auto normal = ContinuousDist::normal(0, 1);
  const auto shifted = ContinuousDist::normal(2, 1);
  int null_accepts = 0;
  int far_rejects = 0;
  for (std::uint64_t rep = 0; rep < 1000; ++rep) {
    SeededRng rng(555, rep);
    const auto ref = kst::build_ecdf(normal.sample(10000, rng));
    null_accepts += !kst::ks_transform_test(ref, normal.sample(200, rng)).result.reject;
    far_rejects += kst::ks_transform_test(ref, shifted.sample(200, rng)).result.reject;
  }
  CHECK(null_accepts >= 950);
  CHECK(far_rejects > 990);
}

TEST_CASE("transform p-values under the null are roughly uniform") {
  const auto normal = ContinuousDist::normal(0, 1);
  std::vector<double> p_values;
  for (std::uint64_t rep = 0; rep < 1000; ++rep) {
    SeededRng rng(8080, rep);
    const auto ref = kst::build_ecdf(normal.sample(50000, rng));
    p_values.push_back(kst::ks_transform_test(ref, normal.sample(1000, rng)).result.p_value);
  }
  CHECK_FALSE(kst::ks_one_sample_uniform(p_values, 0.01).reject);
}

TEST_CASE("batch windows match single tests and ignore thread count") {
  SeededRng rng(21, 0);
  const auto normal = ContinuousDist::normal(0, 1);
  const auto ref = kst::build_ecdf(normal.sample(5000, rng));
  std::vector<std::vector<double>> windows;
  for (int w = 0; w < 12; ++w) windows.push_back(ContinuousDist::normal(0.1 * w, 1).sample(100, rng));

  const auto plain = kst::ks_transform_batch(ref, windows, 0.05, {}, 4);
  for (std::size_t w = 0; w < windows.size(); ++w) {
    CHECK(plain[w].result.d_stat == kst::ks_transform_test(ref, windows[w]).result.d_stat);
  }

  kst::TransformOptions dither{true, 99, 1};
  const auto one = kst::ks_transform_batch(ref, windows, 0.05, dither, 1);
  const auto many = kst::ks_transform_batch(ref, windows, 0.05, dither, 8);
  for (std::size_t w = 0; w < windows.size(); ++w) {
    CHECK(one[w].report.transformed == many[w].report.transformed);
    CHECK(one[w].result.d_stat == many[w].result.d_stat);
  }
  CHECK(one[0].report.seed_used != one[1].report.seed_used);
}

TEST_CASE("confidence band width") {
  SeededRng rng(3, 0);
  const auto uni = ContinuousDist::uniform01();
  const auto band = kst::ks_confidence_band(kst::build_ecdf(uni.sample(100, rng)), 0.95);
  CHECK(band.n == 100);
  CHECK(band.half_width == doctest::Approx(kst::kolmogorov_quantile(0.95) / 10.0));
  CHECK(band.half_width == doctest::Approx(0.13581).epsilon(1e-4));
  const auto wider = kst::ks_confidence_band(kst::build_ecdf(uni.sample(400, rng)), 0.95);
  CHECK(wider.half_width == doctest::Approx(band.half_width / 2.0).epsilon(1e-12));

  const auto e = kst::build_ecdf(vec({1, 2, 3, 4}));
  const auto b = kst::ks_confidence_band(e, 0.5);
  const auto low = b.at(e, 0.0);
  CHECK(low.lower == 0.0);
  CHECK(low.upper == doctest::Approx(b.half_width));
  const auto high = b.at(e, 10.0);
  CHECK(high.upper == 1.0);
  CHECK(high.lower == doctest::Approx(1.0 - b.half_width));
}

TEST_CASE("confidence band covers the true cdf") {
  const auto normal = ContinuousDist::normal(0, 1);
  int covered = 0;
  for (std::uint64_t rep = 0; rep < 100; ++rep) {
    SeededRng rng(4242, rep);
    const auto e = kst::build_ecdf(normal.sample(1000, rng));
    const auto band = kst::ks_confidence_band(e, 0.95);
    bool all = true;
    for (int g = 0; g < 100; ++g) {
      const double x = -3.0 + 6.0 * g / 99.0;
      const auto iv = band.at(e, x);
      const double f = normal.cdf(x);
      all = all && iv.lower <= f && f <= iv.upper;
    }
    covered += all;
  }
  CHECK(covered >= 93);
}

TEST_CASE("two-sample power grows with sample size") {
  constexpr std::size_t kReps = 2000;
  const auto null = ContinuousDist::normal(0, 1);
  const auto alt = ContinuousDist::normal(0.5, 1);
  std::vector<double> rates;
  for (std::size_t n : {50, 200, 800}) {
    std::size_t rejects = 0;
    for (std::size_t rep = 0; rep < kReps; ++rep) {
      SeededRng rng(10, SeededRng::derive({n, rep}));
      rejects += kst::ks_two_sample(null.sample(n, rng), alt.sample(n, rng)).reject;
    }
    rates.push_back(static_cast<double>(rejects) / kReps);
  }
  for (std::size_t i = 0; i + 1 < rates.size(); ++i) {
    const double se = std::hypot(std::sqrt(rates[i] * (1 - rates[i]) / kReps),
                                 std::sqrt(rates[i + 1] * (1 - rates[i + 1]) / kReps));
    CAPTURE(i);
    CHECK(rates[i + 1] - rates[i] > 2.0 * se);
  }
}
