#include "kst/ecdf.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <istream>
#include <ostream>
#include <queue>
#include <string_view>
#include <utility>

#include "kst/error.hpp"
#include "kst/parallel.hpp"
#include "kst/rng.hpp"

namespace kst {
namespace {

// Finite check; also folds -0.0 into +0.0 so that sorted order and the
// persisted text do not depend on which zero arrived first.
void validate_values(std::span<double> values, std::size_t offset = 0) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw InvalidData("non-finite value at index " + std::to_string(offset + i),
                        offset + i);
    }
    values[i] += 0.0;
  }
}

std::size_t parse_count(std::string_view text) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ParseError("bad ecdf header count '" + std::string(text) + "'", 1);
  }
  return value;
}

}  // namespace

EmpiricalCdf EmpiricalCdf::from_unsorted(std::span<const double> data) {
  if (data.empty()) throw EmptySample("cannot build an ecdf from an empty sample");
  std::vector<double> values(data.begin(), data.end());
  validate_values(values);
  std::sort(values.begin(), values.end());
  return EmpiricalCdf(std::move(values));
}

EmpiricalCdf EmpiricalCdf::from_sorted(std::vector<double> sorted) {
  if (sorted.empty()) throw EmptySample("cannot build an ecdf from an empty sample");
  validate_values(sorted);
  if (!std::is_sorted(sorted.begin(), sorted.end())) {
    const auto it = std::is_sorted_until(sorted.begin(), sorted.end());
    const auto index = static_cast<std::size_t>(it - sorted.begin());
    throw InvalidData("values not sorted at index " + std::to_string(index), index);
  }
  return EmpiricalCdf(std::move(sorted));
}

std::size_t EmpiricalCdf::count_at_most(double x) const {
  return static_cast<std::size_t>(
      std::upper_bound(values_.begin(), values_.end(), x) - values_.begin());
}

double EmpiricalCdf::eval(double x) const {
  if (!std::isfinite(x)) throw InvalidInput("ecdf evaluation point must be finite");
  return static_cast<double>(count_at_most(x)) / static_cast<double>(values_.size());
}

EcdfPartition EcdfPartition::sorted_from(std::vector<double> data, std::string provenance) {
  validate_values(data);
  std::sort(data.begin(), data.end());
  return EcdfPartition{std::move(data), std::move(provenance)};
}

EmpiricalCdf build_ecdf(std::span<const double> data) {
  return EmpiricalCdf::from_unsorted(data);
}

double ecdf_eval(const EmpiricalCdf& ecdf, double x) { return ecdf.eval(x); }

EmpiricalCdf merge_partitions(std::span<const EcdfPartition> parts) {
  std::size_t total = 0;
  for (const auto& part : parts) total += part.count();
  if (total == 0) throw EmptySample("all partitions are empty");

  // (head value, partition index); min-heap on value.
  using Head = std::pair<double, std::size_t>;
  std::priority_queue<Head, std::vector<Head>, std::greater<>> heads;
  std::vector<std::size_t> cursor(parts.size(), 0);
  for (std::size_t p = 0; p < parts.size(); ++p) {
    if (!parts[p].values.empty()) heads.emplace(parts[p].values.front(), p);
  }

  std::vector<double> merged;
  merged.reserve(total);
  while (!heads.empty()) {
    const auto [value, p] = heads.top();
    heads.pop();
    merged.push_back(value);
    if (++cursor[p] < parts[p].values.size()) {
      heads.emplace(parts[p].values[cursor[p]], p);
    }
  }
  return EmpiricalCdf::from_sorted(std::move(merged));
}

TransformReport transform_sample(const EmpiricalCdf& reference,
                                 std::span<const double> comparison,
                                 const TransformOptions& options) {
  if (comparison.empty()) throw EmptySample("comparison sample is empty");
  for (std::size_t j = 0; j < comparison.size(); ++j) {
    if (!std::isfinite(comparison[j])) {
      throw InvalidData("non-finite comparison value at index " + std::to_string(j), j);
    }
  }

  TransformReport report;
  report.m = comparison.size();
  report.n_reference = reference.size();
  report.ratio = static_cast<double>(report.m) / static_cast<double>(report.n_reference);
  report.ratio_warning = report.ratio >= kRatioWarningThreshold;
  report.dithered = options.dither;
  report.transformed.resize(report.m);

  const double n = static_cast<double>(reference.size());
  if (!options.dither) {
    parallel_for(report.m, options.threads, [&](std::size_t j) {
      report.transformed[j] = static_cast<double>(reference.count_at_most(comparison[j])) / n;
    });
    return report;
  }

  const std::uint64_t seed = options.seed.value_or(SeededRng::fresh_seed());
  report.seed_used = seed;
  parallel_for(report.m, options.threads, [&](std::size_t j) {
    const std::size_t k = reference.count_at_most(comparison[j]);
    if (k == 0) {
      report.transformed[j] = 0.0;
      return;
    }
    SeededRng rng(seed, j);
    report.transformed[j] = (static_cast<double>(k) - rng.uniform()) / n;
  });
  return report;
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

void write_ecdf(std::ostream& out, const EmpiricalCdf& ecdf) {
  out << "ecdf v1 n=" << ecdf.size() << '\n';
  for (double v : ecdf.values()) out << format_double(v) << '\n';
}

EmpiricalCdf read_ecdf(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("missing ecdf header", 1);
  constexpr std::string_view kPrefix = "ecdf v1 n=";
  if (!std::string_view(line).starts_with(kPrefix)) {
    throw ParseError("expected header 'ecdf v1 n=<count>', got '" + line + "'", 1);
  }
  const std::size_t expected = parse_count(std::string_view(line).substr(kPrefix.size()));

  std::vector<double> values;
  values.reserve(expected);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (values.size() == expected) {
      if (line.empty()) continue;
      throw ParseError("more values than the header count", line_no);
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
    if (ec != std::errc{} || ptr != line.data() + line.size() || !std::isfinite(v)) {
      throw ParseError("bad ecdf value '" + line + "'", line_no);
    }
    if (!values.empty() && v < values.back()) {
      throw ParseError("ecdf values out of order", line_no);
    }
    values.push_back(v);
  }
  if (values.size() != expected) {
    throw ParseError("header announces " + std::to_string(expected) + " values, found " +
                         std::to_string(values.size()),
                     line_no);
  }
  return EmpiricalCdf::from_sorted(std::move(values));
}

}  // namespace kst
