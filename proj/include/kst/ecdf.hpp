#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace kst {

/// Threshold on m/n above which the transform approach loses its one-sample
/// behaviour and a warning is raised.
inline constexpr double kRatioWarningThreshold = 0.2;

// Empirical CDF of a reference sample. Holds the full sorted sample (ties
// kept) so that evaluation is exact. Immutable once built.
class EmpiricalCdf {
 public:
  /// Sorts a copy of `data`. Throws EmptySample or InvalidData(index).
  static EmpiricalCdf from_unsorted(std::span<const double> data);

  /// Adopts an already sorted sample after validating it.
  static EmpiricalCdf from_sorted(std::vector<double> sorted);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }

  /// #{x_i <= x}
  std::size_t count_at_most(double x) const;

  /// Right-continuous F_n(x) = #{x_i <= x} / n.
  double eval(double x) const;
  double operator()(double x) const { return eval(x); }

  friend bool operator==(const EmpiricalCdf&, const EmpiricalCdf&) = default;

 private:
  explicit EmpiricalCdf(std::vector<double> sorted) : values_(std::move(sorted)) {}

  std::vector<double> values_;
};

/// A locally sorted slice of a larger dataset, e.g. one input file.
struct EcdfPartition {
  std::vector<double> values;
  std::string provenance;

  /// Validates and sorts `data`. Empty partitions are allowed.
  static EcdfPartition sorted_from(std::vector<double> data, std::string provenance);

  std::size_t count() const noexcept { return values.size(); }
};

struct TransformOptions {
  bool dither = false;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
};

/// Comparison sample pushed through the reference ecdf.
struct TransformReport {
  std::vector<double> transformed;  ///< same order as the comparison input
  std::size_t m = 0;
  std::size_t n_reference = 0;
  double ratio = 0.0;  ///< m / n_reference
  bool dithered = false;
  std::optional<std::uint64_t> seed_used;
  bool ratio_warning = false;  ///< ratio >= kRatioWarningThreshold
};

EmpiricalCdf build_ecdf(std::span<const double> data);
double ecdf_eval(const EmpiricalCdf& ecdf, double x);

/// k-way merge of sorted partitions. Equal to build_ecdf over their concatenation.
EmpiricalCdf merge_partitions(std::span<const EcdfPartition> parts);

// transformed[j] = #{x_i <= y_j} / n. With dithering, a value with k >= 1
// reference points at or below it becomes (k - U_j) / n, U_j ~ U[0,1) drawn
// from stream (seed, j); values below the reference support stay at 0.
TransformReport transform_sample(const EmpiricalCdf& reference,
                                 std::span<const double> comparison,
                                 const TransformOptions& options = {});

// Text persistence:
//   ecdf v1 n=<count>
//   <value>        (one per line, ascending, shortest round-trip form)
void write_ecdf(std::ostream& out, const EmpiricalCdf& ecdf);
EmpiricalCdf read_ecdf(std::istream& in);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

}  // namespace kst
