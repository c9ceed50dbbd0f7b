#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "kst/ecdf.hpp"

namespace kst::cli {

enum class InputFormat { lines, csv };
enum class MissingPolicy { error, skip };

/// One logical dataset spread over one or more partition files.
struct DatasetSpec {
  std::vector<std::string> paths;
  InputFormat format = InputFormat::lines;
  std::optional<std::string> column;  ///< csv only: header name or 0-based index
  bool header = false;                ///< csv with an index selector: skip first row
  MissingPolicy missing = MissingPolicy::error;

  /// Throws InvalidInput if the selector does not match the format.
  void validate() const;
};

/// A file that could not be opened or read.
class IoError : public std::runtime_error {
 public:
  IoError(const std::string& what, std::string path)
      : std::runtime_error(what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

struct ParsedPartition {
  EcdfPartition partition;  ///< sorted values, provenance = path
  std::vector<double> raw;  ///< values in file order
  std::size_t skipped = 0;
};

struct Dataset {
  std::vector<ParsedPartition> partitions;

  std::size_t total_count() const;
  std::size_t total_skipped() const;

  /// Values of all partitions concatenated in path order, file order kept.
  std::vector<double> concatenated() const;

  std::vector<EcdfPartition> sorted_partitions() const;
};

/// Locale-independent decimal/scientific parse of a trimmed token; rejects
/// anything non-finite.
std::optional<double> parse_value(std::string_view token);

/// Splits one CSV record; double quotes may wrap fields and "" escapes a quote.
std::vector<std::string> split_csv_record(std::string_view line);

/// Parses file contents. ParseError line numbers are 1-based.
ParsedPartition parse_partition(std::string_view content, const DatasetSpec& spec,
                                const std::string& provenance);

/// Reads and parses every path of `spec`, up to `threads` files at a time.
/// When several files fail, the error of the first failing path is reported.
Dataset ingest(const DatasetSpec& spec, unsigned threads);

std::string_view format_name(InputFormat format);
std::string_view missing_name(MissingPolicy policy);

}  // namespace kst::cli
