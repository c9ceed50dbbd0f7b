#include "ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <sstream>

#include "kst/error.hpp"
#include "kst/parallel.hpp"

namespace kst::cli {
namespace {

std::string_view trim(std::string_view s) {
  constexpr std::string_view kSpace = " \t\r\n";
  const auto first = s.find_first_not_of(kSpace);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(kSpace);
  return s.substr(first, last - first + 1);
}

std::optional<std::size_t> parse_index(std::string_view text) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    return std::nullopt;
  }
  return value;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open input file '" + path + "'", path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("error reading input file '" + path + "'", path);
  return std::move(buffer).str();
}

}  // namespace

void DatasetSpec::validate() const {
  if (paths.empty()) throw InvalidInput("dataset has no input files");
  if (format == InputFormat::csv && !column) {
    throw InvalidInput("--format csv needs a --column selector");
  }
  if (format == InputFormat::lines && column) {
    throw InvalidInput("--column only applies to --format csv");
  }
}

std::size_t Dataset::total_count() const {
  std::size_t total = 0;
  for (const auto& p : partitions) total += p.raw.size();
  return total;
}

std::size_t Dataset::total_skipped() const {
  std::size_t total = 0;
  for (const auto& p : partitions) total += p.skipped;
  return total;
}

std::vector<double> Dataset::concatenated() const {
  std::vector<double> out;
  out.reserve(total_count());
  for (const auto& p : partitions) out.insert(out.end(), p.raw.begin(), p.raw.end());
  return out;
}

std::vector<EcdfPartition> Dataset::sorted_partitions() const {
  std::vector<EcdfPartition> out;
  out.reserve(partitions.size());
  for (const auto& p : partitions) out.push_back(p.partition);
  return out;
}

std::optional<double> parse_value(std::string_view token) {
  token = trim(token);
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  if (token.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value,
                                         std::chars_format::general);
  if (ec != std::errc{} || ptr != token.data() + token.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value + 0.0;
}

std::vector<std::string> split_csv_record(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  return fields;
}

ParsedPartition parse_partition(std::string_view content, const DatasetSpec& spec,
                                const std::string& provenance) {
  ParsedPartition out;
  std::size_t column = 0;
  bool expect_header = false;
  if (spec.format == InputFormat::csv) {
    if (const auto index = parse_index(*spec.column)) {
      column = *index;
      expect_header = spec.header;
    } else {
      expect_header = true;
    }
  }

  std::size_t line_no = 0;
  while (!content.empty()) {
    const auto eol = content.find('\n');
    const std::string_view line = content.substr(0, eol);
    content.remove_prefix(eol == std::string_view::npos ? content.size() : eol + 1);
    ++line_no;
    if (trim(line).empty()) continue;

    std::string cell;
    if (spec.format == InputFormat::lines) {
      cell = std::string(line);
    } else {
      auto fields = split_csv_record(line);
      if (expect_header) {
        expect_header = false;
        if (!parse_index(*spec.column)) {
          const auto it = std::find_if(fields.begin(), fields.end(), [&](const auto& f) {
            return trim(f) == *spec.column;
          });
          if (it == fields.end()) {
            throw ParseError(provenance + ": no column named '" + *spec.column + "'",
                             line_no);
          }
          column = static_cast<std::size_t>(it - fields.begin());
        }
        continue;
      }
      if (column < fields.size()) cell = std::move(fields[column]);
    }

    if (const auto value = parse_value(cell)) {
      out.raw.push_back(*value);
    } else if (spec.missing == MissingPolicy::skip) {
      ++out.skipped;
    } else {
      throw ParseError(provenance + ":" + std::to_string(line_no) +
                           ": not a finite number: '" + std::string(trim(cell)) + "'",
                       line_no);
    }
  }
  out.partition = EcdfPartition::sorted_from(out.raw, provenance);
  return out;
}

Dataset ingest(const DatasetSpec& spec, unsigned threads) {
  spec.validate();
  Dataset dataset;
  dataset.partitions.resize(spec.paths.size());
  std::vector<std::exception_ptr> errors(spec.paths.size());
  parallel_for(spec.paths.size(), threads, [&](std::size_t i) {
    try {
      dataset.partitions[i] = parse_partition(read_file(spec.paths[i]), spec, spec.paths[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  for (const auto& error : errors) {
    if (error) std::rethrow_exception(error);
  }
  return dataset;
}

std::string_view format_name(InputFormat format) {
  return format == InputFormat::lines ? "lines" : "csv";
}

std::string_view missing_name(MissingPolicy policy) {
  return policy == MissingPolicy::error ? "error" : "skip";
}

}  // namespace kst::cli
