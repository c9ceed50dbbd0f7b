#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kst {

/// Argument outside an operation's domain (non-finite scalar, alpha not in (0,1), ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A sample that must hold at least one value was empty.
class EmptySample : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A data element failed validation; carries its position in the input.
class InvalidData : public std::invalid_argument {
 public:
  InvalidData(const std::string& what, std::size_t index)
      : std::invalid_argument(what), index_(index) {}

  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// Malformed persisted or textual input. `line` is 1-based, 0 if unknown.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace kst
