#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace kst {

// Counter-based generator: the i-th output of stream (seed, index) is a pure
// function of (seed, index, i). Streams can therefore be handed to any thread
// in any order and still replay bit-for-bit on every platform.
class SeededRng {
 public:
  using result_type = std::uint64_t;

  SeededRng(std::uint64_t master_seed, std::uint64_t stream_index);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() { return next_u64(); }
  result_type next_u64();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

  /// Uniform on the open interval (0, 1); safe to feed to inverse CDFs.
  double uniform_open();

  std::uint64_t master_seed() const noexcept { return master_seed_; }
  std::uint64_t stream_index() const noexcept { return stream_index_; }
  std::uint64_t position() const noexcept { return counter_; }

  /// Hashes a path of indices into a single stream index.
  static std::uint64_t derive(std::initializer_list<std::uint64_t> path);

  /// A seed drawn from the operating system, for callers that were not given one.
  static std::uint64_t fresh_seed();

 private:
  std::uint64_t master_seed_;
  std::uint64_t stream_index_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace kst
