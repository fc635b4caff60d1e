#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace rectprod {

// Counter-based Philox4x32-10 generator. A generator is identified by
// (seed, stream); split() derives an independent child stream, so every
// (trial, factor) pair can own its own sequence without shared state.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  // Uniform on the open interval (0, 1) with 53 random bits.
  double uniform();

  Rng split(std::uint64_t index) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int available_ = 0;
};

// One round of the SplitMix64 finalizer; used to derive stream identifiers.
std::uint64_t mix64(std::uint64_t x);

}  // namespace rectprod
