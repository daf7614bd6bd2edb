#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace vsuspect {

/// Session random source. The engine is std::mt19937_64, whose output
/// sequence is fixed by the standard; the mappings to doubles and indices are
/// done here rather than with std:: distributions so that a seed replays the
/// same draws with any standard library.
class SessionRng {
 public:
  static constexpr std::string_view kAlgorithm = "mt19937_64";

  explicit SessionRng(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  /// Number of 64-bit words consumed so far.
  std::uint64_t draws() const noexcept { return draws_; }

  std::uint64_t next_u64() {
    ++draws_;
    return engine_();
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in [0, n), rejection-sampled so there is no modulo bias.
  std::size_t uniform_index(std::size_t n) {
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return static_cast<std::size_t>(x % bound);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t draws_ = 0;
  std::mt19937_64 engine_;
};

}  // namespace vsuspect
