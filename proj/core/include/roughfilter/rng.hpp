#pragma once

#include <cstdint>
#include <limits>

namespace rf {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Counter-based generator: the n-th output is a hash of (key, n). Streams
// with different keys are independent and can be created anywhere without
// coordination, which is what per-particle and per-band seeding relies on.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : key_(splitmix64(seed ^ splitmix64(stream + 0x632BE59BD9B4E019ULL))) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept { return splitmix64(key_ + 0x9E3779B97F4A7C15ULL * ++counter_); }

  /// Uniform in the open interval (0, 1).
  double uniform() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Stream ids used when deriving sub-streams from one seed.
namespace stream {
inline constexpr std::uint64_t kBrownianB = 1;
inline constexpr std::uint64_t kBrownianW = 2;
inline constexpr std::uint64_t kSignalJumps = 3;
inline constexpr std::uint64_t kObservationJumps = 4;
inline constexpr std::uint64_t kInitial = 5;
inline constexpr std::uint64_t kShotNoiseBase = 1000;
}  // namespace stream

}  // namespace rf
