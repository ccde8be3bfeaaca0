#pragma once

#include <cstdint>
#include <string_view>

namespace genreforge {

/// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// FNV-1a over the bytes of a string.
std::uint64_t hash_string(std::string_view s) noexcept;

/// Seed for a named sub-stream: mix(master, hash(name)). Used to give every
/// clip, tree and OvR model its own reproducible stream.
std::uint64_t derive_seed(std::uint64_t master, std::string_view name) noexcept;
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

/// Counter-based uniform source: value i is a pure function of (seed, i), so
/// streams are identical regardless of how work is split across threads.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) noexcept : seed_(seed) {}

  std::uint64_t next_u64() noexcept { return at(counter_++); }
  /// Uniform on [0, 1) with 53 random bits.
  double next_uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  /// Uniform on (0, 1]; safe as a log() argument.
  double next_uniform_open_low() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }
  /// Uniform integer in [0, bound) by rejection (no modulo bias).
  std::uint64_t next_below(std::uint64_t bound) noexcept;

  std::uint64_t at(std::uint64_t index) const noexcept { return mix64(seed_ ^ mix64(index)); }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace genreforge
