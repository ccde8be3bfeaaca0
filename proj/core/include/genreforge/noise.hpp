#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "genreforge/audio_io.hpp"

namespace genreforge::noise {

enum class NoiseKind { gaussian, pink };

std::string_view to_string(NoiseKind kind) noexcept;
std::optional<NoiseKind> noise_kind_from_string(std::string_view name) noexcept;

struct NoiseSpec {
  NoiseKind kind = NoiseKind::gaussian;
  double snr_db = 20.0;
  std::uint64_t seed = 0;
};

/// i.i.d. N(0, 1) by Box-Muller over a counter-based uniform stream.
std::vector<double> gaussian_noise(std::size_t n, std::uint64_t seed);

inline constexpr std::size_t kVossRows = 16;
inline constexpr std::size_t kMinPinkLength = 4096;

/// Voss-McCartney pink noise (16 rows plus a white term), shifted to zero
/// mean and scaled to unit variance. Throws TooShort below 4096 samples.
std::vector<double> pink_noise(std::size_t n, std::uint64_t seed);

std::vector<double> generate(NoiseKind kind, std::size_t n, std::uint64_t seed);

/// Mean-square power.
double signal_power(std::span<const double> samples);

struct MixResult {
  audio::AudioClip clip;
  /// Noise exactly as added before the peak guard.
  std::vector<double> scaled_noise;
  /// 10 log10(P_signal / P_noise) recomputed from scaled_noise.
  double achieved_snr_db = 0.0;
  /// Factor the sum was multiplied by to keep |sample| <= 1 (1 when unused).
  double peak_rescale = 1.0;
};

/// Adds noise scaled so the whole-clip SNR equals spec.snr_db. Throws
/// SilentSignal for a zero-power clip.
MixResult mix_at_snr(const audio::AudioClip& clip, const NoiseSpec& spec);

}  // namespace genreforge::noise
