#include "genreforge/noise.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>

#include "genreforge/error.hpp"
#include "genreforge/rng.hpp"

namespace genreforge::noise {

std::string_view to_string(NoiseKind kind) noexcept {
  return kind == NoiseKind::gaussian ? "gaussian" : "pink";
}

std::optional<NoiseKind> noise_kind_from_string(std::string_view name) noexcept {
  if (name == "gaussian") return NoiseKind::gaussian;
  if (name == "pink") return NoiseKind::pink;
  return std::nullopt;
}

std::vector<double> gaussian_noise(std::size_t n, std::uint64_t seed) {
  if (n == 0) fail(ErrorCode::InvalidArgument, "noise length must be positive");
  const CounterRng source(seed);
  std::vector<double> out(n);
  for (std::size_t pair = 0; 2 * pair < n; ++pair) {
    const double u1 = (static_cast<double>(source.at(2 * pair) >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(source.at(2 * pair + 1) >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    out[2 * pair] = r * std::cos(theta);
    if (2 * pair + 1 < n) out[2 * pair + 1] = r * std::sin(theta);
  }
  return out;
}

std::vector<double> pink_noise(std::size_t n, std::uint64_t seed) {
  if (n < kMinPinkLength) {
    fail(ErrorCode::TooShort, "pink noise needs at least " + std::to_string(kMinPinkLength) + " samples");
  }
  CounterRng rng(seed);
  auto uniform = [&rng] { return 2.0 * rng.next_uniform() - 1.0; };

  std::array<double, kVossRows> rows{};
  double running = 0.0;
  for (auto& r : rows) {
    r = uniform();
    running += r;
  }

  // Row k is redrawn whenever the counter's lowest set bit is k, i.e. every
  // 2^(k+1) samples; one extra white term fills the top octave.
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t counter = i + 1;
    const auto row = static_cast<std::size_t>(std::countr_zero(counter));
    if (row < kVossRows) {
      running -= rows[row];
      rows[row] = uniform();
      running += rows[row];
    }
    out[i] = running + uniform();
  }

  const double mean = std::accumulate(out.begin(), out.end(), 0.0) / static_cast<double>(n);
  double var = 0.0;
  for (double& v : out) {
    v -= mean;
    var += v * v;
  }
  var /= static_cast<double>(n);
  const double scale = 1.0 / std::sqrt(var);
  for (double& v : out) v *= scale;
  return out;
}

std::vector<double> generate(NoiseKind kind, std::size_t n, std::uint64_t seed) {
  return kind == NoiseKind::gaussian ? gaussian_noise(n, seed) : pink_noise(n, seed);
}

double signal_power(std::span<const double> samples) {
  if (samples.empty()) return 0.0;
  double acc = 0.0;
  for (double x : samples) acc += x * x;
  return acc / static_cast<double>(samples.size());
}

MixResult mix_at_snr(const audio::AudioClip& clip, const NoiseSpec& spec) {
  if (!std::isfinite(spec.snr_db)) fail(ErrorCode::InvalidArgument, "SNR must be finite");
  const auto samples = clip.samples();
  const double p_signal = signal_power(samples);
  if (!(p_signal > 0.0)) {
    fail(ErrorCode::SilentSignal, "clip '" + clip.source_id() + "' has zero power; SNR undefined");
  }

  // Pink noise needs a minimum length; generate at least that much and use
  // the prefix.
  const std::size_t n = samples.size();
  const std::size_t gen_len = spec.kind == NoiseKind::pink ? std::max(n, kMinPinkLength) : n;
  auto noise = generate(spec.kind, gen_len, spec.seed);
  noise.resize(n);

  const double p_noise_raw = signal_power(noise);
  const double target_noise = p_signal / std::pow(10.0, spec.snr_db / 10.0);
  const double gain = std::sqrt(target_noise / p_noise_raw);
  for (double& v : noise) v *= gain;

  std::vector<double> mixed(n);
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mixed[i] = samples[i] + noise[i];
    peak = std::max(peak, std::abs(mixed[i]));
  }
  double rescale = 1.0;
  if (peak > 1.0) {
    rescale = 1.0 / peak;
    for (double& v : mixed) v = std::clamp(v * rescale, -1.0, 1.0);
  }

  MixResult result{audio::AudioClip(std::move(mixed), clip.sample_rate(), clip.source_id()),
                   std::move(noise), 0.0, rescale};
  result.achieved_snr_db = 10.0 * std::log10(p_signal / signal_power(result.scaled_noise));
  return result;
}

}  // namespace genreforge::noise
