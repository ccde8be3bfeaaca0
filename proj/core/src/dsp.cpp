#include "genreforge/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "genreforge/error.hpp"

namespace genreforge::dsp {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Twiddles exp(-j 2 pi k / n) for k < n/2, cached per thread for the most
// recent size. Every STFT frame reuses the same size.
std::span<const Complex> twiddles(std::size_t n) {
  thread_local std::vector<Complex> table;
  thread_local std::size_t table_n = 0;
  if (table_n != n) {
    table.resize(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
      const double angle = -kTwoPi * static_cast<double>(k) / static_cast<double>(n);
      table[k] = Complex(std::cos(angle), std::sin(angle));
    }
    table_n = n;
  }
  return table;
}

}  // namespace

std::vector<double> pre_emphasis(std::span<const double> samples, double alpha) {
  if (samples.empty()) fail(ErrorCode::InvalidArgument, "pre-emphasis needs a non-empty signal");
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    fail(ErrorCode::InvalidArgument, "pre-emphasis alpha must lie in [0, 1)");
  }
  std::vector<double> out(samples.size());
  out[0] = samples[0];
  for (std::size_t t = 1; t < samples.size(); ++t) out[t] = samples[t] - alpha * samples[t - 1];
  return out;
}

std::vector<double> hann_window(std::size_t n) {
  if (n < 2) fail(ErrorCode::InvalidArgument, "Hann window length must be >= 2");
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(kTwoPi * static_cast<double>(i) / static_cast<double>(n));
  }
  return w;
}

bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

void fft_inplace(std::span<Complex> data, bool inverse) {
  const std::size_t n = data.size();
  if (!is_power_of_two(n)) {
    fail(ErrorCode::NonPowerOfTwoLength, "FFT length " + std::to_string(n) + " is not a power of two");
  }
  if (n == 1) return;

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }

  const auto tw = twiddles(n);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = n / len;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        Complex w = tw[k * stride];
        if (inverse) w = std::conj(w);
        const Complex u = data[start + k];
        const Complex v = data[start + k + half] * w;
        data[start + k] = u + v;
        data[start + k + half] = u - v;
      }
    }
  }
}

std::vector<Complex> fft(std::span<const Complex> input) {
  std::vector<Complex> out(input.begin(), input.end());
  fft_inplace(out, false);
  return out;
}

std::vector<Complex> ifft(std::span<const Complex> input) {
  std::vector<Complex> out(input.begin(), input.end());
  fft_inplace(out, true);
  const double scale = 1.0 / static_cast<double>(out.size());
  for (auto& v : out) v *= scale;
  return out;
}

StftConfig::StftConfig(std::size_t nfft, std::size_t hop)
    : StftConfig(nfft, hop, nfft >= 2 ? hann_window(nfft) : std::vector<double>{}) {}

StftConfig::StftConfig(std::size_t nfft, std::size_t hop, std::vector<double> window)
    : nfft_(nfft), hop_(hop), window_(std::move(window)) {
  if (nfft_ < 2 || !is_power_of_two(nfft_)) {
    fail(ErrorCode::NonPowerOfTwoLength, "nfft must be a power of two >= 2");
  }
  if (hop_ < 1 || hop_ > nfft_) fail(ErrorCode::InvalidArgument, "hop must lie in [1, nfft]");
  if (window_.size() != nfft_) fail(ErrorCode::LengthMismatch, "window length must equal nfft");
  for (double w : window_) {
    if (!(w >= 0.0 && w <= 1.0)) fail(ErrorCode::InvalidArgument, "window coefficients must lie in [0, 1]");
  }
}

std::size_t StftConfig::frame_count(std::size_t signal_length) const noexcept {
  if (signal_length < nfft_) return 0;
  return (signal_length - nfft_) / hop_ + 1;
}

Spectrogram stft(const audio::AudioClip& clip, const StftConfig& config) {
  if (clip.size() < config.nfft()) {
    fail(ErrorCode::SignalTooShort, "clip '" + clip.source_id() + "' is shorter than one FFT frame");
  }
  return stft(clip.samples(), clip.sample_rate(), config);
}

Spectrogram stft(std::span<const double> samples, double rate, const StftConfig& config) {
  const std::size_t n = config.nfft();
  if (samples.size() < n) fail(ErrorCode::SignalTooShort, "signal is shorter than one FFT frame");
  if (!(rate > 0.0)) fail(ErrorCode::InvalidArgument, "sample rate must be positive");
  const std::size_t frames = config.frame_count(samples.size());
  const std::size_t bins = config.num_bins();

  Spectrogram spec;
  spec.kind = SpectrumKind::magnitude;
  spec.values = Matrix(frames, bins);
  spec.bin_frequencies.resize(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    spec.bin_frequencies[k] = static_cast<double>(k) * rate / static_cast<double>(n);
  }
  spec.frame_times.resize(frames);

  const auto window = config.window();
  std::vector<Complex> buffer(n);
  for (std::size_t m = 0; m < frames; ++m) {
    const std::size_t offset = m * config.hop();
    spec.frame_times[m] = static_cast<double>(offset) / rate;
    for (std::size_t i = 0; i < n; ++i) buffer[i] = Complex(window[i] * samples[offset + i], 0.0);
    fft_inplace(buffer, false);
    auto out = spec.values.row(m);
    for (std::size_t k = 0; k < bins; ++k) out[k] = std::abs(buffer[k]);
  }
  return spec;
}

Spectrogram power_spectrogram(const Spectrogram& magnitude) {
  if (magnitude.kind != SpectrumKind::magnitude) {
    fail(ErrorCode::KindMismatch, "power_spectrogram expects a magnitude spectrogram");
  }
  Spectrogram power = magnitude;
  for (double& v : power.values.flat()) v *= v;
  power.kind = SpectrumKind::power;
  return power;
}

double hz_to_mel(double hz) {
  if (hz < 0.0) fail(ErrorCode::NegativeFrequency, "frequency must be non-negative");
  return 2595.0 * std::log10(1.0 + hz / 700.0);
}

double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

std::vector<double> MelFilterbank::apply(std::span<const double> power_frame) const {
  if (power_frame.size() != weights.cols()) {
    fail(ErrorCode::LengthMismatch, "power frame width does not match the filterbank");
  }
  std::vector<double> energies(weights.rows(), 0.0);
  for (std::size_t m = 0; m < weights.rows(); ++m) {
    const auto row = weights.row(m);
    double acc = 0.0;
    for (std::size_t k = 0; k < row.size(); ++k) acc += row[k] * power_frame[k];
    energies[m] = acc;
  }
  return energies;
}

MelFilterbank build_mel_filterbank(std::size_t nmels, std::size_t nfft, double sample_rate,
                                   double f_min, double f_max) {
  if (f_max < 0.0) f_max = sample_rate / 2.0;
  if (nmels < 1) fail(ErrorCode::InvalidArgument, "filterbank needs at least one filter");
  if (!is_power_of_two(nfft) || nfft < 2) fail(ErrorCode::NonPowerOfTwoLength, "nfft must be a power of two");
  if (!(f_min >= 0.0 && f_min < f_max && f_max <= sample_rate / 2.0)) {
    fail(ErrorCode::InvalidFrequencyRange, "need 0 <= f_min < f_max <= sample_rate / 2");
  }

  const double mel_lo = hz_to_mel(f_min);
  const double mel_hi = hz_to_mel(f_max);
  std::vector<double> edges(nmels + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) /
                                      static_cast<double>(nmels + 1));
  }

  const std::size_t bins = nfft / 2 + 1;
  MelFilterbank bank;
  bank.weights = Matrix(nmels, bins);
  bank.center_frequencies.assign(edges.begin() + 1, edges.end() - 1);
  for (std::size_t m = 0; m < nmels; ++m) {
    const double lo = edges[m];
    const double mid = edges[m + 1];
    const double hi = edges[m + 2];
    for (std::size_t k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate / static_cast<double>(nfft);
      double w = 0.0;
      if (f > lo && f <= mid) {
        w = (f - lo) / (mid - lo);
      } else if (f > mid && f < hi) {
        w = (hi - f) / (hi - mid);
      }
      bank.weights(m, k) = w;
    }
  }
  return bank;
}

std::vector<double> dct_ii_ortho(std::span<const double> values) {
  const std::size_t m_count = values.size();
  if (m_count == 0) fail(ErrorCode::InvalidArgument, "DCT input must be non-empty");
  const double m_real = static_cast<double>(m_count);
  const double scale = std::sqrt(2.0 / m_real);
  std::vector<double> out(m_count);
  for (std::size_t i = 0; i < m_count; ++i) {
    double acc = 0.0;
    for (std::size_t m = 0; m < m_count; ++m) {
      acc += values[m] * std::cos(std::numbers::pi * static_cast<double>(i) *
                                  (static_cast<double>(m) + 0.5) / m_real);
    }
    out[i] = scale * acc;
  }
  out[0] /= std::numbers::sqrt2;
  return out;
}

}  // namespace genreforge::dsp
