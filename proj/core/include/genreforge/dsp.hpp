#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "genreforge/audio_io.hpp"
#include "genreforge/matrix.hpp"

namespace genreforge::dsp {

using Complex = std::complex<double>;

using genreforge::Matrix;

/// y[0] = x[0]; y[t] = x[t] - alpha * x[t-1].
std::vector<double> pre_emphasis(std::span<const double> samples, double alpha = 0.97);

/// Periodic Hann: w[i] = 0.5 - 0.5 cos(2 pi i / n).
std::vector<double> hann_window(std::size_t n);

bool is_power_of_two(std::size_t n) noexcept;

/// In-place iterative radix-2 transform. Throws NonPowerOfTwoLength.
void fft_inplace(std::span<Complex> data, bool inverse = false);

std::vector<Complex> fft(std::span<const Complex> input);
/// Inverse transform including the 1/N factor, so ifft(fft(x)) == x.
std::vector<Complex> ifft(std::span<const Complex> input);

/// Frame length, hop and window for the short-time transform.
class StftConfig {
 public:
  /// Hann window of length nfft.
  StftConfig(std::size_t nfft = 2048, std::size_t hop = 512);
  StftConfig(std::size_t nfft, std::size_t hop, std::vector<double> window);

  std::size_t nfft() const noexcept { return nfft_; }
  std::size_t hop() const noexcept { return hop_; }
  std::span<const double> window() const noexcept { return window_; }
  std::size_t num_bins() const noexcept { return nfft_ / 2 + 1; }

  /// floor((len - nfft) / hop) + 1; zero when len < nfft.
  std::size_t frame_count(std::size_t signal_length) const noexcept;

 private:
  std::size_t nfft_;
  std::size_t hop_;
  std::vector<double> window_;
};

enum class SpectrumKind { magnitude, power };

struct Spectrogram {
  Matrix values;  // num_frames x num_bins, all >= 0
  std::vector<double> bin_frequencies;
  std::vector<double> frame_times;
  SpectrumKind kind = SpectrumKind::magnitude;

  std::size_t num_frames() const noexcept { return values.rows(); }
  std::size_t num_bins() const noexcept { return values.cols(); }
};

/// Non-centred STFT magnitude: frame m covers samples [m*hop, m*hop + nfft).
/// Throws SignalTooShort when the clip holds fewer than nfft samples.
Spectrogram stft(const audio::AudioClip& clip, const StftConfig& config);
/// Same transform over a raw buffer (e.g. a pre-emphasized signal, which may
/// exceed the [-1, 1] clip range).
Spectrogram stft(std::span<const double> samples, double sample_rate, const StftConfig& config);

/// Element-wise square. Throws KindMismatch unless the input is a magnitude.
Spectrogram power_spectrogram(const Spectrogram& magnitude);

double hz_to_mel(double hz);
double mel_to_hz(double mel);

struct MelFilterbank {
  Matrix weights;  // nmels x num_bins
  std::vector<double> center_frequencies;

  std::size_t num_filters() const noexcept { return weights.rows(); }

  /// energies[m] = sum_k weights(m, k) * power[k]
  std::vector<double> apply(std::span<const double> power_frame) const;
};

/// Triangular filters with peak 1, edges equally spaced in mel between
/// f_min and f_max. A negative f_max selects sample_rate / 2.
MelFilterbank build_mel_filterbank(std::size_t nmels, std::size_t nfft, double sample_rate,
                                   double f_min = 0.0, double f_max = -1.0);

/// Orthonormal DCT-II of the whole input (length M in, M coefficients out).
std::vector<double> dct_ii_ortho(std::span<const double> values);

}  // namespace genreforge::dsp
