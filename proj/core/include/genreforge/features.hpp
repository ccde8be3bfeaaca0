#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "genreforge/audio_io.hpp"
#include "genreforge/dsp.hpp"
#include "genreforge/genre.hpp"

namespace genreforge::features {

inline constexpr std::size_t kFeatureCount = 57;
inline constexpr std::size_t kMfccCount = 20;
inline constexpr std::size_t kChromaCount = 12;

/// Canonical column names, in the fixed order every vector, CSV and model
/// file uses.
const std::array<std::string, kFeatureCount>& feature_names();

/// One scalar per frame for a named feature.
struct FrameSeries {
  std::string name;
  std::vector<double> values;

  double mean() const;
  /// Population standard deviation.
  double stddev() const;
};

struct Moments {
  double mean = 0.0;
  double stddev = 0.0;
  double skewness = 0.0;
  double kurtosis = 0.0;  // non-excess: Gaussian -> 3
  bool degenerate = false;  // zero variance; skewness and kurtosis forced to 0
};

/// Population moments (divide by N). Requires at least two samples.
Moments central_moments(std::span<const double> samples);

/// Fraction of adjacent pairs whose product is strictly negative.
double zero_crossing_rate(std::span<const double> frame);

double rmse(std::span<const double> frame);

/// Per-frame ZCR / RMSE using the same framing as the STFT (no window).
FrameSeries zcr_series(std::span<const double> samples, const dsp::StftConfig& config);
FrameSeries rmse_series(std::span<const double> samples, const dsp::StftConfig& config);

struct TempoConfig {
  double min_bpm = 40.0;
  double max_bpm = 200.0;
  double prior_center_bpm = 120.0;
  double prior_sigma_octaves = 1.0;
  std::size_t onset_mels = 128;
  double log_floor_db = -80.0;  // relative to the loudest mel cell
};

/// Global tempo from the autocorrelation of a spectral-flux onset envelope,
/// weighted by a log-normal prior. Always returns a value in
/// [min_bpm, max_bpm]; silence yields the prior centre.
double tempo_estimate(const audio::AudioClip& clip, const dsp::StftConfig& config,
                      const TempoConfig& tempo = {});
double tempo_estimate(std::span<const double> samples, double sample_rate,
                      const dsp::StftConfig& config, const TempoConfig& tempo = {});
/// Tempo from an already computed magnitude spectrogram.
double tempo_from_spectrogram(const dsp::Spectrogram& magnitude, double sample_rate,
                              std::size_t hop, const TempoConfig& tempo = {});

/// Half-wave rectified spectral flux of the log mel power spectrogram,
/// averaged over bands. One value per STFT frame; the first frame is 0.
std::vector<double> onset_envelope(const dsp::Spectrogram& power, const dsp::MelFilterbank& bank,
                                   double log_floor_db);

inline constexpr double kLogFloor = 1e-10;

/// Per-frame MFCCs: power -> filterbank -> log(S + 1e-10) -> orthonormal DCT,
/// keeping the first n_coeffs. Returns n_coeffs series.
std::vector<FrameSeries> mfcc(const audio::AudioClip& clip, const dsp::StftConfig& config,
                              const dsp::MelFilterbank& filterbank,
                              std::size_t n_coeffs = kMfccCount);
std::vector<FrameSeries> mfcc(const dsp::Spectrogram& power, const dsp::MelFilterbank& filterbank,
                              std::size_t n_coeffs = kMfccCount);

/// 12 pitch-class series (index 0 = C), each frame max-normalized.
std::vector<FrameSeries> chroma(const dsp::Spectrogram& power, double f_low = 27.5);

/// Pitch class (0 = C .. 11 = B) of a frequency in Hz.
int pitch_class(double hz);

FrameSeries spectral_centroid(const dsp::Spectrogram& magnitude);
FrameSeries spectral_bandwidth(const dsp::Spectrogram& magnitude, const FrameSeries& centroids);

struct TrackFeatureVector {
  std::array<double, kFeatureCount> values{};
  std::string source_id;
  std::optional<GenreLabel> label;
};

/// Settings for the whole-clip extractor. Defaults are the pipeline's.
struct ExtractorConfig {
  double pre_emphasis = 0.97;
  std::size_t nfft = 2048;
  std::size_t hop = 512;
  std::size_t nmels = 20;
};

/// Builds the canonical 57-value vector for one clip (at least 1 s long).
TrackFeatureVector extract_track_features(const audio::AudioClip& clip,
                                          const ExtractorConfig& config = {});

}  // namespace genreforge::features
