#include "genreforge/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "genreforge/error.hpp"

namespace genreforge::features {
namespace {

std::array<std::string, kFeatureCount> make_feature_names() {
  std::array<std::string, kFeatureCount> names;
  std::size_t i = 0;
  for (const char* n : {"sig_mean", "sig_std", "sig_skew", "sig_kurtosis", "zcr_mean", "zcr_std",
                        "rmse_mean", "rmse_std", "tempo", "centroid_mean", "centroid_std",
                        "bandwidth_mean", "bandwidth_std"}) {
    names[i++] = n;
  }
  auto two_digit = [](std::size_t k) { return (k < 10 ? "0" : "") + std::to_string(k); };
  for (std::size_t k = 1; k <= kChromaCount; ++k) names[i++] = "chroma_mean_" + two_digit(k);
  for (std::size_t k = 1; k <= kChromaCount; ++k) names[i++] = "chroma_std_" + two_digit(k);
  for (std::size_t k = 1; k <= kMfccCount; ++k) names[i++] = "mfcc_mean_" + two_digit(k);
  return names;
}

void require_kind(const dsp::Spectrogram& spec, dsp::SpectrumKind kind, const char* what) {
  if (spec.kind != kind) fail(ErrorCode::KindMismatch, std::string(what) + ": wrong spectrogram kind");
}

template <typename FrameFn>
FrameSeries frame_series(std::string name, std::span<const double> samples,
                         const dsp::StftConfig& config, FrameFn fn) {
  const std::size_t frames = config.frame_count(samples.size());
  if (frames == 0) fail(ErrorCode::SignalTooShort, "signal is shorter than one analysis frame");
  FrameSeries series{std::move(name), std::vector<double>(frames)};
  for (std::size_t m = 0; m < frames; ++m) {
    series.values[m] = fn(samples.subspan(m * config.hop(), config.nfft()));
  }
  return series;
}

}  // namespace

const std::array<std::string, kFeatureCount>& feature_names() {
  static const auto names = make_feature_names();
  return names;
}

double FrameSeries::mean() const {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double FrameSeries::stddev() const {
  if (values.empty()) return 0.0;
  const double mu = mean();
  double acc = 0.0;
  for (double v : values) acc += (v - mu) * (v - mu);
  return std::sqrt(acc / static_cast<double>(values.size()));
}

Moments central_moments(std::span<const double> samples) {
  if (samples.size() < 2) fail(ErrorCode::InvalidArgument, "moments need at least two samples");
  const double n = static_cast<double>(samples.size());
  double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  double peak = 0.0;
  bool constant = true;
  for (double x : samples) {
    peak = std::max(peak, std::abs(x));
    constant = constant && x == samples[0];
  }
  if (constant) mean = samples[0];
  double m2 = 0.0;
  double m3 = 0.0;
  double m4 = 0.0;
  for (double x : samples) {
    const double d = x - mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;

  Moments out;
  out.mean = mean;
  out.stddev = std::sqrt(m2);
  // Spread at the level of summation round-off counts as no spread.
  if (constant || std::sqrt(m2) <= 1e-12 * peak) {
    out.stddev = 0.0;
    out.degenerate = true;
    return out;
  }
  out.skewness = m3 / std::pow(m2, 1.5);
  out.kurtosis = m4 / (m2 * m2);
  return out;
}

double zero_crossing_rate(std::span<const double> frame) {
  if (frame.size() < 2) fail(ErrorCode::FrameTooShort, "zero-crossing rate needs two samples");
  std::size_t crossings = 0;
  for (std::size_t t = 1; t < frame.size(); ++t) {
    if (frame[t] * frame[t - 1] < 0.0) ++crossings;
  }
  return static_cast<double>(crossings) / static_cast<double>(frame.size() - 1);
}

double rmse(std::span<const double> frame) {
  if (frame.empty()) fail(ErrorCode::InvalidArgument, "RMS of an empty frame");
  double acc = 0.0;
  for (double x : frame) acc += x * x;
  return std::sqrt(acc / static_cast<double>(frame.size()));
}

FrameSeries zcr_series(std::span<const double> samples, const dsp::StftConfig& config) {
  return frame_series("zcr", samples, config, [](auto f) { return zero_crossing_rate(f); });
}

FrameSeries rmse_series(std::span<const double> samples, const dsp::StftConfig& config) {
  return frame_series("rmse", samples, config, [](auto f) { return rmse(f); });
}

std::vector<double> onset_envelope(const dsp::Spectrogram& power, const dsp::MelFilterbank& bank,
                                   double log_floor_db) {
  require_kind(power, dsp::SpectrumKind::power, "onset_envelope");
  const std::size_t frames = power.num_frames();
  const std::size_t bands = bank.num_filters();

  dsp::Matrix log_mel(frames, bands);
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < frames; ++m) {
    const auto energies = bank.apply(power.values.row(m));
    for (std::size_t b = 0; b < bands; ++b) {
      log_mel(m, b) = 10.0 * std::log10(std::max(energies[b], kLogFloor));
      peak = std::max(peak, log_mel(m, b));
    }
  }
  const double floor_db = peak + log_floor_db;
  for (double& v : log_mel.flat()) v = std::max(v, floor_db);

  std::vector<double> envelope(frames, 0.0);
  for (std::size_t m = 1; m < frames; ++m) {
    double flux = 0.0;
    for (std::size_t b = 0; b < bands; ++b) flux += std::max(0.0, log_mel(m, b) - log_mel(m - 1, b));
    envelope[m] = flux / static_cast<double>(bands);
  }
  return envelope;
}

double tempo_from_spectrogram(const dsp::Spectrogram& magnitude, double sample_rate,
                              std::size_t hop, const TempoConfig& tempo) {
  require_kind(magnitude, dsp::SpectrumKind::magnitude, "tempo");
  const std::size_t nfft = (magnitude.num_bins() - 1) * 2;
  const auto bank =
      dsp::build_mel_filterbank(tempo.onset_mels, nfft, sample_rate, 0.0, sample_rate / 2.0);
  auto envelope = onset_envelope(dsp::power_spectrogram(magnitude), bank, tempo.log_floor_db);

  const double frame_rate = sample_rate / static_cast<double>(hop);
  const double mu = std::accumulate(envelope.begin(), envelope.end(), 0.0) /
                    static_cast<double>(envelope.size());
  for (double& v : envelope) v -= mu;

  const std::size_t n = envelope.size();
  const auto min_lag = static_cast<std::size_t>(std::ceil(60.0 * frame_rate / tempo.max_bpm));
  const auto max_lag = std::min<std::size_t>(
      static_cast<std::size_t>(std::floor(60.0 * frame_rate / tempo.min_bpm)), n > 2 ? n - 2 : 0);
  if (min_lag < 1 || max_lag <= min_lag) return tempo.prior_center_bpm;

  auto prior = [&](double lag) {
    const double bpm = 60.0 * frame_rate / lag;
    const double octaves = std::log2(bpm / tempo.prior_center_bpm) / tempo.prior_sigma_octaves;
    return std::exp(-0.5 * octaves * octaves);
  };
  // Scores over lags [min_lag - 1, max_lag + 1] so the refinement has
  // neighbours at both ends.
  const std::size_t lo = min_lag - 1;
  const std::size_t hi = std::min(max_lag + 1, n - 1);
  std::vector<double> score(hi + 1, 0.0);
  for (std::size_t lag = std::max<std::size_t>(lo, 1); lag <= hi; ++lag) {
    double acc = 0.0;
    for (std::size_t t = 0; t + lag < n; ++t) acc += envelope[t] * envelope[t + lag];
    score[lag] = acc / static_cast<double>(n - lag) * prior(static_cast<double>(lag));
  }

  std::size_t best = 0;
  double best_score = 0.0;
  for (std::size_t lag = min_lag; lag <= max_lag; ++lag) {
    if (score[lag] > best_score) {
      best_score = score[lag];
      best = lag;
    }
  }
  if (best == 0) return tempo.prior_center_bpm;

  double refined = static_cast<double>(best);
  if (best >= 1 && best + 1 <= hi) {
    const double left = score[best - 1];
    const double right = score[best + 1];
    const double denom = left - 2.0 * best_score + right;
    if (denom < 0.0) refined += std::clamp(0.5 * (left - right) / denom, -0.5, 0.5);
  }
  const double bpm = 60.0 * frame_rate / refined;
  return std::clamp(bpm, tempo.min_bpm, tempo.max_bpm);
}

double tempo_estimate(std::span<const double> samples, double sample_rate,
                      const dsp::StftConfig& config, const TempoConfig& tempo) {
  if (static_cast<double>(samples.size()) < 2.0 * sample_rate) {
    fail(ErrorCode::SignalTooShort, "tempo estimation needs at least 2 s of audio");
  }
  return tempo_from_spectrogram(dsp::stft(samples, sample_rate, config), sample_rate,
                                config.hop(), tempo);
}

double tempo_estimate(const audio::AudioClip& clip, const dsp::StftConfig& config,
                      const TempoConfig& tempo) {
  return tempo_estimate(clip.samples(), clip.sample_rate(), config, tempo);
}

std::vector<FrameSeries> mfcc(const dsp::Spectrogram& power, const dsp::MelFilterbank& filterbank,
                              std::size_t n_coeffs) {
  require_kind(power, dsp::SpectrumKind::power, "mfcc");
  if (n_coeffs < 1 || n_coeffs > filterbank.num_filters()) {
    fail(ErrorCode::InvalidArgument, "n_coeffs must lie in [1, nmels]");
  }
  const std::size_t frames = power.num_frames();
  std::vector<FrameSeries> out(n_coeffs);
  for (std::size_t i = 0; i < n_coeffs; ++i) {
    out[i].name = "mfcc_" + std::to_string(i + 1);
    out[i].values.resize(frames);
  }
  for (std::size_t m = 0; m < frames; ++m) {
    auto energies = filterbank.apply(power.values.row(m));
    for (double& e : energies) e = std::log(e + kLogFloor);
    const auto coeffs = dsp::dct_ii_ortho(energies);
    for (std::size_t i = 0; i < n_coeffs; ++i) out[i].values[m] = coeffs[i];
  }
  return out;
}

std::vector<FrameSeries> mfcc(const audio::AudioClip& clip, const dsp::StftConfig& config,
                              const dsp::MelFilterbank& filterbank, std::size_t n_coeffs) {
  return mfcc(dsp::power_spectrogram(dsp::stft(clip, config)), filterbank, n_coeffs);
}

int pitch_class(double hz) {
  if (!(hz > 0.0)) fail(ErrorCode::InvalidArgument, "pitch class needs a positive frequency");
  const long midi = std::lround(12.0 * std::log2(hz / 440.0)) + 69;
  return static_cast<int>(((midi % 12) + 12) % 12);
}

std::vector<FrameSeries> chroma(const dsp::Spectrogram& power, double f_low) {
  require_kind(power, dsp::SpectrumKind::power, "chroma");
  static constexpr std::array<const char*, kChromaCount> kNames = {
      "C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B"};

  const std::size_t frames = power.num_frames();
  std::vector<int> bin_class(power.num_bins(), -1);
  for (std::size_t k = 0; k < power.num_bins(); ++k) {
    const double f = power.bin_frequencies[k];
    if (f >= f_low && f > 0.0) bin_class[k] = pitch_class(f);
  }

  std::vector<FrameSeries> out(kChromaCount);
  for (std::size_t c = 0; c < kChromaCount; ++c) {
    out[c].name = std::string("chroma_") + kNames[c];
    out[c].values.assign(frames, 0.0);
  }
  for (std::size_t m = 0; m < frames; ++m) {
    std::array<double, kChromaCount> acc{};
    const auto row = power.values.row(m);
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (bin_class[k] >= 0) acc[static_cast<std::size_t>(bin_class[k])] += row[k];
    }
    const double peak = *std::max_element(acc.begin(), acc.end());
    if (peak > 0.0) {
      for (std::size_t c = 0; c < kChromaCount; ++c) out[c].values[m] = acc[c] / peak;
    }
  }
  return out;
}

FrameSeries spectral_centroid(const dsp::Spectrogram& magnitude) {
  require_kind(magnitude, dsp::SpectrumKind::magnitude, "spectral_centroid");
  FrameSeries out{"centroid", std::vector<double>(magnitude.num_frames(), 0.0)};
  for (std::size_t m = 0; m < magnitude.num_frames(); ++m) {
    const auto row = magnitude.values.row(m);
    double weighted = 0.0;
    double total = 0.0;
    for (std::size_t k = 0; k < row.size(); ++k) {
      weighted += magnitude.bin_frequencies[k] * row[k];
      total += row[k];
    }
    if (total > 0.0) out.values[m] = weighted / total;
  }
  return out;
}

FrameSeries spectral_bandwidth(const dsp::Spectrogram& magnitude, const FrameSeries& centroids) {
  require_kind(magnitude, dsp::SpectrumKind::magnitude, "spectral_bandwidth");
  if (centroids.values.size() != magnitude.num_frames()) {
    fail(ErrorCode::LengthMismatch, "centroid series does not match the spectrogram");
  }
  FrameSeries out{"bandwidth", std::vector<double>(magnitude.num_frames(), 0.0)};
  for (std::size_t m = 0; m < magnitude.num_frames(); ++m) {
    const auto row = magnitude.values.row(m);
    const double c = centroids.values[m];
    double weighted = 0.0;
    double total = 0.0;
    for (std::size_t k = 0; k < row.size(); ++k) {
      const double d = magnitude.bin_frequencies[k] - c;
      weighted += d * d * row[k];
      total += row[k];
    }
    if (total > 0.0) out.values[m] = std::sqrt(weighted / total);
  }
  return out;
}

TrackFeatureVector extract_track_features(const audio::AudioClip& clip,
                                          const ExtractorConfig& config) {
  if (clip.duration_seconds() < 1.0) {
    fail(ErrorCode::SignalTooShort, "clip '" + clip.source_id() + "' is shorter than 1 s");
  }
  const double rate = clip.sample_rate();
  const dsp::StftConfig stft_config(config.nfft, config.hop);
  const auto signal = dsp::pre_emphasis(clip.samples(), config.pre_emphasis);

  const auto magnitude = dsp::stft(signal, rate, stft_config);
  const auto power = dsp::power_spectrogram(magnitude);
  const auto bank = dsp::build_mel_filterbank(config.nmels, config.nfft, rate);

  TrackFeatureVector out;
  out.source_id = clip.source_id();
  auto& v = out.values;
  std::size_t i = 0;

  const auto moments = central_moments(signal);
  v[i++] = moments.mean;
  v[i++] = moments.stddev;
  v[i++] = moments.skewness;
  v[i++] = moments.kurtosis;

  const auto zcr = zcr_series(signal, stft_config);
  v[i++] = zcr.mean();
  v[i++] = zcr.stddev();
  const auto energy = rmse_series(signal, stft_config);
  v[i++] = energy.mean();
  v[i++] = energy.stddev();

  // Clips between 1 s and 2 s carry too little periodicity for a tempo
  // estimate; they get the prior centre.
  const TempoConfig tempo_config;
  v[i++] = clip.duration_seconds() >= 2.0
               ? tempo_from_spectrogram(magnitude, rate, config.hop, tempo_config)
               : tempo_config.prior_center_bpm;

  const auto centroid = spectral_centroid(magnitude);
  v[i++] = centroid.mean();
  v[i++] = centroid.stddev();
  const auto bandwidth = spectral_bandwidth(magnitude, centroid);
  v[i++] = bandwidth.mean();
  v[i++] = bandwidth.stddev();

  const auto pitch = chroma(power);
  for (const auto& s : pitch) v[i++] = s.mean();
  for (const auto& s : pitch) v[i++] = s.stddev();

  const auto cepstra = mfcc(power, bank, kMfccCount);
  for (const auto& s : cepstra) v[i++] = s.mean();

  for (double& x : v) {
    if (!std::isfinite(x)) {
      fail(ErrorCode::BadValue, "non-finite feature for '" + clip.source_id() + "'");
    }
  }
  return out;
}

}  // namespace genreforge::features
