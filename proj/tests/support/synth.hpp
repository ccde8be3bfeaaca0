#pragma once

// Synthetic signals and a tiny on-disk corpus in the <root>/<genre>/<file>.wav
// layout, for tests that need audio without the real dataset.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "genreforge/audio_io.hpp"
#include "genreforge/genre.hpp"

namespace synth {

inline std::vector<double> sine(double hz, double seconds, double rate = 22050.0, double amplitude = 0.5,
                                double phase = 0.0) {
  const auto n = static_cast<std::size_t>(std::llround(seconds * rate));
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = amplitude * std::sin(2.0 * std::numbers::pi * hz * static_cast<double>(i) / rate + phase);
  }
  return x;
}

/// Unit impulses every 60/bpm seconds.
inline std::vector<double> click_track(double bpm, double seconds, double rate = 22050.0) {
  const auto n = static_cast<std::size_t>(std::llround(seconds * rate));
  std::vector<double> x(n, 0.0);
  const double period = 60.0 / bpm * rate;
  for (double t = 0.0; t < static_cast<double>(n); t += period) x[static_cast<std::size_t>(std::llround(t)) % n] = 1.0;
  return x;
}

inline std::vector<double> uniform(std::size_t n, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> x(n);
  for (auto& v : x) v = d(gen);
  return x;
}

/// A genre-dependent texture: a tone whose pitch, click tempo and noise level
/// vary with the genre index so that the classes are learnable.
inline std::vector<double> genre_texture(int genre, int take, double seconds, double rate = 22050.0) {
  std::mt19937_64 gen(static_cast<std::uint64_t>(genre * 1000 + take));
  std::normal_distribution<double> normal;
  const auto n = static_cast<std::size_t>(std::llround(seconds * rate));
  const double f0 = 110.0 * std::pow(2.0, genre / 4.0) * (1.0 + 0.01 * take);
  const double bpm = 70.0 + 12.0 * genre;
  const double hiss = 0.02 + 0.02 * (genre % 3);
  const double period = 60.0 / bpm * rate;
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate;
    const double beat = std::fmod(static_cast<double>(i), period) < 0.01 * rate ? 0.3 : 0.0;
    double v = 0.3 * std::sin(2.0 * std::numbers::pi * f0 * t) + 0.1 * std::sin(2.0 * std::numbers::pi * 2.0 * f0 * t) +
               hiss * normal(gen) + beat * normal(gen);
    x[i] = std::clamp(v, -1.0, 1.0);
  }
  return x;
}

/// Writes files_per_genre clips for each genre and returns the root.
inline std::filesystem::path write_corpus(const std::filesystem::path& root, int files_per_genre, double seconds,
                                          int genres = static_cast<int>(genreforge::kGenreCount)) {
  std::filesystem::create_directories(root);
  for (int g = 0; g < genres; ++g) {
    const std::string name(genreforge::kGenreNames[static_cast<std::size_t>(g)]);
    std::filesystem::create_directories(root / name);
    for (int k = 0; k < files_per_genre; ++k) {
      char file[64];
      std::snprintf(file, sizeof file, "%s.%05d.wav", name.c_str(), k);
      genreforge::audio::write_wav_pcm16(root / name / file, genre_texture(g, k, seconds), 22050);
    }
  }
  return root;
}

/// Fresh, empty scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() / ("genreforge_test_" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace synth
