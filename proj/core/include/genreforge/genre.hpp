#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace genreforge {

inline constexpr std::size_t kGenreCount = 10;

/// The ten GTZAN genres. Codes are fixed and appear in every serialized
/// artifact.
enum class GenreLabel : std::uint8_t {
  blues = 0,
  classical,
  country,
  disco,
  hiphop,
  jazz,
  metal,
  pop,
  reggae,
  rock,
};

inline constexpr std::array<std::string_view, kGenreCount> kGenreNames = {
    "blues", "classical", "country", "disco", "hiphop",
    "jazz",  "metal",     "pop",     "reggae", "rock"};

constexpr std::string_view genre_name(GenreLabel g) noexcept {
  return kGenreNames[static_cast<std::size_t>(g)];
}

constexpr int genre_code(GenreLabel g) noexcept { return static_cast<int>(g); }

constexpr std::optional<GenreLabel> genre_from_code(int code) noexcept {
  if (code < 0 || code >= static_cast<int>(kGenreCount)) return std::nullopt;
  return static_cast<GenreLabel>(code);
}

constexpr std::optional<GenreLabel> genre_from_name(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kGenreCount; ++i) {
    if (kGenreNames[i] == name) return static_cast<GenreLabel>(i);
  }
  return std::nullopt;
}

}  // namespace genreforge
