#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace genreforge::audio {

/// Decoded mono PCM. Samples are in [-1, 1]; the rate is whatever the
/// container declared (no resampling happens anywhere in the pipeline).
class AudioClip {
 public:
  AudioClip() = default;
  /// Throws InvalidArgument if the rate is zero, the buffer is empty, or any
  /// sample lies outside [-1, 1].
  AudioClip(std::vector<double> samples, std::uint32_t sample_rate,
            std::string source_id = {});

  std::span<const double> samples() const noexcept { return samples_; }
  std::uint32_t sample_rate() const noexcept { return sample_rate_; }
  const std::string& source_id() const noexcept { return source_id_; }
  std::size_t size() const noexcept { return samples_.size(); }
  double duration_seconds() const noexcept {
    return static_cast<double>(samples_.size()) / sample_rate_;
  }

 private:
  std::vector<double> samples_;
  std::uint32_t sample_rate_ = 0;
  std::string source_id_;
};

/// Decodes a RIFF/WAVE byte buffer. Integer PCM (8/16/24/32-bit) is scaled
/// by 1 / 2^(bits-1); 32/64-bit IEEE float is taken as-is and clamped to
/// [-1, 1]. Channels are averaged per frame.
AudioClip decode_wav(std::span<const std::uint8_t> bytes, std::string source_id = {});

AudioClip read_wav(const std::filesystem::path& path);

/// Encodes mono 16-bit PCM. Used by tests and the synthetic-corpus tooling;
/// samples are clamped then rounded to the nearest code.
std::vector<std::uint8_t> encode_wav_pcm16(std::span<const double> samples,
                                           std::uint32_t sample_rate);

void write_wav_pcm16(const std::filesystem::path& path, std::span<const double> samples,
                     std::uint32_t sample_rate);

/// Separator between a parent source id and a segment index.
inline constexpr char kSegmentSeparator = '#';

/// Cuts a clip into floor(len / (seconds * rate)) back-to-back segments and
/// drops the short tail. Child ids are "<parent>#<index>".
std::vector<AudioClip> segment_clip(const AudioClip& clip, double segment_seconds);

/// Strips a trailing "#<index>" segment suffix, if present.
std::string parent_source_id(const std::string& source_id);

}  // namespace genreforge::audio
