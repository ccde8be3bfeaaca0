#include "genreforge/audio_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "genreforge/error.hpp"

namespace genreforge::audio {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t read_u16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

std::uint32_t read_u32(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) | (static_cast<std::uint32_t>(b[at + 1]) << 8) |
         (static_cast<std::uint32_t>(b[at + 2]) << 16) |
         (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

bool tag_is(std::span<const std::uint8_t> b, std::size_t at, const char* tag) {
  return std::memcmp(b.data() + at, tag, 4) == 0;
}

struct Format {
  std::uint16_t encoding = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits = 0;
};

double decode_sample(std::span<const std::uint8_t> b, std::size_t at, const Format& fmt) {
  if (fmt.encoding == kFormatFloat) {
    if (fmt.bits == 32) {
      const float v = std::bit_cast<float>(read_u32(b, at));
      return std::clamp(static_cast<double>(v), -1.0, 1.0);
    }
    std::uint64_t raw = 0;
    for (int i = 7; i >= 0; --i) raw = (raw << 8) | b[at + i];
    return std::clamp(std::bit_cast<double>(raw), -1.0, 1.0);
  }
  switch (fmt.bits) {
    case 8:  // unsigned, offset binary
      return (static_cast<int>(b[at]) - 128) / 128.0;
    case 16:
      return static_cast<std::int16_t>(read_u16(b, at)) / 32768.0;
    case 24: {
      std::int32_t v = static_cast<std::int32_t>(b[at] | (b[at + 1] << 8) | (b[at + 2] << 16));
      if (v & 0x800000) v -= 0x1000000;
      return v / 8388608.0;
    }
    case 32:
      return static_cast<std::int32_t>(read_u32(b, at)) / 2147483648.0;
    default:
      break;
  }
  fail(ErrorCode::UnsupportedEncoding, "unsupported PCM bit depth " + std::to_string(fmt.bits));
}

}  // namespace

AudioClip::AudioClip(std::vector<double> samples, std::uint32_t sample_rate,
                     std::string source_id)
    : samples_(std::move(samples)), sample_rate_(sample_rate), source_id_(std::move(source_id)) {
  if (sample_rate_ == 0) fail(ErrorCode::InvalidArgument, "sample rate must be positive");
  if (samples_.empty()) fail(ErrorCode::EmptyAudio, "audio clip has no samples");
  for (double s : samples_) {
    if (!(s >= -1.0 && s <= 1.0)) {
      fail(ErrorCode::InvalidArgument, "sample outside [-1, 1] in '" + source_id_ + "'");
    }
  }
}

AudioClip decode_wav(std::span<const std::uint8_t> bytes, std::string source_id) {
  if (bytes.size() < 12 || !tag_is(bytes, 0, "RIFF") || !tag_is(bytes, 8, "WAVE")) {
    fail(ErrorCode::MalformedContainer, "missing RIFF/WAVE magic");
  }

  Format fmt;
  bool have_fmt = false;
  std::span<const std::uint8_t> data;
  bool have_data = false;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint32_t chunk_size = read_u32(bytes, pos + 4);
    const std::size_t body = pos + 8;
    if (chunk_size > bytes.size() - body) {
      fail(ErrorCode::MalformedContainer, "chunk extends past end of file");
    }
    if (tag_is(bytes, pos, "fmt ")) {
      if (chunk_size < 16) fail(ErrorCode::MalformedContainer, "fmt chunk too small");
      fmt.encoding = read_u16(bytes, body);
      fmt.channels = read_u16(bytes, body + 2);
      fmt.sample_rate = read_u32(bytes, body + 4);
      fmt.bits = read_u16(bytes, body + 14);
      if (fmt.encoding == kFormatExtensible) {
        if (chunk_size < 40) fail(ErrorCode::MalformedContainer, "extensible fmt chunk too small");
        // First two bytes of the sub-format GUID carry the real format tag.
        fmt.encoding = read_u16(bytes, body + 24);
      }
      have_fmt = true;
    } else if (tag_is(bytes, pos, "data")) {
      data = bytes.subspan(body, chunk_size);
      have_data = true;
    }
    pos = body + chunk_size + (chunk_size & 1u);
  }

  if (!have_fmt || !have_data) fail(ErrorCode::MalformedContainer, "missing fmt or data chunk");
  if (fmt.encoding != kFormatPcm && fmt.encoding != kFormatFloat) {
    fail(ErrorCode::UnsupportedEncoding,
         "unsupported WAVE format tag " + std::to_string(fmt.encoding));
  }
  if (fmt.encoding == kFormatFloat && fmt.bits != 32 && fmt.bits != 64) {
    fail(ErrorCode::UnsupportedEncoding, "unsupported float width " + std::to_string(fmt.bits));
  }
  if (fmt.channels == 0 || fmt.sample_rate == 0 || fmt.bits == 0 || fmt.bits % 8 != 0) {
    fail(ErrorCode::MalformedContainer, "invalid fmt chunk fields");
  }

  const std::size_t bytes_per_sample = fmt.bits / 8;
  const std::size_t frame_bytes = bytes_per_sample * fmt.channels;
  const std::size_t frames = data.size() / frame_bytes;
  if (frames == 0) fail(ErrorCode::EmptyAudio, "data chunk holds no complete frame");

  std::vector<double> mono(frames);
  for (std::size_t f = 0; f < frames; ++f) {
    double acc = 0.0;
    for (std::size_t c = 0; c < fmt.channels; ++c) {
      acc += decode_sample(data, f * frame_bytes + c * bytes_per_sample, fmt);
    }
    mono[f] = acc / fmt.channels;
  }
  return AudioClip(std::move(mono), fmt.sample_rate, std::move(source_id));
}

AudioClip read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoFailure, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_wav(bytes, path.filename().string());
}

std::vector<std::uint8_t> encode_wav_pcm16(std::span<const double> samples,
                                           std::uint32_t sample_rate) {
  std::vector<std::uint8_t> out;
  const auto data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
  out.reserve(44 + data_bytes);
  auto put_tag = [&](const char* t) { out.insert(out.end(), t, t + 4); };
  auto put_u16 = [&](std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
  };
  auto put_u32 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
  };

  put_tag("RIFF");
  put_u32(36 + data_bytes);
  put_tag("WAVE");
  put_tag("fmt ");
  put_u32(16);
  put_u16(kFormatPcm);
  put_u16(1);
  put_u32(sample_rate);
  put_u32(sample_rate * 2);
  put_u16(2);
  put_u16(16);
  put_tag("data");
  put_u32(data_bytes);
  for (double s : samples) {
    const double scaled = std::round(std::clamp(s, -1.0, 1.0) * 32768.0);
    const auto code = static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
    put_u16(static_cast<std::uint16_t>(code));
  }
  return out;
}

void write_wav_pcm16(const std::filesystem::path& path, std::span<const double> samples,
                     std::uint32_t sample_rate) {
  const auto bytes = encode_wav_pcm16(samples, sample_rate);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoFailure, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::IoFailure, "short write to " + path.string());
}

std::vector<AudioClip> segment_clip(const AudioClip& clip, double segment_seconds) {
  const double span = segment_seconds * clip.sample_rate();
  if (!(segment_seconds > 0.0) || span < 1.0) {
    fail(ErrorCode::InvalidArgument, "segment length must cover at least one sample");
  }
  const auto seg_len = static_cast<std::size_t>(std::floor(span));
  const std::size_t count = clip.size() / seg_len;

  std::vector<AudioClip> out;
  out.reserve(count);
  const auto samples = clip.samples();
  for (std::size_t i = 0; i < count; ++i) {
    auto first = samples.begin() + static_cast<std::ptrdiff_t>(i * seg_len);
    out.emplace_back(std::vector<double>(first, first + static_cast<std::ptrdiff_t>(seg_len)),
                     clip.sample_rate(),
                     clip.source_id() + kSegmentSeparator + std::to_string(i));
  }
  return out;
}

std::string parent_source_id(const std::string& source_id) {
  const auto pos = source_id.rfind(kSegmentSeparator);
  if (pos == std::string::npos) return source_id;
  const auto suffix = std::string_view(source_id).substr(pos + 1);
  if (suffix.empty() ||
      !std::all_of(suffix.begin(), suffix.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    return source_id;
  }
  return source_id.substr(0, pos);
}

}  // namespace genreforge::audio
