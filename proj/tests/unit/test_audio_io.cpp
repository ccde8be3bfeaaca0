#include <catch2/catch_amalgamated.hpp>

#include <cstring>

#include "genreforge/audio_io.hpp"
#include "genreforge/error.hpp"
#include "synth.hpp"

using namespace genreforge;
using Catch::Matchers::WithinAbs;

namespace {

void put_u16(std::vector<std::uint8_t>& b, std::uint16_t v) {
  b.push_back(static_cast<std::uint8_t>(v & 0xff));
  b.push_back(static_cast<std::uint8_t>(v >> 8));
}
void put_u32(std::vector<std::uint8_t>& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}
void put_tag(std::vector<std::uint8_t>& b, const char* tag) { b.insert(b.end(), tag, tag + 4); }

// Hand-assembled RIFF/WAVE container around an arbitrary data payload.
std::vector<std::uint8_t> wav(std::uint16_t format, std::uint16_t channels, std::uint32_t rate,
                              std::uint16_t bits, const std::vector<std::uint8_t>& payload) {
  std::vector<std::uint8_t> b;
  put_tag(b, "RIFF");
  put_u32(b, static_cast<std::uint32_t>(4 + 8 + 16 + 8 + payload.size()));
  put_tag(b, "WAVE");
  put_tag(b, "fmt ");
  put_u32(b, 16);
  put_u16(b, format);
  put_u16(b, channels);
  put_u32(b, rate);
  put_u32(b, rate * channels * bits / 8);
  put_u16(b, static_cast<std::uint16_t>(channels * bits / 8));
  put_u16(b, bits);
  put_tag(b, "data");
  put_u32(b, static_cast<std::uint32_t>(payload.size()));
  b.insert(b.end(), payload.begin(), payload.end());
  return b;
}

std::vector<std::uint8_t> pcm16(std::initializer_list<std::int16_t> values) {
  std::vector<std::uint8_t> p;
  for (auto v : values) put_u16(p, static_cast<std::uint16_t>(v));
  return p;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("16-bit sample 16384 decodes to 0.5") {
  const auto clip = audio::decode_wav(wav(1, 1, 22050, 16, pcm16({16384})));
  REQUIRE(clip.size() == 1);
  CHECK(clip.samples()[0] == 0.5);
  CHECK(clip.sample_rate() == 22050);
}

TEST_CASE("rails map by 2^(bits-1)") {
  const auto clip = audio::decode_wav(wav(1, 1, 8000, 16, pcm16({-32768, 32767})));
  CHECK(clip.samples()[0] == -1.0);
  CHECK(clip.samples()[1] == 32767.0 / 32768.0);
}

TEST_CASE("stereo frames average to mono") {
  // 0.2 and 0.6 as 32-bit float
  std::vector<std::uint8_t> p(8);
  const float l = 0.2f, r = 0.6f;
  std::memcpy(p.data(), &l, 4);
  std::memcpy(p.data() + 4, &r, 4);
  const auto clip = audio::decode_wav(wav(3, 2, 44100, 32, p));
  REQUIRE(clip.size() == 1);
  CHECK_THAT(clip.samples()[0], WithinAbs(0.4, 1e-7));
}

TEST_CASE("8-bit unsigned and 24-bit PCM decode") {
  const auto c8 = audio::decode_wav(wav(1, 1, 8000, 8, {0, 128, 192}));
  CHECK(c8.samples()[0] == -1.0);
  CHECK(c8.samples()[1] == 0.0);
  CHECK(c8.samples()[2] == 0.5);

  // 0x400000 = 2^22 -> 0.5
  const auto c24 = audio::decode_wav(wav(1, 1, 8000, 24, {0x00, 0x00, 0x40, 0x00, 0x00, 0xc0}));
  CHECK(c24.samples()[0] == 0.5);
  CHECK(c24.samples()[1] == -0.5);
}

TEST_CASE("malformed and unsupported containers") {
  auto good = wav(1, 1, 22050, 16, pcm16({1, 2, 3, 4}));

  auto truncated = good;
  truncated.resize(truncated.size() - 3);
  CHECK(code_of([&] { audio::decode_wav(truncated); }) == ErrorCode::MalformedContainer);

  auto bad_magic = good;
  bad_magic[0] = 'X';
  CHECK(code_of([&] { audio::decode_wav(bad_magic); }) == ErrorCode::MalformedContainer);

  CHECK(code_of([&] { audio::decode_wav(std::vector<std::uint8_t>{}); }) == ErrorCode::MalformedContainer);

  // format tag 2 = ADPCM
  CHECK(code_of([&] { audio::decode_wav(wav(2, 1, 22050, 4, {0, 0})); }) == ErrorCode::UnsupportedEncoding);

  CHECK(code_of([&] { audio::decode_wav(wav(1, 1, 22050, 16, {})); }) == ErrorCode::EmptyAudio);
}

TEST_CASE("AudioClip rejects samples outside [-1, 1] and a zero rate") {
  CHECK_THROWS_AS(audio::AudioClip({0.0, 1.5}, 22050, "x"), Error);
  CHECK_THROWS_AS(audio::AudioClip({0.0}, 0, "x"), Error);
}

TEST_CASE("pcm16 encode/decode round trip within one LSB") {
  const auto x = synth::uniform(5000, 3);
  const auto clip = audio::decode_wav(audio::encode_wav_pcm16(x, 16000));
  REQUIRE(clip.size() == x.size());
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(clip.samples()[i] - x[i]) <= 1.0 / 32768.0);
}

TEST_CASE("read_wav uses the file name as source id") {
  const auto dir = synth::scratch_dir("audio_io");
  audio::write_wav_pcm16(dir / "blues.00001.wav", synth::sine(440, 0.1), 22050);
  const auto clip = audio::read_wav(dir / "blues.00001.wav");
  CHECK(clip.source_id() == "blues.00001.wav");
  CHECK(clip.size() == 2205);
  CHECK(code_of([&] { audio::read_wav(dir / "missing.wav"); }) == ErrorCode::IoFailure);
}

TEST_CASE("segment_clip floor semantics") {
  SECTION("30 s at 22050 Hz -> 10 x 66150") {
    const audio::AudioClip clip(std::vector<double>(30 * 22050, 0.1), 22050, "a.wav");
    const auto segs = audio::segment_clip(clip, 3.0);
    REQUIRE(segs.size() == 10);
    for (const auto& s : segs) CHECK(s.size() == 66150);
    CHECK(segs[0].source_id() == "a.wav#0");
    CHECK(segs[9].source_id() == "a.wav#9");
  }
  SECTION("3 s clip -> one identical segment") {
    const auto x = synth::uniform(3 * 22050, 1);
    const audio::AudioClip clip(x, 22050, "b");
    const auto segs = audio::segment_clip(clip, 3.0);
    REQUIRE(segs.size() == 1);
    CHECK(std::equal(x.begin(), x.end(), segs[0].samples().begin()));
  }
  SECTION("29.5 s -> 9 segments, concatenation is a prefix") {
    const auto x = synth::uniform(static_cast<std::size_t>(29.5 * 22050), 2);
    const audio::AudioClip clip(x, 22050, "c");
    const auto segs = audio::segment_clip(clip, 3.0);
    REQUIRE(segs.size() == 9);
    std::size_t pos = 0;
    for (const auto& s : segs) {
      for (double v : s.samples()) REQUIRE(v == x[pos++]);
    }
  }
  SECTION("segment shorter than a sample is rejected") {
    const audio::AudioClip clip(std::vector<double>(10, 0.0), 100, "d");
    CHECK_THROWS_AS(audio::segment_clip(clip, 0.001), Error);
  }
}

TEST_CASE("parent_source_id strips a numeric segment suffix only") {
  CHECK(audio::parent_source_id("rock.00001.wav#7") == "rock.00001.wav");
  CHECK(audio::parent_source_id("rock.00001.wav") == "rock.00001.wav");
  CHECK(audio::parent_source_id("odd#name") == "odd#name");
}
