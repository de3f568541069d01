// Copyright 2026 The odct Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "odct/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "odct/error.hpp"

namespace odct {

void ValidateAudio(const AudioBuffer& audio) {
  if (audio.sample_rate <= 0)
    Fail(ErrorCode::kInvalidArgument,
         "sample rate must be positive, got " +
             std::to_string(audio.sample_rate));
  for (double s : audio.samples) {
    if (!std::isfinite(s))
      Fail(ErrorCode::kInvalidArgument, "audio contains non-finite samples");
  }
}

double MeanPower(std::span<const double> samples) {
  if (samples.empty()) return 0.0;
  double acc = 0.0;
  for (double s : samples) acc += s * s;
  return acc / static_cast<double>(samples.size());
}

namespace {

std::uint32_t ReadU32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t ReadU16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void PutU32(std::vector<std::uint8_t>* out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back((v >> (8 * i)) & 0xff);
}

void PutU16(std::vector<std::uint8_t>* out, std::uint16_t v) {
  out->push_back(v & 0xff);
  out->push_back((v >> 8) & 0xff);
}

void PutTag(std::vector<std::uint8_t>* out, const char* tag) {
  out->insert(out->end(), tag, tag + 4);
}

}  // namespace

AudioBuffer DecodeWav(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    Fail(ErrorCode::kUnsupportedFormat, "not a RIFF/WAVE file");

  bool have_fmt = false;
  int rate = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t* chunk = bytes.data() + pos;
    const std::uint32_t chunk_size = ReadU32(chunk + 4);
    const std::size_t body = pos + 8;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (chunk_size < 16 || body + 16 > bytes.size())
        Fail(ErrorCode::kTruncated, "truncated fmt chunk");
      const std::uint8_t* f = bytes.data() + body;
      const std::uint16_t format = ReadU16(f);
      const std::uint16_t channels = ReadU16(f + 2);
      const std::uint16_t bits = ReadU16(f + 14);
      // 0xFFFE is WAVE_FORMAT_EXTENSIBLE; accepted when it carries 16-bit PCM.
      if ((format != 1 && format != 0xFFFE) || bits != 16)
        Fail(ErrorCode::kUnsupportedFormat, "only 16-bit PCM WAV is supported");
      if (channels != 1)
        Fail(ErrorCode::kUnsupportedFormat,
             "only mono WAV is supported, got " + std::to_string(channels) +
                 " channels");
      rate = static_cast<int>(ReadU32(f + 4));
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (!have_fmt) Fail(ErrorCode::kUnsupportedFormat, "data before fmt chunk");
      // Streams written without a final size carry 0 or 0xFFFFFFFF here.
      std::size_t n_bytes = chunk_size;
      if (body + n_bytes > bytes.size()) {
        if (chunk_size != 0 && chunk_size != 0xFFFFFFFFu)
          Fail(ErrorCode::kTruncated, "truncated data chunk");
        n_bytes = bytes.size() - body;
      }
      AudioBuffer audio;
      audio.sample_rate = rate;
      audio.samples.resize(n_bytes / 2);
      for (std::size_t i = 0; i < audio.samples.size(); ++i) {
        const auto v =
            static_cast<std::int16_t>(ReadU16(bytes.data() + body + 2 * i));
        audio.samples[i] = static_cast<double>(v) / 32768.0;
      }
      ValidateAudio(audio);
      return audio;
    }
    pos = body + chunk_size + (chunk_size & 1u);
  }
  Fail(ErrorCode::kTruncated, "no data chunk");
}

std::vector<std::uint8_t> EncodeWav(const AudioBuffer& audio) {
  ValidateAudio(audio);
  const auto data_bytes = static_cast<std::uint32_t>(audio.samples.size() * 2);
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  PutTag(&out, "RIFF");
  PutU32(&out, 36 + data_bytes);
  PutTag(&out, "WAVE");
  PutTag(&out, "fmt ");
  PutU32(&out, 16);
  PutU16(&out, 1);  // PCM
  PutU16(&out, 1);  // mono
  PutU32(&out, static_cast<std::uint32_t>(audio.sample_rate));
  PutU32(&out, static_cast<std::uint32_t>(audio.sample_rate) * 2);
  PutU16(&out, 2);
  PutU16(&out, 16);
  PutTag(&out, "data");
  PutU32(&out, data_bytes);
  constexpr double kMax = 1.0 - 1.0 / 32768.0;
  for (double s : audio.samples) {
    const double clamped = std::clamp(s, -1.0, kMax);
    const auto q = static_cast<std::int16_t>(std::lround(clamped * 32768.0));
    PutU16(&out, static_cast<std::uint16_t>(q));
  }
  return out;
}

AudioBuffer ReadWav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return DecodeWav(bytes);
  } catch (const Error& e) {
    Fail(e.code(), path.string() + ": " + e.what());
  }
}

void WriteWav(const std::filesystem::path& path, const AudioBuffer& audio) {
  const auto bytes = EncodeWav(audio);
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) Fail(ErrorCode::kIo, "write failed for " + path.string());
}

}  // namespace odct
