// Copyright 2026 The odct Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef ODCT_AUDIO_HPP_
#define ODCT_AUDIO_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace odct {

inline constexpr int kDefaultSampleRate = 16000;

// Mono PCM signal. Samples are nominally in [-1, 1].
struct AudioBuffer {
  std::vector<double> samples;
  int sample_rate = kDefaultSampleRate;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  double duration_seconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

// Throws kInvalidArgument on a non-positive rate or a non-finite sample.
void ValidateAudio(const AudioBuffer& audio);

// Mean of the squared samples; 0 for an empty buffer.
double MeanPower(std::span<const double> samples);

// 16-bit little-endian PCM mono WAV. Samples map to [-1, 1) by division by
// 32768; the writer clamps to [-1, 1 - 2^-15] before quantization.
AudioBuffer DecodeWav(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> EncodeWav(const AudioBuffer& audio);

AudioBuffer ReadWav(const std::filesystem::path& path);
void WriteWav(const std::filesystem::path& path, const AudioBuffer& audio);

}  // namespace odct

#endif  // ODCT_AUDIO_HPP_
