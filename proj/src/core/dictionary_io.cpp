// Copyright 2026 The odct Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include "odct/dictionary.hpp"
#include "odct/error.hpp"

namespace odct {

namespace {

constexpr char kMagic[4] = {'O', 'D', 'C', 'T'};
constexpr std::uint32_t kFormatVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "dictionary I/O assumes a little-endian host");

class Writer {
 public:
  template <typename T>
  void Put(T value) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(&value);
    bytes_.insert(bytes_.end(), p, p + sizeof(T));
  }
  void PutBytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    bytes_.insert(bytes_.end(), p, p + n);
  }
  std::vector<std::uint8_t> Take() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  template <typename T>
  T Get(const char* field) {
    T value;
    std::memcpy(&value, Take(sizeof(T), field), sizeof(T));
    return value;
  }
  const std::uint8_t* Take(std::size_t n, const char* field) {
    if (bytes_.size() - pos_ < n)
      Fail(ErrorCode::kTruncated,
           std::string("dictionary file truncated while reading ") + field);
    const std::uint8_t* p = bytes_.data() + pos_;
    pos_ += n;
    return p;
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::uint32_t CheckedU32(std::size_t v, const char* field) {
  if (v > std::numeric_limits<std::uint32_t>::max())
    Fail(ErrorCode::kInvalidArgument, std::string(field) + " exceeds 32 bits");
  return static_cast<std::uint32_t>(v);
}

}  // namespace

std::vector<std::uint8_t> SerializeDictionary(const Dictionary& dict) {
  const AnalysisInfo& info = dict.info();
  Writer w;
  w.PutBytes(kMagic, 4);
  w.Put<std::uint32_t>(kFormatVersion);
  w.Put<std::uint32_t>(CheckedU32(info.sample_rate, "sample_rate"));
  w.Put<std::uint32_t>(CheckedU32(info.stft.window_len, "window_len"));
  w.Put<std::uint32_t>(CheckedU32(info.stft.hop, "hop"));
  w.Put<std::uint32_t>(CheckedU32(info.stft.fft_size, "fft_size"));
  w.Put<std::uint32_t>(CheckedU32(info.n_bands, "n_bands"));
  w.Put<std::uint32_t>(CheckedU32(info.patch_len, "patch_len"));
  w.Put<std::uint32_t>(CheckedU32(dict.size(), "K"));
  w.Put<double>(info.epsilon_floor);
  w.Put<std::uint64_t>(dict.rng_seed());
  w.Put<std::uint32_t>(CheckedU32(dict.provenance().size(), "provenance"));
  w.PutBytes(dict.provenance().data(), dict.provenance().size());
  w.PutBytes(dict.values().data(), dict.values().size() * sizeof(float));
  return w.Take();
}

Dictionary ParseDictionary(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  if (bytes.size() < 4 || std::memcmp(r.Take(4, "magic"), kMagic, 4) != 0)
    Fail(ErrorCode::kBadMagic, "bad magic: not an ODCT dictionary file");
  const auto version = r.Get<std::uint32_t>("version");
  if (version != kFormatVersion)
    Fail(ErrorCode::kVersionMismatch,
         "unsupported dictionary format version " + std::to_string(version) +
             " (expected " + std::to_string(kFormatVersion) + ")");

  AnalysisInfo info;
  info.sample_rate = static_cast<int>(r.Get<std::uint32_t>("sample_rate"));
  info.stft.window_len = r.Get<std::uint32_t>("window_len");
  info.stft.hop = r.Get<std::uint32_t>("hop");
  info.stft.fft_size = r.Get<std::uint32_t>("fft_size");
  info.stft.window = WindowType::kSqrtHann;
  info.n_bands = r.Get<std::uint32_t>("n_bands");
  info.patch_len = r.Get<std::uint32_t>("patch_len");
  const std::uint32_t k = r.Get<std::uint32_t>("K");
  info.epsilon_floor = r.Get<double>("epsilon_floor");
  const auto seed = r.Get<std::uint64_t>("rng_seed");
  const auto prov_len = r.Get<std::uint32_t>("provenance length");
  const auto* prov = r.Take(prov_len, "provenance");
  std::string provenance(reinterpret_cast<const char*>(prov), prov_len);

  if (k == 0 || info.patch_len == 0 || info.n_bands < 2 ||
      info.n_bands > info.stft.fft_size / 2 + 1 || info.sample_rate <= 0 ||
      !(info.stft.hop > 0 && info.stft.hop <= info.stft.window_len &&
        info.stft.window_len <= info.stft.fft_size))
    Fail(ErrorCode::kInconsistentFile,
         "dictionary header has inconsistent dimensions");
  // Guard the product against overflow before trusting it.
  if (info.patch_len > r.remaining() / sizeof(float) / info.n_bands / k)
    Fail(ErrorCode::kTruncated,
         "dictionary file truncated: header promises more entries than "
         "the file holds");
  const std::size_t n_values =
      static_cast<std::size_t>(k) * info.patch_len * info.n_bands;
  const std::size_t payload = n_values * sizeof(float);
  if (r.remaining() < payload)
    Fail(ErrorCode::kTruncated,
         "dictionary file truncated: expected " + std::to_string(payload) +
             " bytes of entries, found " + std::to_string(r.remaining()));
  if (r.remaining() > payload)
    Fail(ErrorCode::kInconsistentFile,
         "dictionary file has " + std::to_string(r.remaining() - payload) +
             " trailing bytes after the entries");
  std::vector<float> entries(n_values);
  std::memcpy(entries.data(), r.Take(payload, "entries"), payload);
  try {
    return Dictionary(info, std::move(entries), seed, std::move(provenance));
  } catch (const Error& e) {
    Fail(ErrorCode::kInconsistentFile, e.what());
  }
}

void SaveDictionary(const Dictionary& dict, const std::filesystem::path& path) {
  const auto bytes = SerializeDictionary(dict);
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) Fail(ErrorCode::kIo, "write failed for " + path.string());
}

Dictionary LoadDictionary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return ParseDictionary(bytes);
}

}  // namespace odct
