// Copyright 2026 The odct Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Runs the odct executable as a subprocess. Input WAVs are produced through
// the C API so the binary is the only thing under test.

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "odct/odct.h"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run Exec(const std::string& args) {
  const std::string cmd = std::string(ODCT_CLI_PATH) + " " + args + " 2>&1";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[512];
  while (std::fgets(buf, sizeof buf, p)) r.out += buf;
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::vector<char> Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void WriteWav(const fs::path& path, const std::vector<double>& x, int rate = 16000) {
  odct_audio* a = nullptr;
  REQUIRE(odct_audio_create(x.data(), x.size(), rate, &a) == ODCT_OK);
  REQUIRE(odct_audio_write_wav(a, path.string().c_str()) == ODCT_OK);
  odct_audio_free(a);
}

std::vector<double> ReadWav(const fs::path& path) {
  odct_audio* a = nullptr;
  REQUIRE(odct_audio_read_wav(path.string().c_str(), &a) == ODCT_OK);
  std::vector<double> x(odct_audio_samples(a), odct_audio_samples(a) + odct_audio_length(a));
  odct_audio_free(a);
  return x;
}

std::vector<double> Voiced(std::size_t n, double f0, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-0.002, 0.002);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / 16000.0;
    for (int h = 1; h <= 12; ++h) x[i] += 0.04 / h * std::sin(2.0 * std::numbers::pi * f0 * h * t);
    x[i] *= 0.6 + 0.4 * std::sin(2.0 * std::numbers::pi * 2.5 * t);
    x[i] += u(rng);
  }
  return x;
}

std::vector<double> Noise(std::size_t n, unsigned seed, double sd) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> d(0.0, sd);
  std::vector<double> x(n);
  for (double& v : x) v = d(rng);
  return x;
}

// Value of "key=..." in the output, or empty.
std::string Field(const std::string& out, const std::string& key) {
  const auto pos = out.find(key + "=");
  if (pos == std::string::npos) return {};
  const auto start = pos + key.size() + 1;
  return out.substr(start, out.find('\n', start) - start);
}

struct Workspace {
  fs::path root;
  Workspace() {
    root = fs::temp_directory_path() / ("odct_cli_" + std::to_string(::getpid()));
    fs::remove_all(root);
    fs::create_directories(root / "corpus");
    WriteWav(root / "corpus" / "a.wav", Voiced(16000, 110.0, 1));
    WriteWav(root / "corpus" / "b.wav", Voiced(16000, 170.0, 2));
    WriteWav(root / "corpus" / "c.wav", Voiced(16000, 230.0, 3));
    WriteWav(root / "clean.wav", Voiced(16000, 140.0, 4));
    WriteWav(root / "noise.wav", Noise(20000, 5, 0.02));
  }
  ~Workspace() { fs::remove_all(root); }
  std::string P(const std::string& name) const { return (root / name).string(); }
};

}  // namespace

TEST_CASE("train writes a dictionary with the requested size") {
  Workspace ws;
  const Run r = Exec("train " + ws.P("corpus") + " " + ws.P("d1.odct") + " -K 4 --seed 3");
  INFO(r.out);
  REQUIRE(r.code == 0);
  CHECK(Field(r.out, "files") == "3");
  CHECK(Field(r.out, "entries") == "4");
  CHECK(!Field(r.out, "final_objective").empty());
  odct_dictionary* d = nullptr;
  REQUIRE(odct_dictionary_load(ws.P("d1.odct").c_str(), &d) == ODCT_OK);
  odct_dictionary_info info;
  odct_dictionary_get_info(d, &info);
  CHECK(info.n_entries == 4);
  CHECK(info.patch_len == 2);
  CHECK(info.n_bands == 60);
  odct_dictionary_free(d);

  REQUIRE(Exec("train " + ws.P("corpus") + " " + ws.P("d2.odct") + " -K 4 --seed 3").code == 0);
  CHECK(Slurp(ws.P("d1.odct")) == Slurp(ws.P("d2.odct")));
}

TEST_CASE("train guards") {
  Workspace ws;
  const Run big = Exec("train " + ws.P("corpus") + " " + ws.P("x.odct") + " -K 5000 --patches 5000");
  CHECK(big.code == 2);
  CHECK(big.out.find("5000") != std::string::npos);
  CHECK(!fs::exists(ws.P("x.odct")));

  fs::create_directories(ws.P("empty"));
  CHECK(Exec("train " + ws.P("empty") + " " + ws.P("x.odct") + " -K 2").code == 2);

  // A wrong-rate file is skipped with a warning.
  WriteWav(ws.root / "corpus" / "d.wav", Voiced(8000, 120.0, 9), 8000);
  const Run skip = Exec("train " + ws.P("corpus") + " " + ws.P("y.odct") + " -K 4");
  CHECK(skip.code == 0);
  CHECK(skip.out.find("warning") != std::string::npos);
  CHECK(Field(skip.out, "files") == "3");

  CHECK(Exec("train " + ws.P("corpus") + " " + ws.P("z.odct") + " -L 2 -M 2").code == 1);
  CHECK(Exec("train").code == 1);
  CHECK(Exec("bogus").code == 1);
}

TEST_CASE("enhance keeps length, honours the threshold and mode") {
  Workspace ws;
  REQUIRE(Exec("train " + ws.P("corpus") + " " + ws.P("d.odct") + " -K 4").code == 0);
  REQUIRE(Exec("mix " + ws.P("clean.wav") + " " + ws.P("noise.wav") + " 5 " + ws.P("noisy.wav")).code == 0);

  const Run r = Exec("enhance " + ws.P("noisy.wav") + " " + ws.P("d.odct") + " " + ws.P("out.wav") +
                     " --diagnostics " + ws.P("diag.txt"));
  INFO(r.out);
  REQUIRE(r.code == 0);
  const auto in = ReadWav(ws.P("noisy.wav"));
  const auto out = ReadWav(ws.P("out.wav"));
  CHECK(out.size() == in.size());
  std::ifstream diag(ws.P("diag.txt"));
  std::string first;
  std::getline(diag, first);
  CHECK(first.rfind("start_frame=0 entry=", 0) == 0);

  REQUIRE(Exec("enhance " + ws.P("noisy.wav") + " " + ws.P("d.odct") + " " + ws.P("id.wav") + " -c 0").code == 0);
  const auto id = ReadWav(ws.P("id.wav"));
  double worst = 0.0;
  for (std::size_t i = 0; i < in.size(); ++i) worst = std::max(worst, std::abs(in[i] - id[i]));
  CHECK(worst <= 1.0 / 32768.0);  // at most one quantization step

  const Run vq = Exec("enhance " + ws.P("noisy.wav") + " " + ws.P("d.odct") + " " + ws.P("vq.wav") + " --mode vq");
  CHECK(vq.code == 0);
  CHECK(Field(vq.out, "mode") == "vq");

  CHECK(Exec("enhance " + ws.P("noisy.wav") + " " + ws.P("d.odct") + " " + ws.P("bad.wav") + " --mode nope").code == 1);
  CHECK(Exec("enhance " + ws.P("noisy.wav") + " " + ws.P("d.odct") + " " + ws.P("bad.wav") + " -c 2").code == 1);
  CHECK(!fs::exists(ws.P("bad.wav")));

  WriteWav(ws.root / "eight.wav", Voiced(8000, 120.0, 2), 8000);
  const Run rate = Exec("enhance " + ws.P("eight.wav") + " " + ws.P("d.odct") + " " + ws.P("bad.wav"));
  CHECK(rate.code == 2);
  CHECK(rate.out.find("8000") != std::string::npos);
  CHECK(rate.out.find("16000") != std::string::npos);

  CHECK(Exec("enhance " + ws.P("noisy.wav") + " " + ws.P("noisy.wav") + " " + ws.P("bad.wav")).code == 2);
}

TEST_CASE("eval and mix") {
  Workspace ws;
  const Run self = Exec("eval " + ws.P("clean.wav") + " " + ws.P("clean.wav") + " --report " + ws.P("r.json"));
  REQUIRE(self.code == 0);
  CHECK(Field(self.out, "segSNR") == "35.00");
  CHECK(Field(self.out, "fwSegSNR") == "35.00");
  CHECK(fs::file_size(ws.P("r.json")) > 0);

  // Equal-power noise at 0 dB needs no scaling.
  const auto clean = ReadWav(ws.P("clean.wav"));
  double pc = 0.0;
  for (double v : clean) pc += v * v;
  auto n = Noise(clean.size(), 7, 1.0);
  double pn = 0.0;
  for (double v : n) pn += v * v;
  for (double& v : n) v *= std::sqrt(pc / pn);
  WriteWav(ws.root / "eq.wav", n);
  const Run mix = Exec("mix " + ws.P("clean.wav") + " " + ws.P("eq.wav") + " 0 " + ws.P("m.wav"));
  REQUIRE(mix.code == 0);
  CHECK(std::abs(std::stod(Field(mix.out, "noise_scale")) - 1.0) < 1e-3);

  double prev = 1e9;
  for (int snr : {20, 10, 0, -5}) {
    const std::string out = ws.P("m" + std::to_string(snr + 10) + ".wav");
    REQUIRE(Exec("mix " + ws.P("clean.wav") + " " + ws.P("noise.wav") + " " + std::to_string(snr) + " " + out +
                 " --seed 4").code == 0);
    const Run e = Exec("eval " + ws.P("clean.wav") + " " + out);
    const double seg = std::stod(Field(e.out, "segSNR"));
    CHECK(seg < prev);
    prev = seg;
  }
  CHECK(Exec("eval " + ws.P("clean.wav") + " " + ws.P("missing.wav")).code == 2);
}

TEST_CASE("config file values yield to flags") {
  Workspace ws;
  {
    std::ofstream cfg(ws.P("train.cfg"));
    cfg << "# training\nentries=3\nseed = 9\n";
  }
  const Run a = Exec("train " + ws.P("corpus") + " " + ws.P("c.odct") + " --config " + ws.P("train.cfg"));
  INFO(a.out);
  REQUIRE(a.code == 0);
  CHECK(Field(a.out, "entries") == "3");
  const Run b = Exec("train " + ws.P("corpus") + " " + ws.P("c2.odct") + " --config " + ws.P("train.cfg") + " -K 5");
  REQUIRE(b.code == 0);
  CHECK(Field(b.out, "entries") == "5");
  CHECK(Exec("train " + ws.P("corpus") + " " + ws.P("c3.odct") + " --config " + ws.P("nope.cfg")).code == 1);
}

TEST_CASE("distort prints a table") {
  Workspace ws;
  REQUIRE(Exec("train " + ws.P("corpus") + " " + ws.P("d.odct") + " -K 4").code == 0);
  const Run r = Exec("distort --clean " + ws.P("clean.wav") + " --noise " + ws.P("noise.wav") +
                     " --snr 0,10 --dict " + ws.P("d.odct") + " --mode both --report " + ws.P("t.json"));
  INFO(r.out);
  REQUIRE(r.code == 0);
  CHECK(r.out.find("outlier") != std::string::npos);
  CHECK(r.out.find("vq") != std::string::npos);
  CHECK(fs::file_size(ws.P("t.json")) > 0);
}
