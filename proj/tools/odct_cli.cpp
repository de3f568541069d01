// Copyright 2026 The odct Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// odct: train a clean-speech patch dictionary, enhance noisy speech with it,
// and run the mixing / scoring / speech-distortion evaluation.
//
// Exit status: 0 success, 1 usage error, 2 data error.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "odct/odct.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct UsageError {
  std::string message;
};
struct DataError {
  std::string message;
};

struct AudioDeleter {
  void operator()(odct_audio* a) const { odct_audio_free(a); }
};
struct DictDeleter {
  void operator()(odct_dictionary* d) const { odct_dictionary_free(d); }
};
using AudioPtr = std::unique_ptr<odct_audio, AudioDeleter>;
using DictPtr = std::unique_ptr<odct_dictionary, DictDeleter>;

// Invalid parameters are usage errors; everything else is a data error.
void Check(odct_status status, const std::string& context) {
  if (status == ODCT_OK) return;
  std::string msg = context + ": " + odct_last_error();
  if (status == ODCT_EINVAL) throw UsageError{msg};
  throw DataError{msg};
}

AudioPtr ReadAudio(const std::string& path) {
  odct_audio* a = nullptr;
  Check(odct_audio_read_wav(path.c_str(), &a), "reading " + path);
  return AudioPtr(a);
}

DictPtr LoadDict(const std::string& path) {
  odct_dictionary* d = nullptr;
  Check(odct_dictionary_load(path.c_str(), &d), "loading " + path);
  return DictPtr(d);
}

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw DataError{"cannot write " + path};
  out << text;
}

std::string Fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

odct_mask_mode ParseMode(const std::string& s) {
  if (s == "outlier") return ODCT_MASK_OUTLIER;
  if (s == "vq") return ODCT_MASK_VQ;
  throw UsageError{"--mode must be outlier or vq"};
}

odct_gain_application ParseGainApp(const std::string& s) {
  if (s == "direct") return ODCT_GAIN_DIRECT;
  if (s == "sqrt") return ODCT_GAIN_SQRT;
  throw UsageError{"--gain-application must be direct or sqrt"};
}

// ---- config file --------------------------------------------------------

// Reads key=value lines ('#' starts a comment) into "--key=value" arguments.
std::vector<std::string> ConfigArgs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError{"cannot read config file " + path};
  std::vector<std::string> args;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError{path + ":" + std::to_string(lineno) + ": expected key=value"};
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    args.push_back("--" + key + "=" + value);
  }
  return args;
}

// Splices config-file options in right after the subcommand name, ahead of
// the command-line options, so that explicit flags take precedence.
std::vector<std::string> ExpandConfig(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string config;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError{"--config needs a path"};
      config = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                 args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      config = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (config.empty()) return args;
  auto extra = ConfigArgs(config);
  auto sub = std::find_if(args.begin(), args.end(),
                          [](const std::string& a) { return a.empty() || a[0] != '-'; });
  if (sub == args.end()) throw UsageError{"--config requires a subcommand"};
  args.insert(sub + 1, extra.begin(), extra.end());
  return args;
}

// ---- train ----------------------------------------------------------------

struct TrainArgs {
  std::string corpus_dir;
  std::string out_path;
  odct_train_config cfg{};
  long stride = -1;
};

std::vector<fs::path> ListWavs(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw DataError{dir.string() + " is not a directory"};
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::string ext = e.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
    if (ext == ".wav") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

int RunTrain(TrainArgs& a) {
  if (a.stride < 0) a.cfg.stride = a.cfg.patch_len + 1;
  else a.cfg.stride = static_cast<uint32_t>(a.stride);
  Check(odct_train_config_validate(&a.cfg), "train");

  std::vector<AudioPtr> corpus;
  for (const auto& path : ListWavs(a.corpus_dir)) {
    odct_audio* audio = nullptr;
    if (odct_audio_read_wav(path.string().c_str(), &audio) != ODCT_OK) {
      std::cerr << "warning: skipping " << path.string() << ": " << odct_last_error() << "\n";
      continue;
    }
    AudioPtr owned(audio);
    if (odct_audio_sample_rate(audio) != a.cfg.sample_rate) {
      std::cerr << "warning: skipping " << path.string() << ": sample rate "
                << odct_audio_sample_rate(audio) << " Hz, expected "
                << a.cfg.sample_rate << " Hz\n";
      continue;
    }
    corpus.push_back(std::move(owned));
  }
  if (corpus.empty())
    throw DataError{"no usable WAV files in " + a.corpus_dir};

  std::vector<const odct_audio*> handles;
  for (const auto& c : corpus) handles.push_back(c.get());
  odct_dictionary* dict = nullptr;
  odct_train_report report{};
  Check(odct_train(handles.data(), handles.size(), &a.cfg, &dict, &report), "train");
  DictPtr owned(dict);
  Check(odct_dictionary_save(dict, a.out_path.c_str()), "writing " + a.out_path);

  std::cout << "files=" << corpus.size() << "\n"
            << "patches_collected=" << report.patches_collected << "\n"
            << "patches_used=" << report.patches_used << "\n"
            << "entries=" << a.cfg.n_clusters << "\n"
            << "iterations=" << report.iterations << "\n"
            << "reseeded=" << report.reseeded << "\n"
            << "final_objective=" << Fixed(report.final_objective, 6) << "\n";
  return kExitOk;
}

// ---- enhance --------------------------------------------------------------

struct EnhanceArgs {
  std::string in_wav;
  std::string dict_path;
  std::string out_wav;
  std::string diagnostics;
  std::string mode = "outlier";
  std::string gain_app = "direct";
  odct_enhance_config cfg{};
};

void CollectPatch(const odct_patch_record* r, void* user) {
  char line[160];
  std::snprintf(line, sizeof line,
                "start_frame=%zu entry=%zu scale=%.9g distance=%.9g n_outliers=%zu\n",
                r->start_frame, r->entry, r->scale, r->log_distance, r->n_outliers);
  static_cast<std::string*>(user)->append(line);
}

int RunEnhance(EnhanceArgs& a) {
  a.cfg.mask_mode = ParseMode(a.mode);
  a.cfg.gain_application = ParseGainApp(a.gain_app);
  Check(odct_enhance_config_validate(&a.cfg), "enhance");

  AudioPtr noisy = ReadAudio(a.in_wav);
  DictPtr dict = LoadDict(a.dict_path);
  odct_audio* out = nullptr;
  std::string diag;
  Check(odct_enhance(noisy.get(), dict.get(), &a.cfg,
                     a.diagnostics.empty() ? nullptr : CollectPatch, &diag, &out),
        "enhance " + a.in_wav);
  AudioPtr enhanced(out);
  Check(odct_audio_write_wav(enhanced.get(), a.out_wav.c_str()), "writing " + a.out_wav);
  if (!a.diagnostics.empty()) WriteText(a.diagnostics, diag);
  std::cout << "samples=" << odct_audio_length(enhanced.get()) << "\n"
            << "mode=" << a.mode << "\n"
            << "threshold=" << a.cfg.threshold << "\n";
  return kExitOk;
}

// ---- mix / eval -----------------------------------------------------------

struct MixArgs {
  std::string clean, noise, out, noise_out;
  double snr_db = 0.0;
  uint64_t seed = 1;
};

int RunMix(const MixArgs& a) {
  AudioPtr clean = ReadAudio(a.clean);
  AudioPtr noise = ReadAudio(a.noise);
  odct_audio* noisy = nullptr;
  odct_audio* scaled = nullptr;
  double scale = 0.0;
  Check(odct_mix(clean.get(), noise.get(), a.snr_db, a.seed, &noisy,
                 a.noise_out.empty() ? nullptr : &scaled, &scale),
        "mix");
  AudioPtr noisy_owned(noisy), scaled_owned(scaled);
  Check(odct_audio_write_wav(noisy, a.out.c_str()), "writing " + a.out);
  if (scaled) Check(odct_audio_write_wav(scaled, a.noise_out.c_str()), "writing " + a.noise_out);
  std::cout << "snr_db=" << Fixed(a.snr_db) << "\n"
            << "noise_scale=" << Fixed(scale, 6) << "\n";
  return kExitOk;
}

struct EvalArgs {
  std::string reference, test, report;
};

int RunEval(const EvalArgs& a) {
  AudioPtr ref = ReadAudio(a.reference);
  AudioPtr test = ReadAudio(a.test);
  odct_metrics m{};
  Check(odct_evaluate(ref.get(), test.get(), &m), "eval");
  std::cout << "segSNR=" << Fixed(m.seg_snr_db) << "\n"
            << "fwSegSNR=" << Fixed(m.fw_seg_snr_db) << "\n";
  if (!a.report.empty()) {
    nlohmann::json j = {{"reference", a.reference},
                        {"test", a.test},
                        {"seg_snr_db", m.seg_snr_db},
                        {"fw_seg_snr_db", m.fw_seg_snr_db}};
    WriteText(a.report, j.dump(2) + "\n");
  }
  return kExitOk;
}

// ---- distort --------------------------------------------------------------

struct DistortArgs {
  std::vector<std::string> clean;
  std::vector<std::string> noise;
  std::vector<double> snrs{0.0};
  std::string dict_path;
  std::string mode = "both";
  std::string gain_app = "direct";
  std::string report;
  odct_enhance_config cfg{};
  uint64_t seed = 1;
};

int RunDistort(DistortArgs& a) {
  std::vector<std::string> modes;
  if (a.mode == "both") modes = {"outlier", "vq"};
  else modes = {a.mode};
  for (const auto& m : modes) {
    odct_enhance_config probe = a.cfg;
    probe.mask_mode = ParseMode(m);
    probe.gain_application = ParseGainApp(a.gain_app);
    Check(odct_enhance_config_validate(&probe), "distort");
  }

  DictPtr dict = LoadDict(a.dict_path);
  std::vector<AudioPtr> cleans, noises;
  for (const auto& p : a.clean) cleans.push_back(ReadAudio(p));
  for (const auto& p : a.noise) noises.push_back(ReadAudio(p));

  nlohmann::json rows = nlohmann::json::array();
  std::printf("%-24s %8s %-8s %12s %12s %12s %12s\n", "noise", "snr_db", "method",
              "mask_fwSNR", "noisy_seg", "enh_seg", "enh_fwSNR");
  for (std::size_t n = 0; n < noises.size(); ++n) {
    const std::string label = fs::path(a.noise[n]).stem().string();
    for (double snr : a.snrs) {
      for (const auto& m : modes) {
        odct_enhance_config cfg = a.cfg;
        cfg.mask_mode = ParseMode(m);
        cfg.gain_application = ParseGainApp(a.gain_app);
        odct_distortion_report sum{};
        for (std::size_t c = 0; c < cleans.size(); ++c) {
          odct_distortion_report r{};
          Check(odct_distortion_run(cleans[c].get(), noises[n].get(), snr,
                                    a.seed + c, dict.get(), &cfg, &r),
                "distort " + a.clean[c]);
          sum.clean_through_mask.fw_seg_snr_db += r.clean_through_mask.fw_seg_snr_db;
          sum.noisy.seg_snr_db += r.noisy.seg_snr_db;
          sum.enhanced.seg_snr_db += r.enhanced.seg_snr_db;
          sum.enhanced.fw_seg_snr_db += r.enhanced.fw_seg_snr_db;
        }
        const double k = static_cast<double>(cleans.size());
        const double mask_fw = sum.clean_through_mask.fw_seg_snr_db / k;
        const double noisy_seg = sum.noisy.seg_snr_db / k;
        const double enh_seg = sum.enhanced.seg_snr_db / k;
        const double enh_fw = sum.enhanced.fw_seg_snr_db / k;
        std::printf("%-24s %8.2f %-8s %12.2f %12.2f %12.2f %12.2f\n", label.c_str(),
                    snr, m.c_str(), mask_fw, noisy_seg, enh_seg, enh_fw);
        rows.push_back({{"noise", label},
                        {"snr_db", snr},
                        {"method", m},
                        {"clean_through_mask_fw_seg_snr_db", mask_fw},
                        {"noisy_seg_snr_db", noisy_seg},
                        {"enhanced_seg_snr_db", enh_seg},
                        {"enhanced_fw_seg_snr_db", enh_fw}});
      }
    }
  }
  if (!a.report.empty()) WriteText(a.report, rows.dump(2) + "\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dictionary-based speech enhancement with outlier noise estimation"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::string unused_config;
  app.add_option("--config", unused_config,
                 "key=value file; keys are long option names, flags win");

  TrainArgs train;
  odct_train_config_init(&train.cfg);
  auto* t = app.add_subcommand("train", "Train a dictionary from a directory of WAV files");
  t->add_option("corpus_dir", train.corpus_dir, "Directory of clean-speech WAVs")->required();
  t->add_option("out", train.out_path, "Output dictionary path")->required();
  t->add_option("--window-ms", train.cfg.window_ms, "Analysis window (ms)")->capture_default_str();
  t->add_option("-L,--patch-len", train.cfg.patch_len, "Frames per patch")->capture_default_str();
  t->add_option("-M,--stride", train.stride, "Frames between training patches (default L+1)");
  t->add_option("--bands", train.cfg.n_bands, "Triangular filter bands N'")->capture_default_str();
  t->add_option("-K,--entries", train.cfg.n_clusters, "Dictionary entries")->capture_default_str();
  t->add_option("--patches", train.cfg.n_patches, "Training patch budget")->capture_default_str();
  t->add_option("--max-iters", train.cfg.max_iters, "k-means iteration cap")->capture_default_str();
  t->add_option("--epsilon", train.cfg.epsilon_floor, "Power floor before logs")->capture_default_str();
  t->add_option("--sample-rate", train.cfg.sample_rate, "Required corpus rate")->capture_default_str();
  t->add_option("--seed", train.cfg.seed, "Random seed")->capture_default_str();

  EnhanceArgs enh;
  odct_enhance_config_init(&enh.cfg);
  auto* e = app.add_subcommand("enhance", "Enhance a noisy WAV");
  e->add_option("in", enh.in_wav, "Noisy input WAV")->required();
  e->add_option("dict", enh.dict_path, "Dictionary file")->required();
  e->add_option("out", enh.out_wav, "Enhanced output WAV")->required();
  e->add_option("-c,--threshold", enh.cfg.threshold, "Outlier p-value threshold")->capture_default_str();
  e->add_option("--mode", enh.mode, "outlier or vq")->capture_default_str();
  e->add_option("--gain-floor", enh.cfg.gain_floor, "Lower bound on gains")->capture_default_str();
  e->add_option("--gain-application", enh.gain_app, "direct or sqrt")->capture_default_str();
  e->add_option("--epsilon", enh.cfg.epsilon_floor, "Power floor before logs")->capture_default_str();
  e->add_option("--diagnostics", enh.diagnostics, "Write one line per patch to this file");

  MixArgs mix;
  auto* m = app.add_subcommand("mix", "Mix clean speech and noise at a target SNR");
  m->add_option("clean", mix.clean)->required();
  m->add_option("noise", mix.noise)->required();
  m->add_option("snr_db", mix.snr_db)->required();
  m->add_option("out", mix.out)->required();
  m->add_option("--noise-out", mix.noise_out, "Also write the scaled noise");
  m->add_option("--seed", mix.seed)->capture_default_str();

  EvalArgs ev;
  auto* v = app.add_subcommand("eval", "Score a test WAV against a reference");
  v->add_option("reference", ev.reference)->required();
  v->add_option("test", ev.test)->required();
  v->add_option("--report", ev.report, "Write a JSON report");

  DistortArgs dis;
  odct_enhance_config_init(&dis.cfg);
  auto* d = app.add_subcommand(
      "distort", "Pass clean speech through masks computed from noisy mixtures");
  d->add_option("--clean", dis.clean, "Clean utterances")->required()->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  d->add_option("--noise", dis.noise, "Noise recordings")->required()->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  d->add_option("--snr", dis.snrs, "SNR levels in dB")->delimiter(',')->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  d->add_option("--dict", dis.dict_path, "Dictionary file")->required();
  d->add_option("--mode", dis.mode, "outlier, vq or both")->capture_default_str();
  d->add_option("-c,--threshold", dis.cfg.threshold)->capture_default_str();
  d->add_option("--gain-floor", dis.cfg.gain_floor)->capture_default_str();
  d->add_option("--gain-application", dis.gain_app)->capture_default_str();
  d->add_option("--seed", dis.seed)->capture_default_str();
  d->add_option("--report", dis.report, "Write a JSON table");

  try {
    std::vector<std::string> args = ExpandConfig(argc, argv);
    std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
    app.parse(args);
  } catch (const CLI::ParseError& err) {
    const int rc = app.exit(err);
    return rc == 0 ? kExitOk : kExitUsage;
  } catch (const UsageError& err) {
    std::cerr << "error: " << err.message << "\n";
    return kExitUsage;
  }

  try {
    if (*t) return RunTrain(train);
    if (*e) return RunEnhance(enh);
    if (*m) return RunMix(mix);
    if (*v) return RunEval(ev);
    if (*d) return RunDistort(dis);
  } catch (const UsageError& err) {
    std::cerr << "error: " << err.message << "\n";
    return kExitUsage;
  } catch (const DataError& err) {
    std::cerr << "error: " << err.message << "\n";
    return kExitData;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
