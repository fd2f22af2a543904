#include "coughdet/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "coughdet/feature_cache.hpp"
#include "coughdet/io.hpp"
#include "coughdet/report.hpp"
#include "coughdet/segmentation.hpp"
#include "coughdet/synth.hpp"

namespace coughdet::cli {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

std::vector<std::size_t> default_psi() { return {16, 32, 64}; }
std::vector<std::size_t> default_accel_segments() { return {5, 10}; }
std::vector<std::size_t> default_mfcc() { return {13, 26, 39, 52, 65}; }
std::vector<std::size_t> default_audio_frame_len() { return {256, 512, 1024, 2048, 4096}; }
std::vector<std::size_t> default_audio_segments() { return {50, 70, 100, 120, 150}; }

std::vector<double> default_gamma1() {
  std::vector<double> v;
  for (int e = -7; e <= 7; ++e) v.push_back(std::pow(10.0, e));
  return v;
}
std::vector<double> default_mix() {
  std::vector<double> v;
  for (int i = 0; i <= 20; ++i) v.push_back(i / 20.0);
  return v;
}
std::vector<double> default_gamma4() { return default_gamma1(); }
std::vector<int> default_gamma5() {
  std::vector<int> v;
  for (int h = 10; h <= 100; h += 10) v.push_back(h);
  return v;
}

std::vector<ClassifierSpec> expand_classifiers(const ClassifierGrid& g) {
  std::vector<ClassifierSpec> out;
  for (const auto kind : g.kinds) {
    ClassifierSpec s;
    s.kind = kind;
    switch (kind) {
      case ClassifierKind::lr:
        for (double a : g.gamma1)
          for (double b : g.gamma2)
            for (double c : g.gamma3) {
              s.gamma1 = a;
              s.gamma2 = b;
              s.gamma3 = c;
              out.push_back(s);
            }
        break;
      case ClassifierKind::svm:
        for (double a : g.gamma1)
          for (double k : g.gamma4) {
            s.gamma1 = a;
            s.gamma4 = k;
            out.push_back(s);
          }
        break;
      case ClassifierKind::mlp:
        for (double c : g.gamma3)
          for (int h : g.gamma5) {
            s.gamma3 = c;
            s.gamma5 = h;
            out.push_back(s);
          }
        break;
      case ClassifierKind::external:
        s.scores_path = g.scores_path;
        out.push_back(s);
        break;
    }
  }
  for (const auto& s : out) s.validate();
  return out;
}

std::vector<FeatureConfig> expand_features(const FeatureGrid& g) {
  std::vector<FeatureConfig> out;
  FeatureConfig f;
  f.modality = g.modality;
  if (g.modality == Modality::accel) {
    for (auto psi : g.psi)
      for (auto c : g.segments) {
        f.accel.frame_len = psi;
        f.accel.segments = c;
        f.accel.validate();
        out.push_back(f);
      }
  } else {
    for (auto m : g.mfcc)
      for (auto fl : g.frame_len)
        for (auto s : g.segments) {
          f.audio.mfcc_count = m;
          f.audio.frame_len = fl;
          f.audio.segments = s;
          f.audio.validate();
          out.push_back(f);
        }
  }
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void write_json(const fs::path& p, const ordered_json& j) { write_file_atomic(p, j.dump(2) + "\n"); }

ordered_json log_header(const std::string& command) {
  ordered_json j;
  j["tool"] = "coughdet";
  j["version"] = kVersion;
  j["command"] = command;
  return j;
}

SegmenterConfig segmenter_defaults() { return {}; }

ordered_json segmenter_json(const SegmenterConfig& s) {
  return {{"window_s", s.window_s},
          {"hop_s", s.hop_s},
          {"threshold_factor", s.threshold_factor},
          {"threshold_reference", "per-channel median window energy"},
          {"merge_gap_s", s.merge_gap_s},
          {"min_event_s", s.min_event_s}};
}

// Option storage for every subcommand; CLI11 binds into these.
struct Options {
  unsigned threads = 1;

  // synth
  std::size_t patients = 14, coughs = 50, noncoughs = 200;
  std::uint64_t seed = 7;
  std::string out;
  double recording_s = 0.0;

  // detect
  std::string accel_path, audio_path;
  SegmenterConfig seg = segmenter_defaults();

  // featurize / train / evaluate
  std::string manifest, modality = "accel", cache;
  std::vector<std::size_t> psi, segments, mfcc, frame_len;
  std::vector<std::string> classifiers;
  std::vector<double> gamma1, gamma2, gamma3, gamma4;
  std::vector<int> gamma5;
  std::string scores;
  std::size_t smote_k = 5;
  bool no_smote = false;
  double threshold = 0.5;

  // train
  std::string classifier = "lr";

  // report
  std::string report;
};

template <class T>
std::vector<T> or_default(const std::vector<T>& given, std::vector<T> fallback) {
  return given.empty() ? fallback : given;
}

FeatureGrid feature_grid(const Options& o) {
  FeatureGrid g;
  g.modality = parse_modality(o.modality);
  if (g.modality == Modality::accel) {
    if (!o.mfcc.empty() || !o.frame_len.empty())
      throw CLI::ValidationError("--mfcc/--frame-len", "only valid with --modality audio");
    g.psi = or_default(o.psi, default_psi());
    g.segments = or_default(o.segments, default_accel_segments());
  } else {
    if (!o.psi.empty()) throw CLI::ValidationError("--psi", "only valid with --modality accel");
    g.mfcc = or_default(o.mfcc, default_mfcc());
    g.frame_len = or_default(o.frame_len, default_audio_frame_len());
    g.segments = or_default(o.segments, default_audio_segments());
  }
  return g;
}

ClassifierGrid classifier_grid(const Options& o) {
  ClassifierGrid g;
  for (const auto& k : or_default(o.classifiers, {"lr", "svm", "mlp"})) g.kinds.push_back(parse_classifier_kind(k));
  g.gamma1 = or_default(o.gamma1, default_gamma1());
  g.gamma2 = or_default(o.gamma2, default_mix());
  g.gamma3 = or_default(o.gamma3, default_mix());
  g.gamma4 = or_default(o.gamma4, default_gamma4());
  g.gamma5 = or_default(o.gamma5, default_gamma5());
  g.scores_path = o.scores;
  for (auto k : g.kinds)
    if (k == ClassifierKind::external && g.scores_path.empty())
      throw CLI::ValidationError("--scores", "required for the external classifier");
  return g;
}

ordered_json grid_json(const Options& o, const FeatureGrid& f, const ClassifierGrid& c) {
  ordered_json j;
  j["modality"] = o.modality;
  bool truncated = false;
  if (f.modality == Modality::accel) {
    j["psi"] = f.psi;
    j["segments"] = f.segments;
    truncated |= f.psi != default_psi() || f.segments != default_accel_segments();
  } else {
    j["mfcc"] = f.mfcc;
    j["frame_len"] = f.frame_len;
    j["segments"] = f.segments;
    truncated |= f.mfcc != default_mfcc() || f.frame_len != default_audio_frame_len() ||
                 f.segments != default_audio_segments();
  }
  std::vector<std::string> kinds;
  for (auto k : c.kinds) kinds.emplace_back(to_string(k));
  j["classifiers"] = kinds;
  j["gamma1"] = c.gamma1;
  j["gamma2"] = c.gamma2;
  j["gamma3"] = c.gamma3;
  j["gamma4"] = c.gamma4;
  j["gamma5"] = c.gamma5;
  truncated |= c.gamma1 != default_gamma1() || c.gamma2 != default_mix() || c.gamma3 != default_mix() ||
               c.gamma4 != default_gamma4() || c.gamma5 != default_gamma5();
  truncated |= kinds != std::vector<std::string>{"lr", "svm", "mlp"};
  j["truncated"] = truncated;
  return j;
}

std::optional<FeatureCache> make_cache(const std::string& dir) {
  if (dir.empty()) return std::nullopt;
  return FeatureCache(dir);
}

int cmd_synth(const Options& o) {
  const auto t0 = Clock::now();
  SynthConfig cfg;
  cfg.n_patients = o.patients;
  cfg.coughs_per_patient = o.coughs;
  cfg.noncoughs_per_patient = o.noncoughs;
  cfg.rng_seed = o.seed;
  const auto m = generate_dataset(cfg, o.out);
  auto log = log_header("synth");
  log["config"] = cfg.to_json();
  log["outputs"] = {{"manifest", (fs::path(o.out) / "manifest.jsonl").string()}, {"events", m.records.size()}};
  if (o.recording_s > 0) {
    const auto rec = generate_recording(cfg, o.recording_s, o.seed);
    const fs::path dir = fs::path(o.out) / "recording";
    fs::create_directories(dir);
    write_accel_text(dir / "accel.txt", rec.accel.samples);
    write_wav(dir / "audio.wav", rec.audio.samples, static_cast<std::uint32_t>(kAudioRate));
    std::string lines;
    for (std::size_t i = 0; i < rec.events.size(); ++i) {
      ordered_json j{{"start_s", rec.events[i].start_s},
                     {"end_s", rec.events[i].end_s},
                     {"label", std::string(to_string(rec.labels[i]))}};
      lines += j.dump() + "\n";
    }
    write_file_atomic(dir / "planted.jsonl", lines);
    log["outputs"]["recording"] = {{"seconds", o.recording_s}, {"planted", rec.events.size()}};
  }
  log["timings"] = {{"total_s", seconds_since(t0)}};
  write_json(fs::path(o.out) / "run_log.json", log);
  std::printf("wrote %zu events for %zu patients to %s\n", m.records.size(), cfg.n_patients, o.out.c_str());
  return 0;
}

int cmd_detect(const Options& o) {
  const auto t0 = Clock::now();
  o.seg.validate();
  AccelSignal accel;
  accel.samples = read_accel_text(o.accel_path);
  const auto wav = read_wav(o.audio_path);
  if (wav.sample_rate != static_cast<std::uint32_t>(kAudioRate))
    throw LoadError(o.audio_path + ": sample rate " + std::to_string(wav.sample_rate) + ", expected 22050");
  AudioSignal audio;
  audio.samples = wav.samples;
  const auto events = detect_events(accel, audio, o.seg);
  std::string lines;
  for (const auto& e : events) lines += ordered_json{{"start_s", e.start_s}, {"end_s", e.end_s}}.dump() + "\n";
  write_file_atomic(o.out, lines);
  auto log = log_header("detect");
  log["config"] = {{"accel", o.accel_path}, {"audio", o.audio_path}, {"segmenter", segmenter_json(o.seg)}};
  log["outputs"] = {{"events", events.size()}, {"path", o.out}};
  log["timings"] = {{"total_s", seconds_since(t0)}};
  write_json(o.out + ".run_log.json", log);
  std::printf("%zu candidate events\n", events.size());
  return 0;
}

int cmd_featurize(const Options& o) {
  const auto t0 = Clock::now();
  const auto grid = feature_grid(o);
  const auto configs = expand_features(grid);
  const auto manifest = read_manifest(o.manifest);
  const FeatureCache cache(o.out);
  build_feature_tables(manifest, configs, &cache, o.threads);
  std::string index;
  for (const auto& c : configs)
    for (const auto& r : manifest.records)
      index += ordered_json{{"event_id", r.event_id},
                            {"config", c.key()},
                            {"path", fs::relative(cache.path_for(r.event_id, c), o.out).generic_string()}}
                   .dump() +
               "\n";
  write_file_atomic(fs::path(o.out) / "index.jsonl", index);
  auto log = log_header("featurize");
  ordered_json cj = ordered_json::array();
  for (const auto& c : configs) cj.push_back(c.to_json());
  log["config"] = {{"manifest", o.manifest}, {"feature_configs", cj}};
  log["outputs"] = {{"matrices", configs.size() * manifest.records.size()}};
  log["timings"] = {{"total_s", seconds_since(t0)}};
  log["threads"] = o.threads;
  write_json(fs::path(o.out) / "run_log.json", log);
  std::printf("%zu feature configs x %zu events\n", configs.size(), manifest.records.size());
  return 0;
}

int cmd_train(const Options& o) {
  const auto t0 = Clock::now();
  FeatureConfig fc;
  fc.modality = parse_modality(o.modality);
  auto one = [](const std::vector<std::size_t>& v, std::size_t fallback, const char* name) {
    if (v.size() > 1) throw CLI::ValidationError(name, "train takes a single value");
    return v.empty() ? fallback : v[0];
  };
  if (fc.modality == Modality::accel) {
    fc.accel.frame_len = one(o.psi, fc.accel.frame_len, "--psi");
    fc.accel.segments = one(o.segments, fc.accel.segments, "--segments");
  } else {
    fc.audio.mfcc_count = one(o.mfcc, fc.audio.mfcc_count, "--mfcc");
    fc.audio.frame_len = one(o.frame_len, fc.audio.frame_len, "--frame-len");
    fc.audio.segments = one(o.segments, fc.audio.segments, "--segments");
  }
  ClassifierSpec spec;
  spec.kind = parse_classifier_kind(o.classifier);
  if (!o.gamma1.empty()) spec.gamma1 = o.gamma1.at(0);
  if (!o.gamma2.empty()) spec.gamma2 = o.gamma2.at(0);
  if (!o.gamma3.empty()) spec.gamma3 = o.gamma3.at(0);
  if (!o.gamma4.empty()) spec.gamma4 = o.gamma4.at(0);
  if (!o.gamma5.empty()) spec.gamma5 = o.gamma5.at(0);
  spec.validate();

  const auto manifest = read_manifest(o.manifest);
  const auto cache = make_cache(o.cache);
  const std::vector<FeatureConfig> configs{fc};
  const auto tables = build_feature_tables(manifest, configs, cache ? &*cache : nullptr, o.threads);
  const auto events = make_event_table(manifest);
  Eigen::MatrixXd X = tables[0].X;
  std::vector<int> y = events.labels;
  SmoteConfig sc;
  sc.k_neighbors = o.smote_k;
  sc.rng_seed = derive_seed(o.seed, 0x5307e);
  if (!o.no_smote) {
    auto bal = smote(X, y, sc);
    X = std::move(bal.X);
    y = std::move(bal.y);
  }
  const auto model = train(spec, X, y, derive_seed(o.seed, 0x7a19));
  auto j = model.to_json();
  j["run"] = {{"seed", o.seed},
              {"features", fc.to_json()},
              {"smote", o.no_smote ? ordered_json(nullptr) : ordered_json{{"k", o.smote_k}}},
              {"manifest_events", manifest.records.size()}};
  write_json(o.out, j);
  auto log = log_header("train");
  log["config"] = j["run"];
  log["config"]["classifier"] = spec.to_json();
  log["timings"] = {{"total_s", seconds_since(t0)}};
  write_json(o.out + ".run_log.json", log);
  std::printf("trained %s on %td rows\n", spec.describe().c_str(), X.rows());
  return 0;
}

void write_report_outputs(const fs::path& dir, const EvalReport& r) {
  write_file_atomic(dir / "table.csv", format_table_csv(r));
  write_file_atomic(dir / "mean_roc.csv", format_mean_roc_csv(r));
}

int cmd_evaluate(const Options& o) {
  const auto t0 = Clock::now();
  const auto fgrid = feature_grid(o);
  const auto cgrid = classifier_grid(o);
  const auto fconfigs = expand_features(fgrid);
  const auto classifiers = expand_classifiers(cgrid);
  const auto manifest = read_manifest(o.manifest);
  const auto cache = make_cache(o.cache);
  const auto tables = build_feature_tables(manifest, fconfigs, cache ? &*cache : nullptr, o.threads);
  const auto events = make_event_table(manifest);
  const double t_features = seconds_since(t0);

  EvalOptions eo;
  eo.threads = o.threads;
  eo.grid.seed = o.seed;
  eo.grid.threshold = o.threshold;
  eo.grid.apply_smote = !o.no_smote;
  eo.grid.smote.k_neighbors = o.smote_k;
  auto report = evaluate(events, tables, classifiers, eo);

  ordered_json rc;
  rc["seed"] = o.seed;
  rc["manifest"] = fs::path(o.manifest).filename().string();
  rc["events"] = events.size();
  rc["grid"] = grid_json(o, fgrid, cgrid);
  ordered_json fj = ordered_json::array();
  for (const auto& f : fconfigs) fj.push_back(f.to_json());
  rc["feature_configs"] = fj;
  rc["smote"] = o.no_smote ? ordered_json(nullptr) : ordered_json{{"k", o.smote_k}, {"target", "majority count"}};
  rc["standardization"] = "per-column z-score from training rows";
  rc["dev_rule"] = "cyclic_next";
  rc["selection"] = "max dev AUC, earliest grid order on ties";
  rc["threshold"] = o.threshold;
  rc["threshold_note"] = "fixed operating point; spec/sens/acc use score >= threshold";
  rc["sigma_auc"] = "sample standard deviation of fold AUCs";
  rc["mean_roc"] = "vertical averaging on 101 FPR points";
  report.run_config = rc;

  const fs::path out(o.out);
  fs::create_directories(out);
  write_json(out / "report.json", report_to_json(report));
  write_report_outputs(out, report);
  auto log = log_header("evaluate");
  log["config"] = rc;
  log["threads"] = o.threads;
  log["configs_evaluated"] = report.configs.size();
  log["timings"] = {{"features_s", t_features}, {"total_s", seconds_since(t0)}};
  write_json(out / "run_log.json", log);
  std::printf("mean test AUC %.4f (sigma %.4f) over %zu folds, %zu configs\n", report.mean_auc, report.std_auc,
              report.folds.size(), report.configs.size());
  return 0;
}

int cmd_report(const Options& o) {
  const auto t0 = Clock::now();
  const auto j = nlohmann::json::parse(read_file(o.report));
  const auto r = report_from_json(j);
  const fs::path out(o.out);
  fs::create_directories(out);
  write_report_outputs(out, r);
  auto log = log_header("report");
  log["config"] = {{"report", o.report}};
  log["timings"] = {{"total_s", seconds_since(t0)}};
  write_json(out / "report_run_log.json", log);
  return 0;
}

void add_feature_flags(CLI::App* c, Options& o) {
  c->add_option("--modality", o.modality, "accel or audio")->check(CLI::IsMember({"accel", "audio"}));
  c->add_option("--psi", o.psi, "accel frame lengths")->delimiter(',');
  c->add_option("--segments", o.segments, "frames per event (C for accel, S for audio)")->delimiter(',');
  c->add_option("--mfcc", o.mfcc, "audio MFCC counts")->delimiter(',');
  c->add_option("--frame-len", o.frame_len, "audio frame lengths")->delimiter(',');
}

void add_classifier_flags(CLI::App* c, Options& o) {
  c->add_option("--gamma1", o.gamma1, "regularisation strength / SVM C")->delimiter(',');
  c->add_option("--gamma2", o.gamma2, "LR l1 weight")->delimiter(',');
  c->add_option("--gamma3", o.gamma3, "LR l2 weight / MLP l2 penalty")->delimiter(',');
  c->add_option("--gamma4", o.gamma4, "SVM RBF coefficient")->delimiter(',');
  c->add_option("--gamma5", o.gamma5, "MLP hidden units")->delimiter(',');
}

}  // namespace

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

int run(int argc, const char* const* argv) {
  Options o;
  CLI::App app{"Cough detection from bed-mounted accelerometer and audio recordings", "coughdet"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "TOML/INI file whose keys mirror the flag names");
  app.require_subcommand(1);
  app.add_option("--threads", o.threads, "worker threads")->check(CLI::Range(1u, 256u));

  auto* synth = app.add_subcommand("synth", "generate a synthetic labeled dataset");
  synth->add_option("--patients", o.patients)->check(CLI::PositiveNumber);
  synth->add_option("--coughs", o.coughs, "cough events per patient")->check(CLI::PositiveNumber);
  synth->add_option("--noncoughs", o.noncoughs, "non-cough events per patient")->check(CLI::PositiveNumber);
  synth->add_option("--seed", o.seed);
  synth->add_option("--out", o.out, "output directory")->required();
  synth->add_option("--recording-seconds", o.recording_s, "also write a continuous recording with planted events");

  auto* detect = app.add_subcommand("detect", "energy-based event segmentation");
  detect->add_option("--accel", o.accel_path, "accelerometer magnitude text file")->required()->check(CLI::ExistingFile);
  detect->add_option("--audio", o.audio_path, "PCM16 mono WAV at 22050 Hz")->required()->check(CLI::ExistingFile);
  detect->add_option("--out", o.out, "JSON lines output")->required();
  detect->add_option("--window", o.seg.window_s, "energy window (s)");
  detect->add_option("--hop", o.seg.hop_s, "energy hop (s)");
  detect->add_option("--factor", o.seg.threshold_factor, "threshold as a multiple of the median energy");
  detect->add_option("--merge-gap", o.seg.merge_gap_s, "merge events closer than this (s)");
  detect->add_option("--min-event", o.seg.min_event_s, "drop events shorter than this (s)");

  auto* featurize = app.add_subcommand("featurize", "extract and cache feature matrices");
  featurize->add_option("--manifest", o.manifest)->required()->check(CLI::ExistingFile);
  featurize->add_option("--out", o.out, "cache directory")->required();
  add_feature_flags(featurize, o);

  auto* trainc = app.add_subcommand("train", "fit one classifier on all events of a manifest");
  trainc->add_option("--manifest", o.manifest)->required()->check(CLI::ExistingFile);
  trainc->add_option("--out", o.out, "model JSON")->required();
  trainc->add_option("--classifier", o.classifier)->check(CLI::IsMember({"lr", "svm", "mlp"}));
  trainc->add_option("--cache", o.cache, "feature cache directory");
  trainc->add_option("--seed", o.seed);
  trainc->add_option("--smote-k", o.smote_k)->check(CLI::PositiveNumber);
  trainc->add_flag("--no-smote", o.no_smote);
  add_feature_flags(trainc, o);
  add_classifier_flags(trainc, o);

  auto* evaluatec = app.add_subcommand("evaluate", "nested leave-one-patient-out cross-validation");
  evaluatec->add_option("--manifest", o.manifest)->required()->check(CLI::ExistingFile);
  evaluatec->add_option("--out", o.out, "output directory")->required();
  evaluatec->add_option("--classifiers", o.classifiers, "subset of lr,svm,mlp,external")
      ->delimiter(',')
      ->check(CLI::IsMember({"lr", "svm", "mlp", "external"}));
  evaluatec->add_option("--scores", o.scores, "JSON lines of external scores")->check(CLI::ExistingFile);
  evaluatec->add_option("--cache", o.cache, "feature cache directory");
  evaluatec->add_option("--seed", o.seed);
  evaluatec->add_option("--smote-k", o.smote_k)->check(CLI::PositiveNumber);
  evaluatec->add_flag("--no-smote", o.no_smote);
  evaluatec->add_option("--threshold", o.threshold, "score threshold for spec/sens/acc")->check(CLI::Range(0.0, 1.0));
  add_feature_flags(evaluatec, o);
  add_classifier_flags(evaluatec, o);

  auto* reportc = app.add_subcommand("report", "re-emit CSV tables from a report JSON");
  reportc->add_option("--report", o.report)->required()->check(CLI::ExistingFile);
  reportc->add_option("--out", o.out, "output directory")->required();

  try {
    app.parse(argc, argv);
    if (*synth) return cmd_synth(o);
    if (*detect) return cmd_detect(o);
    if (*featurize) return cmd_featurize(o);
    if (*trainc) return cmd_train(o);
    if (*evaluatec) return cmd_evaluate(o);
    if (*reportc) return cmd_report(o);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "coughdet: error: %s\n", e.what());
    return 1;
  }
  return 2;
}

}  // namespace coughdet::cli
