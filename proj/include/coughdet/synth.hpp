#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <json.hpp>

#include "coughdet/io.hpp"
#include "coughdet/random.hpp"
#include "coughdet/segmentation.hpp"
#include "coughdet/signal.hpp"

namespace coughdet {

/// Parameters of the synthetic corpus. The signal models are deliberately
/// simple stand-ins that exercise the pipeline; they do not imitate clinical
/// recordings.
struct SynthConfig {
  std::size_t n_patients = 14;
  std::size_t coughs_per_patient = 50;
  std::size_t noncoughs_per_patient = 200;
  double cough_mean_s = 1.90;
  double cough_sd_s = 0.26;
  double noncough_mean_s = 1.70;
  double noncough_sd_s = 0.24;
  double min_duration_s = 0.5;
  double max_duration_s = 4.0;
  std::uint64_t rng_seed = 7;

  void validate() const;
  nlohmann::ordered_json to_json() const;
};

/// Per-patient body/room characteristics so that patients differ.
struct PatientProfile {
  double accel_gain;
  double audio_gain;
  double resonance_hz;  // bed/body resonance excited by coughs
  double impulse_hz;    // ringing frequency of cough transients
  double movement_hz;   // typical frequency of non-cough movement
  double accel_noise;
  double audio_noise;
};

PatientProfile patient_profile(std::uint64_t seed, std::size_t patient);

std::string patient_name(std::size_t patient);  // "p01", "p02", ...

/// Truncated normal duration for the label.
double draw_duration(const SynthConfig& cfg, Label label, Rng& rng);

/// Accelerometer magnitude and audio for one event of the given duration.
/// With `with_noise` false only the event's own activity is rendered.
Event render_event(const PatientProfile& p, Label label, double duration_s, Rng& rng, bool with_noise = true);

/// Writes <out_dir>/<patient>/<event>.txt|.wav, manifest.jsonl and
/// dataset.json (the resolved config). Returns the manifest with absolute paths.
DatasetManifest generate_dataset(const SynthConfig& cfg, const std::filesystem::path& out_dir);

struct SyntheticRecording {
  AccelSignal accel;
  AudioSignal audio;
  std::vector<Interval> events;
  std::vector<Label> labels;
};

/// Continuous background with non-overlapping planted events separated by
/// at least one second of silence.
SyntheticRecording generate_recording(const SynthConfig& cfg, double seconds, std::uint64_t seed);

}  // namespace coughdet
