#include "coughdet/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace coughdet {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Second-order Butterworth section (RBJ cookbook, Q = 1/sqrt(2)).
class Biquad {
 public:
  static Biquad lowpass(double fc, double fs) { return make(fc, fs, false); }
  static Biquad highpass(double fc, double fs) { return make(fc, fs, true); }

  double operator()(double x) {
    const double y = b0_ * x + b1_ * x1_ + b2_ * x2_ - a1_ * y1_ - a2_ * y2_;
    x2_ = x1_;
    x1_ = x;
    y2_ = y1_;
    y1_ = y;
    return y;
  }

 private:
  static Biquad make(double fc, double fs, bool high) {
    const double w0 = kTwoPi * fc / fs;
    const double alpha = std::sin(w0) / (2.0 * std::numbers::sqrt2 / 2.0 * 2.0);
    const double c = std::cos(w0);
    const double a0 = 1.0 + alpha;
    Biquad q;
    if (high) {
      q.b0_ = (1.0 + c) / 2.0 / a0;
      q.b1_ = -(1.0 + c) / a0;
    } else {
      q.b0_ = (1.0 - c) / 2.0 / a0;
      q.b1_ = (1.0 - c) / a0;
    }
    q.b2_ = q.b0_;
    q.a1_ = -2.0 * c / a0;
    q.a2_ = (1.0 - alpha) / a0;
    return q;
  }

  double b0_ = 0, b1_ = 0, b2_ = 0, a1_ = 0, a2_ = 0;
  double x1_ = 0, x2_ = 0, y1_ = 0, y2_ = 0;
};

struct Axis3 {
  double x, y, z;
};

Axis3 random_direction(Rng& rng) {
  for (;;) {
    const Axis3 v{rng.normal(), rng.normal(), rng.normal()};
    const double n = std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z);
    if (n > 1e-6) return {v.x / n, v.y / n, v.z / n};
  }
}

// Linear fade-in/out of `ramp` seconds at both ends.
double edge_envelope(double t, double duration, double ramp) {
  return std::clamp(std::min(t, duration - t) / ramp, 0.0, 1.0);
}

struct Burst {
  double start;
  double length;
};

std::vector<Burst> cough_bursts(double duration, Rng& rng) {
  const std::size_t k = 1 + rng.index(3);
  std::vector<Burst> bursts(k);
  const double span = duration - 0.02;
  if (k == 1) {
    bursts[0] = {0.01, span};
    return bursts;
  }
  // Bursts tile the event with short pauses so the whole interval stays active.
  const double pause = std::min(0.12, 0.1 * span);
  const double each = (span - pause * static_cast<double>(k - 1)) / static_cast<double>(k);
  for (std::size_t i = 0; i < k; ++i)
    bursts[i] = {0.01 + static_cast<double>(i) * (each + pause), each * rng.uniform(0.85, 1.0)};
  return bursts;
}

}  // namespace

void SynthConfig::validate() const {
  if (n_patients < 1 || coughs_per_patient < 1 || noncoughs_per_patient < 1)
    throw InputError("synth: patient and event counts must be at least 1");
  if (!(min_duration_s > 0 && min_duration_s < max_duration_s))
    throw InputError("synth: require 0 < min_duration_s < max_duration_s");
  if (!(cough_sd_s >= 0 && noncough_sd_s >= 0)) throw InputError("synth: negative duration spread");
}

nlohmann::ordered_json SynthConfig::to_json() const {
  return {{"n_patients", n_patients},
          {"coughs_per_patient", coughs_per_patient},
          {"noncoughs_per_patient", noncoughs_per_patient},
          {"cough_duration", {{"mean_s", cough_mean_s}, {"sd_s", cough_sd_s}}},
          {"noncough_duration", {{"mean_s", noncough_mean_s}, {"sd_s", noncough_sd_s}}},
          {"truncation_s", {min_duration_s, max_duration_s}},
          {"rng_seed", rng_seed}};
}

std::string patient_name(std::size_t patient) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "p%02zu", patient + 1);
  return buf;
}

PatientProfile patient_profile(std::uint64_t seed, std::size_t patient) {
  Rng rng(derive_seed(seed, 0x9a71e47, patient));
  PatientProfile p;
  p.accel_gain = rng.uniform(0.6, 1.8);
  p.audio_gain = rng.uniform(0.4, 1.6);
  p.resonance_hz = rng.uniform(9.0, 18.0);
  p.impulse_hz = rng.uniform(24.0, 36.0);
  p.movement_hz = rng.uniform(0.6, 2.0);
  p.accel_noise = 0.004 * rng.uniform(0.7, 1.4);
  p.audio_noise = 0.0015 * rng.uniform(0.7, 1.4);
  return p;
}

double draw_duration(const SynthConfig& cfg, Label label, Rng& rng) {
  const bool cough = label == Label::cough;
  const double mu = cough ? cfg.cough_mean_s : cfg.noncough_mean_s;
  const double sd = cough ? cfg.cough_sd_s : cfg.noncough_sd_s;
  for (;;) {
    const double d = rng.normal(mu, sd);
    if (d >= cfg.min_duration_s && d <= cfg.max_duration_s) return d;
  }
}

Event render_event(const PatientProfile& p, Label label, double duration, Rng& rng, bool with_noise) {
  // Both channels cover the same whole number of accelerometer samples.
  duration = std::round(duration * kAccelRate) / kAccelRate;
  Event e;
  e.label = label;
  e.start_s = 0.0;
  e.end_s = duration;
  const auto na = static_cast<std::size_t>(std::lround(duration * kAccelRate));
  const auto nu = static_cast<std::size_t>(std::lround(duration * kAudioRate));
  std::vector<double> ax(na, 0.0), ay(na, 0.0), az(na, 0.0);
  std::vector<double> audio(nu, 0.0);
  auto add_accel = [&](std::size_t i, const Axis3& dir, double v) {
    ax[i] += dir.x * v;
    ay[i] += dir.y * v;
    az[i] += dir.z * v;
  };

  if (label == Label::cough) {
    const auto bursts = cough_bursts(duration, rng);
    // Some coughs are faint in both channels.
    const double strength = rng.uniform() < 0.2 ? rng.uniform(0.25, 0.5) : 1.0;
    // Body resonance sustained over the whole event.
    const Axis3 tone_dir = random_direction(rng);
    const double tone_amp = 0.05 * p.accel_gain * rng.uniform(0.8, 1.2);
    const double phase = rng.uniform(0.0, kTwoPi);
    for (std::size_t i = 0; i < na; ++i) {
      const double t = static_cast<double>(i) / kAccelRate;
      add_accel(i, tone_dir, tone_amp * edge_envelope(t, duration, 0.03) * std::sin(kTwoPi * p.resonance_hz * t + phase));
    }
    // Each burst: a ringing accelerometer transient and band-passed noise in audio.
    Biquad hp = Biquad::highpass(300.0, kAudioRate), lp = Biquad::lowpass(3000.0, kAudioRate);
    for (const auto& b : bursts) {
      const Axis3 dir = random_direction(rng);
      const double amp = 0.3 * strength * p.accel_gain * rng.uniform(0.7, 1.3);
      const double ring = p.impulse_hz * rng.uniform(0.9, 1.1);
      for (std::size_t i = 0; i < na; ++i) {
        const double t = static_cast<double>(i) / kAccelRate - b.start;
        if (t < 0) continue;
        add_accel(i, dir, amp * std::exp(-t / 0.05) * std::sin(kTwoPi * ring * t));
      }
      const double a_amp = 0.25 * strength * p.audio_gain * rng.uniform(0.7, 1.3);
      const double decay = b.length / 2.5;
      const auto first = static_cast<std::size_t>(b.start * kAudioRate);
      const auto last = std::min(nu, static_cast<std::size_t>((b.start + b.length) * kAudioRate));
      for (std::size_t i = first; i < last; ++i) {
        const double t = static_cast<double>(i - first) / kAudioRate;
        const double env = std::min(1.0, t / 0.01) * std::exp(-t / decay);
        audio[i] += a_amp * env * lp(hp(rng.normal()));
      }
    }
  } else {
    // Bed movement: slow large oscillation, drift, weak broadband rustle.
    const Axis3 dir = random_direction(rng);
    const double amp = 0.15 * p.accel_gain * rng.uniform(0.6, 1.4);
    const double f = p.movement_hz * rng.uniform(0.7, 1.3);
    const double phase = rng.uniform(0.0, kTwoPi);
    const Axis3 drift_dir = random_direction(rng);
    const double drift = 0.03 * p.accel_gain * rng.uniform(-1.0, 1.0);
    for (std::size_t i = 0; i < na; ++i) {
      const double t = static_cast<double>(i) / kAccelRate;
      const double env = edge_envelope(t, duration, 0.05);
      add_accel(i, dir, env * amp * std::sin(kTwoPi * f * t + phase));
      add_accel(i, drift_dir, env * drift * t / duration);
    }
    Biquad rumble = Biquad::lowpass(200.0, kAudioRate);
    const double hiss = 0.006 * p.audio_gain * rng.uniform(0.6, 1.4);
    const double low = 0.02 * p.audio_gain * rng.uniform(0.6, 1.4);
    for (std::size_t i = 0; i < nu; ++i) {
      const double t = static_cast<double>(i) / kAudioRate;
      const double env = edge_envelope(t, duration, 0.05);
      audio[i] += env * (hiss * rng.normal() + low * rumble(rng.normal()));
    }
    // Occasional knock against the bed: a ringing accelerometer transient
    // close to the cough band and a short broadband click.
    if (rng.uniform() < 0.2) {
      const double at = rng.uniform(0.1, std::max(0.15, duration - 0.3));
      const Axis3 kdir = random_direction(rng);
      const double kamp = 0.2 * p.accel_gain * rng.uniform(0.5, 1.2);
      const double kf = rng.uniform(15.0, 40.0);
      for (std::size_t i = 0; i < na; ++i) {
        const double t = static_cast<double>(i) / kAccelRate - at;
        if (t >= 0) add_accel(i, kdir, kamp * std::exp(-t / 0.05) * std::sin(kTwoPi * kf * t));
      }
      const double camp = 0.1 * p.audio_gain * rng.uniform(0.5, 1.2);
      const auto first = static_cast<std::size_t>(at * kAudioRate);
      const auto last = std::min(nu, first + static_cast<std::size_t>(0.02 * kAudioRate));
      for (std::size_t i = first; i < last; ++i) audio[i] += camp * rng.normal();
    }
  }

  if (with_noise) {
    for (std::size_t i = 0; i < na; ++i) {
      ax[i] += p.accel_noise * rng.normal();
      ay[i] += p.accel_noise * rng.normal();
      az[i] += p.accel_noise * rng.normal();
    }
    for (double& v : audio) v += p.audio_noise * rng.normal();
  }
  e.accel = magnitude(ax, ay, az);
  // Quantize to the PCM16 grid so in-memory events equal their files.
  for (double& v : audio) v = std::clamp(std::round(v * 32768.0), -32768.0, 32767.0) / 32768.0;
  e.audio.samples = std::move(audio);
  return e;
}

DatasetManifest generate_dataset(const SynthConfig& cfg, const std::filesystem::path& out_dir) {
  cfg.validate();
  const auto root = std::filesystem::absolute(out_dir);
  std::filesystem::create_directories(root);
  DatasetManifest m;
  for (std::size_t p = 0; p < cfg.n_patients; ++p) {
    const auto profile = patient_profile(cfg.rng_seed, p);
    Rng rng(derive_seed(cfg.rng_seed, p));
    std::vector<Label> order(cfg.coughs_per_patient, Label::cough);
    order.insert(order.end(), cfg.noncoughs_per_patient, Label::non_cough);
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);

    const std::string pid = patient_name(p);
    double clock = rng.uniform(1.0, 30.0);
    for (std::size_t k = 0; k < order.size(); ++k) {
      const double d = draw_duration(cfg, order[k], rng);
      Event e = render_event(profile, order[k], d, rng);
      char name[32];
      std::snprintf(name, sizeof name, "%s_e%04zu", pid.c_str(), k + 1);
      ManifestRecord r;
      r.event_id = name;
      r.patient_id = pid;
      r.label = order[k];
      r.accel_path = root / pid / (std::string(name) + ".txt");
      r.audio_path = root / pid / (std::string(name) + ".wav");
      r.start_s = clock;
      r.end_s = clock + static_cast<double>(e.accel.samples.size()) / kAccelRate;
      save_event(e, r);
      m.records.push_back(std::move(r));
      clock = m.records.back().end_s + rng.uniform(2.0, 30.0);
    }
  }
  write_file_atomic(root / "manifest.jsonl", format_manifest(m, root));
  nlohmann::ordered_json meta;
  meta["generator"] = "coughdet synth";
  meta["config"] = cfg.to_json();
  meta["events"] = m.records.size();
  write_file_atomic(root / "dataset.json", meta.dump(2) + "\n");
  return m;
}

SyntheticRecording generate_recording(const SynthConfig& cfg, double seconds, std::uint64_t seed) {
  if (!(seconds > 0)) throw InputError("synth recording: duration must be positive");
  Rng rng(seed);
  const auto profile = patient_profile(seed, 0);
  SyntheticRecording rec;
  const auto na = static_cast<std::size_t>(std::lround(seconds * kAccelRate));
  const auto nu = static_cast<std::size_t>(std::lround(seconds * kAudioRate));
  std::vector<double> ax(na), ay(na), az(na);
  for (std::size_t i = 0; i < na; ++i) {
    ax[i] = profile.accel_noise * rng.normal();
    ay[i] = profile.accel_noise * rng.normal();
    az[i] = profile.accel_noise * rng.normal();
  }
  rec.audio.samples.resize(nu);
  for (double& v : rec.audio.samples) v = profile.audio_noise * rng.normal();

  double t = rng.uniform(1.0, 3.0);
  for (;;) {
    const Label label = rng.uniform() < 0.4 ? Label::cough : Label::non_cough;
    const double d = draw_duration(cfg, label, rng);
    if (t + d + 1.0 > seconds) break;
    const Event e = render_event(profile, label, d, rng, false);
    const auto a0 = static_cast<std::size_t>(std::lround(t * kAccelRate));
    const auto u0 = static_cast<std::size_t>(std::lround(t * kAudioRate));
    // render_event returns the magnitude; re-add it along a fixed axis so the
    // stored channel stays a vector magnitude of background plus event.
    for (std::size_t i = 0; i < e.accel.samples.size() && a0 + i < na; ++i) az[a0 + i] += e.accel.samples[i];
    for (std::size_t i = 0; i < e.audio.samples.size() && u0 + i < nu; ++i) rec.audio.samples[u0 + i] += e.audio.samples[i];
    rec.events.push_back({static_cast<double>(a0) / kAccelRate,
                          static_cast<double>(a0 + e.accel.samples.size()) / kAccelRate});
    rec.labels.push_back(label);
    t = rec.events.back().end_s + rng.uniform(1.0, 4.0);
  }
  rec.accel = magnitude(ax, ay, az);
  for (double& v : rec.audio.samples) v = std::clamp(std::round(v * 32768.0), -32768.0, 32767.0) / 32768.0;
  return rec;
}

}  // namespace coughdet
