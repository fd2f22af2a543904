#include "coughdet/segmentation.hpp"

#include <algorithm>
#include <cmath>

namespace coughdet {

void SegmenterConfig::validate() const {
  if (!(hop_s > 0) || !(window_s >= hop_s))
    throw InputError("segmenter: require window_s >= hop_s > 0");
  if (!(threshold_factor > 0)) throw InputError("segmenter: threshold_factor must be positive");
  if (!(min_event_s > 0)) throw InputError("segmenter: min_event_s must be positive");
  if (merge_gap_s < 0) throw InputError("segmenter: merge_gap_s must be non-negative");
}

namespace {

struct WindowGeometry {
  std::size_t length;
  std::vector<std::size_t> starts;
};

WindowGeometry windows(std::size_t n, double rate, double window_s, double hop_s) {
  if (!(hop_s > 0) || !(window_s > 0)) throw InputError("short_time_energy: non-positive window or hop");
  WindowGeometry g;
  g.length = static_cast<std::size_t>(std::llround(window_s * rate));
  if (g.length == 0) throw InputError("short_time_energy: window shorter than one sample");
  if (g.length > n) throw InputError("short_time_energy: window longer than signal");
  for (std::size_t k = 0;; ++k) {
    const auto start = static_cast<std::size_t>(std::llround(static_cast<double>(k) * hop_s * rate));
    if (start + g.length > n) break;
    if (!g.starts.empty() && start == g.starts.back()) continue;
    g.starts.push_back(start);
  }
  return g;
}

double median(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  if (v.size() % 2 == 1) return v[mid];
  const double hi = v[mid];
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

}  // namespace

std::vector<EnergyPoint> short_time_energy(std::span<const double> samples,
                                           double sample_rate, double window_s,
                                           double hop_s) {
  const auto g = windows(samples.size(), sample_rate, window_s, hop_s);
  std::vector<EnergyPoint> out;
  out.reserve(g.starts.size());
  for (std::size_t start : g.starts) {
    double acc = 0.0;
    for (std::size_t i = start; i < start + g.length; ++i) acc += samples[i] * samples[i];
    out.push_back({(static_cast<double>(start) + 0.5 * static_cast<double>(g.length)) / sample_rate,
                   acc / static_cast<double>(g.length)});
  }
  return out;
}

std::vector<Interval> active_windows(std::span<const double> samples, double sample_rate,
                                     const SegmenterConfig& cfg) {
  const auto energy = short_time_energy(samples, sample_rate, cfg.window_s, cfg.hop_s);
  std::vector<double> values;
  values.reserve(energy.size());
  for (const auto& p : energy) values.push_back(p.energy);
  const double threshold = cfg.threshold_factor * median(values);
  const double half = 0.5 * std::llround(cfg.window_s * sample_rate) / sample_rate;

  std::vector<Interval> out;
  for (const auto& p : energy)
    if (p.energy > threshold) out.push_back({p.time_s - half, p.time_s + half});
  return out;
}

std::vector<Interval> detect_events(const AccelSignal& accel, const AudioSignal& audio,
                                    const SegmenterConfig& cfg) {
  cfg.validate();
  if (accel.samples.empty() || audio.samples.empty())
    throw InputError("detect_events: empty signal");

  auto spans = active_windows(accel.samples, AccelSignal::sample_rate, cfg);
  auto more = active_windows(audio.samples, AudioSignal::sample_rate, cfg);
  spans.insert(spans.end(), more.begin(), more.end());
  std::sort(spans.begin(), spans.end(),
            [](const Interval& a, const Interval& b) { return a.start_s < b.start_s; });

  std::vector<Interval> merged;
  for (const auto& s : spans) {
    if (!merged.empty() && s.start_s - merged.back().end_s < cfg.merge_gap_s)
      merged.back().end_s = std::max(merged.back().end_s, s.end_s);
    else
      merged.push_back(s);
  }
  std::erase_if(merged, [&](const Interval& iv) { return iv.length() < cfg.min_event_s; });
  return merged;
}

double intersection_over_union(const Interval& a, const Interval& b) {
  const double inter = std::max(0.0, std::min(a.end_s, b.end_s) - std::max(a.start_s, b.start_s));
  const double uni = a.length() + b.length() - inter;
  return uni > 0 ? inter / uni : 0.0;
}

}  // namespace coughdet
