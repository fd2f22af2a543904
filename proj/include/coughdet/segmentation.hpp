#pragma once

#include <span>
#include <vector>

#include "coughdet/signal.hpp"

namespace coughdet {

/// Short-time energy trigger. Thresholds are multiples of each channel's
/// own median window energy.
struct SegmenterConfig {
  double window_s = 0.1;
  double hop_s = 0.05;
  double threshold_factor = 4.0;
  double merge_gap_s = 0.3;
  double min_event_s = 0.3;

  void validate() const;
};

struct EnergyPoint {
  double time_s;  // window center
  double energy;  // mean of squared samples
};

struct Interval {
  double start_s;
  double end_s;

  double length() const { return end_s - start_s; }
};

/// Window k starts at round(k * hop_s * rate) and spans round(window_s * rate)
/// samples. Throws InputError if the window does not fit in the signal.
std::vector<EnergyPoint> short_time_energy(std::span<const double> samples,
                                           double sample_rate, double window_s,
                                           double hop_s);

template <class Signal>
std::vector<EnergyPoint> short_time_energy(const Signal& s, double window_s, double hop_s) {
  return short_time_energy(s.samples, Signal::sample_rate, window_s, hop_s);
}

/// Windows whose energy exceeds threshold_factor x median, as time intervals.
std::vector<Interval> active_windows(std::span<const double> samples, double sample_rate,
                                     const SegmenterConfig& cfg);

/// Union of both channels' active windows, gap-merged and length-filtered.
/// Output is sorted and pairwise disjoint.
std::vector<Interval> detect_events(const AccelSignal& accel, const AudioSignal& audio,
                                    const SegmenterConfig& cfg = {});

double intersection_over_union(const Interval& a, const Interval& b);

}  // namespace coughdet
