#include "coughdet/frame_stats.hpp"

#include <algorithm>
#include <cmath>

#include "coughdet/signal.hpp"

namespace coughdet {

std::size_t frame_skip(std::size_t event_len, std::size_t count) {
  if (count == 0) throw InputError("frame_skip: count must be positive");
  return (event_len + count - 1) / count;
}

std::vector<std::size_t> frame_positions(std::size_t event_len, std::size_t frame_len,
                                         std::size_t count) {
  if (frame_len == 0) throw InputError("frame_positions: frame length must be positive");
  if (event_len < frame_len)
    throw InputError("frame_positions: event of " + std::to_string(event_len) +
                     " samples is shorter than one frame of " + std::to_string(frame_len));
  const std::size_t skip = frame_skip(event_len, count);
  const std::size_t last = event_len - frame_len;
  std::vector<std::size_t> starts(count);
  for (std::size_t i = 0; i < count; ++i) starts[i] = std::min(i * skip, last);
  return starts;
}

double rms(std::span<const double> frame) {
  if (frame.empty()) return 0.0;
  double acc = 0.0;
  for (double v : frame) acc += v * v;
  return std::sqrt(acc / static_cast<double>(frame.size()));
}

double kurtosis(std::span<const double> x) {
  if (x.size() < 4) throw InputError("kurtosis: need at least 4 samples");
  const double n = static_cast<double>(x.size());
  double mean = 0.0, peak = 0.0;
  for (double v : x) {
    mean += v;
    peak = std::max(peak, std::abs(v));
  }
  mean /= n;
  double m2 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = (v - mean) * (v - mean);
    m2 += d;
    m4 += d * d;
  }
  m2 /= n;
  m4 /= n;
  // Variance below round-off of the frame's own amplitude counts as zero.
  if (m2 <= 1e-14 * peak * peak) return 0.0;
  return m4 / (m2 * m2);
}

double moving_average(std::span<const double> frame) {
  if (frame.empty()) return 0.0;
  double acc = 0.0;
  for (double v : frame) acc += v;
  return acc / static_cast<double>(frame.size());
}

double crest_factor(std::span<const double> frame) {
  const double r = rms(frame);
  if (r == 0.0) return 0.0;
  double peak = 0.0;
  for (double v : frame) peak = std::max(peak, std::abs(v));
  return peak / r;
}

double zero_crossing_rate(std::span<const double> frame) {
  if (frame.size() < 2) return 0.0;
  std::size_t crossings = 0;
  for (std::size_t i = 1; i < frame.size(); ++i)
    if ((frame[i - 1] >= 0.0) != (frame[i] >= 0.0)) ++crossings;
  return static_cast<double>(crossings) / static_cast<double>(frame.size() - 1);
}

}  // namespace coughdet
