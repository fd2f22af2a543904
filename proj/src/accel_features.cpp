#include "coughdet/accel_features.hpp"

#include <algorithm>

#include "coughdet/frame_stats.hpp"
#include "coughdet/spectral.hpp"

namespace coughdet {

void AccelFeatureConfig::validate() const {
  if (!is_power_of_two(frame_len) || frame_len < 4)
    throw InputError("accel features: frame length must be a power of two >= 4");
  if (segments < 2) throw InputError("accel features: need at least 2 segments");
}

std::string AccelFeatureConfig::key() const {
  return "psi" + std::to_string(frame_len) + "_c" + std::to_string(segments);
}

FeatureMatrix extract_accel_features(std::span<const double> accel,
                                     const AccelFeatureConfig& cfg) {
  cfg.validate();
  const auto starts = frame_positions(accel.size(), cfg.frame_len, cfg.segments);
  FeatureMatrix m(cfg.segments, cfg.cols(), Modality::accel);
  const std::size_t bins = cfg.frame_len / 2 + 1;
  for (std::size_t r = 0; r < starts.size(); ++r) {
    const auto frame = accel.subspan(starts[r], cfg.frame_len);
    const auto spec = power_spectrum(frame);
    auto row = m.row(r);
    std::copy(spec.begin(), spec.end(), row.begin());
    row[bins] = rms(frame);
    row[bins + 1] = kurtosis(frame);
    row[bins + 2] = moving_average(frame);
    row[bins + 3] = crest_factor(frame);
  }
  return m;
}

}  // namespace coughdet
