#pragma once

#include <string>

#include "coughdet/feature_matrix.hpp"
#include "coughdet/signal.hpp"

namespace coughdet {

struct AccelFeatureConfig {
  std::size_t frame_len = 32;  // samples, power of two
  std::size_t segments = 10;   // frames per event

  void validate() const;
  std::size_t cols() const { return frame_len / 2 + 5; }
  std::string key() const;  // e.g. "psi32_c10"
};

/// One row per frame: frame_len/2+1 power bins, RMS, kurtosis, moving
/// average, crest factor. No window and no de-noising.
FeatureMatrix extract_accel_features(std::span<const double> accel,
                                     const AccelFeatureConfig& cfg);

inline FeatureMatrix extract_accel_features(const Event& e, const AccelFeatureConfig& cfg) {
  return extract_accel_features(e.accel.samples, cfg);
}

}  // namespace coughdet
