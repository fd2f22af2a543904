#pragma once

#include <span>
#include <string>
#include <vector>

#include "coughdet/classifier.hpp"
#include "coughdet/cross_validation.hpp"

namespace coughdet::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Exit codes: 0 success, 1 pipeline error, 2 usage error.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);  // args[0] is the program name

/// Default value lists of the feature grids.
std::vector<std::size_t> default_psi();
std::vector<std::size_t> default_accel_segments();
std::vector<std::size_t> default_mfcc();
std::vector<std::size_t> default_audio_frame_len();
std::vector<std::size_t> default_audio_segments();

/// Default value lists of the classifier grids.
std::vector<double> default_gamma1();    // 1e-7 .. 1e7, one per decade
std::vector<double> default_mix();       // 0, 0.05, .., 1 (gamma2 and gamma3)
std::vector<double> default_gamma4();    // 1e-7 .. 1e7
std::vector<int> default_gamma5();       // 10 .. 100 step 10

struct ClassifierGrid {
  std::vector<ClassifierKind> kinds;
  std::vector<double> gamma1, gamma2, gamma3, gamma4;
  std::vector<int> gamma5;
  std::string scores_path;
};

/// Per kind, in the order given: LR over gamma1 x gamma2 x gamma3, SVM over
/// gamma1 x gamma4, MLP over gamma3 x gamma5, external as a single entry.
std::vector<ClassifierSpec> expand_classifiers(const ClassifierGrid& g);

struct FeatureGrid {
  Modality modality = Modality::accel;
  std::vector<std::size_t> psi, segments, mfcc, frame_len;
};

std::vector<FeatureConfig> expand_features(const FeatureGrid& g);

}  // namespace coughdet::cli
