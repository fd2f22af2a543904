#pragma once

#include <span>
#include <string>
#include <vector>

#include "coughdet/feature_matrix.hpp"
#include "coughdet/signal.hpp"

namespace coughdet {

struct AudioFeatureConfig {
  std::size_t mfcc_count = 26;   // M
  std::size_t frame_len = 1024;  // F, power of two
  std::size_t segments = 100;    // S
  std::size_t mel_filters = 0;   // 0 selects max(M, 40)
  double fmin = 0.0;
  double fmax = 11025.0;
  double preemphasis = 0.97;
  double log_floor = 1e-10;

  std::size_t resolved_mel_filters() const;
  void validate() const;
  std::size_t cols() const { return 3 * mfcc_count + 2; }
  std::string key() const;  // e.g. "m26_f1024_s100"
};

/// mel(f) = 2595 log10(1 + f / 700)
double hz_to_mel(double hz);
double mel_to_hz(double mel);

/// Triangular filters (rows) over the F/2+1 power-spectrum bins. Centers are
/// equally spaced in mel between fmin and fmax; filter m rises from center
/// m-1 to 1 at center m and falls to 0 at center m+1, sampled at the bin
/// frequencies. A filter narrower than the bin spacing may cover no bin.
class MelFilterbank {
 public:
  MelFilterbank(std::size_t filters, std::size_t frame_len, double sample_rate, double fmin,
                double fmax);

  std::size_t filters() const { return filters_; }
  std::size_t bins() const { return bins_; }
  std::size_t empty_filters() const { return empty_; }
  double weight(std::size_t filter, std::size_t bin) const { return w_[filter * bins_ + bin]; }

  /// Filter energies for a one-sided power spectrum.
  std::vector<double> apply(std::span<const double> power) const;

 private:
  std::size_t filters_, bins_;
  std::size_t empty_ = 0;
  std::vector<double> w_;
  std::vector<std::pair<std::size_t, std::size_t>> support_;  // [first, last) bins
};

/// Orthonormal DCT-II rows 0..keep-1 for inputs of length n.
std::vector<double> dct2_orthonormal(std::span<const double> x, std::size_t keep);

/// Regression deltas along rows (time), half-window 2, edge rows replicated.
/// Input and output are row-major rows x cols.
std::vector<double> deltas(std::span<const double> seq, std::size_t rows, std::size_t cols);

/// Precomputes the filterbank and window for one configuration; immutable and
/// safe to share across threads.
class AudioFeatureExtractor {
 public:
  explicit AudioFeatureExtractor(AudioFeatureConfig cfg);

  const AudioFeatureConfig& config() const { return cfg_; }
  const MelFilterbank& filterbank() const { return bank_; }

  /// Pre-emphasis, Hamming window, power spectrum, mel energies, log with
  /// floor, DCT, first M coefficients.
  std::vector<double> mfcc_frame(std::span<const double> frame) const;

  /// log mel energies of one frame (before the DCT)
  std::vector<double> log_mel_energies(std::span<const double> frame) const;

  /// (S, 3M+2) rows of MFCC, delta, delta-delta, ZCR, kurtosis.
  FeatureMatrix extract(std::span<const double> audio) const;

 private:
  AudioFeatureConfig cfg_;
  MelFilterbank bank_;
  std::vector<double> window_;
  std::vector<double> dct_;  // M x filters, row-major
};

inline FeatureMatrix extract_audio_features(const Event& e, const AudioFeatureConfig& cfg) {
  return AudioFeatureExtractor(cfg).extract(e.audio.samples);
}

}  // namespace coughdet
