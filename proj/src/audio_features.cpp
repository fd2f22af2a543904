#include "coughdet/audio_features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "coughdet/frame_stats.hpp"
#include "coughdet/spectral.hpp"

namespace coughdet {

std::size_t AudioFeatureConfig::resolved_mel_filters() const {
  return mel_filters != 0 ? mel_filters : std::max<std::size_t>(mfcc_count, 40);
}

void AudioFeatureConfig::validate() const {
  if (mfcc_count == 0) throw InputError("audio features: mfcc_count must be positive");
  if (!is_power_of_two(frame_len)) throw InputError("audio features: frame length must be a power of two");
  if (segments < 2) throw InputError("audio features: need at least 2 segments");
  if (mfcc_count > resolved_mel_filters())
    throw InputError("audio features: more MFCCs than mel filters");
  if (!(fmin >= 0 && fmin < fmax && fmax <= kAudioRate / 2))
    throw InputError("audio features: require 0 <= fmin < fmax <= 11025 Hz");
  if (!(log_floor > 0)) throw InputError("audio features: log floor must be positive");
}

std::string AudioFeatureConfig::key() const {
  std::string k = "m" + std::to_string(mfcc_count) + "_f" + std::to_string(frame_len) + "_s" +
                  std::to_string(segments);
  if (mel_filters != 0) k += "_nf" + std::to_string(mel_filters);
  return k;
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

MelFilterbank::MelFilterbank(std::size_t filters, std::size_t frame_len, double sample_rate,
                             double fmin, double fmax)
    : filters_(filters), bins_(frame_len / 2 + 1), w_(filters * bins_, 0.0) {
  if (filters == 0) throw InputError("mel filterbank: need at least one filter");
  if (!(fmin >= 0 && fmin < fmax && fmax <= sample_rate / 2))
    throw InputError("mel filterbank: require 0 <= fmin < fmax <= sample_rate/2");

  const double lo = hz_to_mel(fmin), hi = hz_to_mel(fmax);
  std::vector<double> edges(filters + 2);
  for (std::size_t i = 0; i < edges.size(); ++i)
    edges[i] = mel_to_hz(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(filters + 1));

  const double bin_hz = sample_rate / static_cast<double>(frame_len);
  support_.resize(filters);
  for (std::size_t m = 0; m < filters; ++m) {
    const double left = edges[m], center = edges[m + 1], right = edges[m + 2];
    std::size_t first = 0, last = 0;
    for (std::size_t k = 0; k < bins_; ++k) {
      const double f = static_cast<double>(k) * bin_hz;
      double v = 0.0;
      if (f > left && f <= center)
        v = (f - left) / (center - left);
      else if (f > center && f < right)
        v = (right - f) / (right - center);
      if (v > 0.0) {
        w_[m * bins_ + k] = v;
        if (last == 0) first = k;
        last = k + 1;
      }
    }
    // Low filters can fall between two bins when F is small; they stay empty
    // and their energy sits at the log floor.
    if (last == 0) ++empty_;
    support_[m] = {first, last};
  }
}

std::vector<double> MelFilterbank::apply(std::span<const double> power) const {
  if (power.size() != bins_) throw InputError("mel filterbank: spectrum length mismatch");
  std::vector<double> out(filters_, 0.0);
  for (std::size_t m = 0; m < filters_; ++m) {
    double acc = 0.0;
    for (std::size_t k = support_[m].first; k < support_[m].second; ++k)
      acc += w_[m * bins_ + k] * power[k];
    out[m] = acc;
  }
  return out;
}

std::vector<double> dct2_orthonormal(std::span<const double> x, std::size_t keep) {
  const std::size_t n = x.size();
  std::vector<double> out(std::min(keep, n), 0.0);
  for (std::size_t k = 0; k < out.size(); ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      acc += x[i] * std::cos(std::numbers::pi * static_cast<double>(k) * (2.0 * static_cast<double>(i) + 1.0) /
                             (2.0 * static_cast<double>(n)));
    out[k] = acc * std::sqrt((k == 0 ? 1.0 : 2.0) / static_cast<double>(n));
  }
  return out;
}

std::vector<double> deltas(std::span<const double> seq, std::size_t rows, std::size_t cols) {
  if (seq.size() != rows * cols) throw InputError("deltas: shape mismatch");
  if (rows < 2) throw InputError("deltas: need at least 2 rows");
  constexpr int kHalf = 2;
  constexpr double kNorm = 2.0 * (1 * 1 + 2 * 2);
  const auto at = [&](long t, std::size_t c) {
    const long r = std::clamp<long>(t, 0, static_cast<long>(rows) - 1);
    return seq[static_cast<std::size_t>(r) * cols + c];
  };
  std::vector<double> out(seq.size());
  for (std::size_t t = 0; t < rows; ++t)
    for (std::size_t c = 0; c < cols; ++c) {
      double acc = 0.0;
      for (int n = 1; n <= kHalf; ++n)
        acc += n * (at(static_cast<long>(t) + n, c) - at(static_cast<long>(t) - n, c));
      out[t * cols + c] = acc / kNorm;
    }
  return out;
}

namespace {

AudioFeatureConfig validated(AudioFeatureConfig cfg) {
  cfg.validate();
  return cfg;
}

}  // namespace

AudioFeatureExtractor::AudioFeatureExtractor(AudioFeatureConfig cfg)
    : cfg_(validated(cfg)),
      bank_(cfg_.resolved_mel_filters(), cfg_.frame_len, kAudioRate, cfg_.fmin, cfg_.fmax),
      window_(cfg_.frame_len) {
  const double denom = static_cast<double>(cfg_.frame_len - 1);
  for (std::size_t n = 0; n < cfg_.frame_len; ++n)
    window_[n] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / denom);

  const std::size_t nf = bank_.filters();
  dct_.resize(cfg_.mfcc_count * nf);
  std::vector<double> unit(nf, 0.0);
  for (std::size_t i = 0; i < nf; ++i) {
    unit[i] = 1.0;
    const auto col = dct2_orthonormal(unit, cfg_.mfcc_count);
    for (std::size_t k = 0; k < col.size(); ++k) dct_[k * nf + i] = col[k];
    unit[i] = 0.0;
  }
}

std::vector<double> AudioFeatureExtractor::log_mel_energies(std::span<const double> frame) const {
  if (frame.size() != cfg_.frame_len) throw InputError("mfcc: frame length mismatch");
  std::vector<double> buf(frame.size());
  buf[0] = frame[0] * window_[0];
  for (std::size_t n = 1; n < frame.size(); ++n)
    buf[n] = (frame[n] - cfg_.preemphasis * frame[n - 1]) * window_[n];
  auto energies = bank_.apply(power_spectrum(buf));
  for (double& e : energies) e = std::log(std::max(e, cfg_.log_floor));
  return energies;
}

std::vector<double> AudioFeatureExtractor::mfcc_frame(std::span<const double> frame) const {
  const auto logmel = log_mel_energies(frame);
  const std::size_t nf = logmel.size();
  std::vector<double> out(cfg_.mfcc_count, 0.0);
  for (std::size_t k = 0; k < out.size(); ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < nf; ++i) acc += dct_[k * nf + i] * logmel[i];
    out[k] = acc;
  }
  return out;
}

FeatureMatrix AudioFeatureExtractor::extract(std::span<const double> audio) const {
  const std::size_t S = cfg_.segments, M = cfg_.mfcc_count;
  const auto starts = frame_positions(audio.size(), cfg_.frame_len, S);

  std::vector<double> cep(S * M);
  FeatureMatrix out(S, cfg_.cols(), Modality::audio);
  for (std::size_t r = 0; r < S; ++r) {
    const auto frame = audio.subspan(starts[r], cfg_.frame_len);
    const auto c = mfcc_frame(frame);
    std::copy(c.begin(), c.end(), cep.begin() + static_cast<std::ptrdiff_t>(r * M));
    out(r, 3 * M) = zero_crossing_rate(frame);
    out(r, 3 * M + 1) = kurtosis(frame);
  }
  const auto d1 = deltas(cep, S, M);
  const auto d2 = deltas(d1, S, M);
  for (std::size_t r = 0; r < S; ++r)
    for (std::size_t j = 0; j < M; ++j) {
      out(r, j) = cep[r * M + j];
      out(r, M + j) = d1[r * M + j];
      out(r, 2 * M + j) = d2[r * M + j];
    }
  return out;
}

}  // namespace coughdet
