#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace coughdet {

/// C frame starts with skip ceil(len / C), clamped so every frame fits.
/// Throws InputError if len < frame_len or count < 1.
std::vector<std::size_t> frame_positions(std::size_t event_len, std::size_t frame_len,
                                         std::size_t count);

/// ceil(event_len / count)
std::size_t frame_skip(std::size_t event_len, std::size_t count);

double rms(std::span<const double> frame);

/// Pearson (non-excess) kurtosis m4 / m2^2 using central population moments.
/// A frame with (numerically) zero variance maps to 0.
double kurtosis(std::span<const double> samples);

/// Frame mean; the moving-average window is the whole frame.
double moving_average(std::span<const double> frame);

/// max|x| / rms, or 0 for an all-zero frame.
double crest_factor(std::span<const double> frame);

/// Fraction of adjacent pairs whose signs differ; zero counts as positive.
double zero_crossing_rate(std::span<const double> frame);

}  // namespace coughdet
