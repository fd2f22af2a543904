#pragma once

#include <complex>
#include <span>
#include <vector>

namespace coughdet {

constexpr bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// In-place iterative radix-2 forward DFT, unnormalized:
/// X[k] = sum_n x[n] exp(-2 pi i k n / N). Length must be a power of two.
void fft_inplace(std::span<std::complex<double>> data);

/// |X[k]|^2 for k = 0..N/2 of the unnormalized forward DFT.
/// Throws InputError if the frame length is not a power of two.
std::vector<double> power_spectrum(std::span<const double> frame);

}  // namespace coughdet
