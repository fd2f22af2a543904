#include "coughdet/spectral.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "coughdet/signal.hpp"

namespace coughdet {

void fft_inplace(std::span<std::complex<double>> a) {
  const std::size_t n = a.size();
  if (!is_power_of_two(n)) throw InputError("fft: length must be a power of two");

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    // Twiddles are evaluated directly rather than by recurrence to keep the
    // round-off at O(eps log n).
    for (std::size_t k = 0; k < half; ++k) {
      const double ang = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(len);
      const std::complex<double> w(std::cos(ang), std::sin(ang));
      for (std::size_t i = 0; i < n; i += len) {
        const auto u = a[i + k];
        const auto v = a[i + k + half] * w;
        a[i + k] = u + v;
        a[i + k + half] = u - v;
      }
    }
  }
}

std::vector<double> power_spectrum(std::span<const double> frame) {
  const std::size_t n = frame.size();
  if (!is_power_of_two(n)) throw InputError("power_spectrum: frame length must be a power of two");
  std::vector<std::complex<double>> buf(frame.begin(), frame.end());
  fft_inplace(buf);
  std::vector<double> out(n / 2 + 1);
  for (std::size_t k = 0; k <= n / 2; ++k) out[k] = std::norm(buf[k]);
  return out;
}

}  // namespace coughdet
