#include <doctest.h>

#include <cmath>
#include <numbers>

#include "coughdet/accel_features.hpp"
#include "coughdet/audio_features.hpp"
#include "coughdet/frame_stats.hpp"
#include "coughdet/spectral.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace coughdet;
using std::numbers::pi;

namespace {

double max_rel_err(const std::vector<double>& a, const std::vector<double>& b) {
  double scale = 0.0, err = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    scale = std::max(scale, std::abs(b[i]));
    err = std::max(err, std::abs(a[i] - b[i]));
  }
  return scale > 0 ? err / scale : err;
}

}  // namespace

TEST_SUITE("features_accel") {
  TEST_CASE("power spectrum of zeros and of a bin-centred cosine") {
    CHECK(power_spectrum(std::vector<double>(32, 0.0)) == std::vector<double>(17, 0.0));
    std::vector<double> x(32);
    for (std::size_t n = 0; n < 32; ++n) x[n] = std::cos(2 * pi * 4 * n / 32.0);
    const auto p = power_spectrum(x);
    REQUIRE(p.size() == 17);
    CHECK(p[4] == doctest::Approx(256.0));  // (N/2)^2
    for (std::size_t k = 0; k < p.size(); ++k)
      if (k != 4) CHECK(p[k] < 1e-9 * p[4]);
  }

  TEST_CASE("power spectrum agrees with a direct DFT") {
    Rng rng(31);
    for (std::size_t n : {4u, 16u, 32u, 64u, 256u}) {
      const auto x = testutil::random_vector(rng, n);
      CHECK(max_rel_err(power_spectrum(x), oracle::dft_power(x)) < 1e-9);
    }
    CHECK_THROWS_AS(power_spectrum(std::vector<double>(24, 1.0)), InputError);
  }

  TEST_CASE("Parseval with the unnormalized convention") {
    Rng rng(32);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = std::size_t{1} << (2 + rng.index(6));
      const auto x = testutil::random_vector(rng, n);
      const auto p = power_spectrum(x);
      double two_sided = p[0] + p[n / 2];
      for (std::size_t k = 1; k < n / 2; ++k) two_sided += 2 * p[k];
      double energy = 0;
      for (double v : x) energy += v * v;
      CHECK(std::abs(two_sided - n * energy) <= 1e-9 * n * energy);
    }
  }

  TEST_CASE("frame positions") {
    const auto s = frame_positions(190, 32, 10);
    REQUIRE(s.size() == 10);
    CHECK(frame_skip(190, 10) == 19);
    for (std::size_t i = 0; i < 10; ++i) CHECK(s[i] == std::min<std::size_t>(19 * i, 158));
    CHECK(frame_positions(32, 32, 7) == std::vector<std::size_t>(7, 0));
    CHECK(frame_skip(static_cast<std::size_t>(1.2 * kAudioRate), 100) == 265);
    CHECK_THROWS_AS(frame_positions(31, 32, 10), InputError);
  }

  TEST_CASE("frame positions always give C in-range frames") {
    Rng rng(33);
    for (int trial = 0; trial < 500; ++trial) {
      const std::size_t psi = std::size_t{16} << rng.index(3);
      const std::size_t len = psi + rng.index(500);
      const std::size_t c = 2 + rng.index(150);
      const auto s = frame_positions(len, psi, c);
      REQUIRE(s.size() == c);
      CHECK(s[0] == 0);
      for (std::size_t i = 0; i < c; ++i) {
        CHECK(s[i] + psi <= len);
        if (i) CHECK(s[i] >= s[i - 1]);
      }
    }
  }

  TEST_CASE("rms, mean, crest factor") {
    CHECK(rms(std::vector<double>(8, -3.0)) == doctest::Approx(3.0));
    CHECK(rms(std::vector<double>(8, 0.0)) == 0.0);
    std::vector<double> sine(1000);
    for (std::size_t i = 0; i < sine.size(); ++i) sine[i] = std::sin(2 * pi * i / 1000.0);
    CHECK(std::abs(rms(sine) - 1 / std::sqrt(2.0)) < 1e-6);
    CHECK(crest_factor(sine) == doctest::Approx(std::sqrt(2.0)).epsilon(0.01));
    CHECK(std::abs(moving_average(sine)) < 1e-12);
    CHECK(moving_average(std::vector<double>(5, 2.5)) == 2.5);
    CHECK(crest_factor(std::vector<double>(6, -2.0)) == doctest::Approx(1.0));
    CHECK(crest_factor(std::vector<double>(6, 0.0)) == 0.0);
    std::vector<double> spike(49, 0.0);
    spike[17] = 3.0;
    CHECK(crest_factor(spike) == doctest::Approx(7.0));

    Rng rng(34);
    const auto x = testutil::random_vector(rng, 37);
    double sum = 0;
    for (double v : x) sum += v;
    CHECK(moving_average(x) == sum / 37.0);
  }

  TEST_CASE("kurtosis") {
    Rng rng(35);
    CHECK(kurtosis(testutil::random_vector(rng, 200000)) == doctest::Approx(3.0).epsilon(0.2 / 3.0));
    std::vector<double> twopoint(100);
    for (std::size_t i = 0; i < 100; ++i) twopoint[i] = i % 2 ? 1.0 : -1.0;
    CHECK(kurtosis(twopoint) == doctest::Approx(1.0));
    CHECK(kurtosis(std::vector<double>(10, 4.0)) == 0.0);
    CHECK_THROWS_AS(kurtosis(std::vector<double>(3, 1.0)), InputError);
  }

  TEST_CASE("crest >= 1 and kurtosis >= 1 on random frames") {
    Rng rng(36);
    for (int trial = 0; trial < 300; ++trial) {
      auto x = testutil::random_vector(rng, 4 + rng.index(60), rng.uniform(0.01, 10));
      if (trial % 3 == 0)
        for (double& v : x) v = std::exp(v);  // skewed
      CHECK(crest_factor(x) >= 1.0 - 1e-12);
      CHECK(kurtosis(x) >= 1.0 - 1e-12);
    }
  }

  TEST_CASE("accel matrix shapes and layout") {
    Rng rng(37);
    const auto x = testutil::random_vector(rng, 190);
    for (std::size_t psi : {16u, 32u, 64u})
      for (std::size_t c : {5u, 10u}) {
        const auto m = extract_accel_features(x, {psi, c});
        CHECK(m.rows == c);
        CHECK(m.cols == psi / 2 + 5);
        CHECK(m.all_finite());
      }
    CHECK(extract_accel_features(x, {32, 10}).cols == 21);
    CHECK(extract_accel_features(x, {16, 5}).cols == 13);

    const AccelFeatureConfig cfg{32, 10};
    const auto m = extract_accel_features(x, cfg);
    const auto starts = frame_positions(190, 32, 10);
    for (std::size_t r = 0; r < 10; ++r) {
      const std::span<const double> f(x.data() + starts[r], 32);
      const std::vector<double> fv(f.begin(), f.end());
      const auto ps = oracle::dft_power(fv);
      for (std::size_t k = 0; k < 17; ++k) CHECK(m(r, k) == doctest::Approx(ps[k]).epsilon(1e-9));
      CHECK(m(r, 17) == rms(f));
      CHECK(m(r, 18) == kurtosis(f));
      CHECK(m(r, 19) == moving_average(f));
      CHECK(m(r, 20) == crest_factor(f));
    }
  }

  TEST_CASE("zero accel event gives an all-zero matrix") {
    const auto m = extract_accel_features(std::vector<double>(100, 0.0), {16, 5});
    for (double v : m.data) CHECK(v == 0.0);
  }

  TEST_CASE("accel config validation") {
    CHECK_THROWS_AS(extract_accel_features(std::vector<double>(100, 1.0), {24, 5}), InputError);
    CHECK_THROWS_AS(extract_accel_features(std::vector<double>(100, 1.0), {16, 1}), InputError);
    CHECK_THROWS_AS(extract_accel_features(std::vector<double>(10, 1.0), {16, 5}), InputError);
  }
}

TEST_SUITE("features_audio") {
  TEST_CASE("mel scale") {
    CHECK(hz_to_mel(700.0) == doctest::Approx(781.0).epsilon(0.5 / 781.0));
    CHECK(mel_to_hz(hz_to_mel(1234.5)) == doctest::Approx(1234.5));
  }

  TEST_CASE("filterbank structure") {
    const MelFilterbank two(2, 512, kAudioRate, 0.0, 11025.0);
    std::size_t peak[2];
    for (std::size_t m = 0; m < 2; ++m) {
      double best = -1, sum = 0;
      for (std::size_t k = 0; k < two.bins(); ++k) {
        const double w = two.weight(m, k);
        CHECK(w >= 0.0);
        CHECK(w <= 1.0);
        sum += w;
        if (w > best) best = w, peak[m] = k;
      }
      CHECK(sum > 0.0);
    }
    CHECK(peak[0] != peak[1]);

    const MelFilterbank bank(40, 1024, kAudioRate, 0.0, 11025.0);
    for (std::size_t m = 0; m < 40; ++m) {
      double sum = 0;
      for (std::size_t k = 0; k < bank.bins(); ++k) sum += bank.weight(m, k);
      CHECK(sum > 0.0);
    }
  }

  TEST_CASE("filters narrower than the bin spacing stay empty") {
    const MelFilterbank fine(65, 256, kAudioRate, 0.0, 11025.0);
    CHECK(fine.empty_filters() > 0);
    CHECK(MelFilterbank(40, 1024, kAudioRate, 0.0, 11025.0).empty_filters() == 0);
    AudioFeatureConfig cfg;
    cfg.mfcc_count = 65;
    cfg.frame_len = 256;
    Rng rng(40);
    const auto e = AudioFeatureExtractor(cfg).log_mel_energies(testutil::random_vector(rng, 256));
    std::size_t floored = 0;
    for (double v : e) floored += v == std::log(1e-10);
    CHECK(floored == fine.empty_filters());
  }

  TEST_CASE("every grid point builds a valid extractor") {
    for (std::size_t m : {13u, 26u, 39u, 52u, 65u})
      for (std::size_t f : {256u, 512u, 1024u, 2048u, 4096u}) {
        AudioFeatureConfig cfg;
        cfg.mfcc_count = m;
        cfg.frame_len = f;
        CHECK_NOTHROW(AudioFeatureExtractor{cfg});
      }
  }

  TEST_CASE("MFCC matches the reference implementation") {
    Rng rng(41);
    for (std::size_t f : {256u, 1024u})
      for (std::size_t m : {13u, 65u}) {
        AudioFeatureConfig cfg;
        cfg.mfcc_count = m;
        cfg.frame_len = f;
        const AudioFeatureExtractor ex(cfg);
        oracle::MfccParams p;
        p.mfcc = m;
        p.filters = cfg.resolved_mel_filters();
        for (int trial = 0; trial < 3; ++trial) {
          const auto x = testutil::random_vector(rng, f, 0.2);
          const auto got = ex.mfcc_frame(x);
          const auto ref = oracle::mfcc(x, p);
          for (std::size_t k = 0; k < m; ++k) CHECK(std::abs(got[k] - ref[k]) < 1e-6);
        }
      }
  }

  TEST_CASE("MFCC scale: only c0 moves, by log(a^2) sqrt(n_filters)") {
    AudioFeatureConfig cfg;
    const AudioFeatureExtractor ex(cfg);
    Rng rng(42);
    const auto x = testutil::random_vector(rng, cfg.frame_len, 0.1);
    auto y = x;
    const double a = 3.0;
    for (double& v : y) v *= a;
    const auto cx = ex.mfcc_frame(x), cy = ex.mfcc_frame(y);
    const double nf = static_cast<double>(cfg.resolved_mel_filters());
    // Power scales by a^2; the orthonormal DCT maps a constant shift s to s*sqrt(N) at index 0.
    CHECK(cy[0] - cx[0] == doctest::Approx(std::log(a * a) * std::sqrt(nf)).epsilon(1e-9));
    for (std::size_t k = 1; k < cx.size(); ++k) CHECK(std::abs(cy[k] - cx[k]) < 1e-9);
  }

  TEST_CASE("zero frame gives the DCT of the log floor") {
    AudioFeatureConfig cfg;
    const AudioFeatureExtractor ex(cfg);
    const auto c = ex.mfcc_frame(std::vector<double>(cfg.frame_len, 0.0));
    const double nf = static_cast<double>(cfg.resolved_mel_filters());
    CHECK(c[0] == doctest::Approx(std::log(1e-10) * std::sqrt(nf)));
    for (std::size_t k = 1; k < c.size(); ++k) CHECK(std::abs(c[k]) < 1e-9);
  }

  TEST_CASE("deltas") {
    const std::size_t rows = 9, cols = 3;
    std::vector<double> ramp(rows * cols), flat(rows * cols, 2.0);
    for (std::size_t t = 0; t < rows; ++t)
      for (std::size_t j = 0; j < cols; ++j) ramp[t * cols + j] = static_cast<double>(t);
    for (double v : deltas(flat, rows, cols)) CHECK(v == 0.0);
    const auto d = deltas(ramp, rows, cols);
    for (std::size_t t = 2; t + 2 < rows; ++t)
      for (std::size_t j = 0; j < cols; ++j) CHECK(d[t * cols + j] == 1.0);

    Rng rng(43);
    const auto x = testutil::random_vector(rng, 50 * 7);
    CHECK(deltas(x, 50, 7) == oracle::deltas(x, 50, 7));
    CHECK_THROWS_AS(deltas(std::vector<double>(3), 1, 3), InputError);
  }

  TEST_CASE("zero crossing rate") {
    CHECK(zero_crossing_rate(std::vector<double>(10, 0.5)) == 0.0);
    std::vector<double> alt(10);
    for (std::size_t i = 0; i < 10; ++i) alt[i] = i % 2 ? -1.0 : 1.0;
    CHECK(zero_crossing_rate(alt) == 1.0);
    CHECK(zero_crossing_rate(std::vector<double>{0.0, -0.0, 1.0, 0.0}) == 0.0);
    std::vector<double> sine(22050);
    for (std::size_t i = 0; i < sine.size(); ++i) sine[i] = std::sin(2 * pi * 100 * (i + 0.5) / kAudioRate);
    CHECK(std::abs(zero_crossing_rate(sine) * 22049.0 - 199.0) <= 1.0);
  }

  TEST_CASE("audio matrix shape and row layout") {
    Rng rng(44);
    const auto x = testutil::random_vector(rng, static_cast<std::size_t>(1.2 * kAudioRate), 0.1);
    AudioFeatureConfig cfg;
    cfg.mfcc_count = 26;
    cfg.segments = 100;
    const AudioFeatureExtractor ex(cfg);
    const auto m = ex.extract(x);
    CHECK(m.rows == 100);
    CHECK(m.cols == 80);
    CHECK(m.all_finite());

    const auto starts = frame_positions(x.size(), cfg.frame_len, cfg.segments);
    CHECK(starts[1] - starts[0] == 265);
    std::vector<double> cep(100 * 26);
    for (std::size_t r = 0; r < 100; ++r) {
      const std::span<const double> f(x.data() + starts[r], cfg.frame_len);
      const auto c = ex.mfcc_frame(f);
      for (std::size_t k = 0; k < 26; ++k) {
        cep[r * 26 + k] = c[k];
        CHECK(m(r, k) == c[k]);
      }
      CHECK(m(r, 78) == zero_crossing_rate(f));
      CHECK(m(r, 79) == kurtosis(f));
      CHECK(m(r, 78) >= 0.0);
      CHECK(m(r, 78) <= 1.0);
    }
    const auto d1 = oracle::deltas(cep, 100, 26), d2 = oracle::deltas(d1, 100, 26);
    for (std::size_t r = 0; r < 100; ++r)
      for (std::size_t k = 0; k < 26; ++k) {
        CHECK(m(r, 26 + k) == d1[r * 26 + k]);
        CHECK(m(r, 52 + k) == d2[r * 26 + k]);
      }

    AudioFeatureConfig small;
    small.mfcc_count = 13;
    small.segments = 50;
    const auto s = AudioFeatureExtractor(small).extract(x);
    CHECK(s.rows == 50);
    CHECK(s.cols == 41);
  }

  TEST_CASE("audio features are scale invariant except c0") {
    Rng rng(45);
    const auto x = testutil::random_vector(rng, 30000, 0.05);
    auto y = x;
    for (double& v : y) v *= 4.0;
    AudioFeatureConfig cfg;
    cfg.mfcc_count = 13;
    cfg.segments = 50;
    const AudioFeatureExtractor ex(cfg);
    const auto a = ex.extract(x), b = ex.extract(y);
    for (std::size_t r = 0; r < a.rows; ++r)
      for (std::size_t c = 0; c < a.cols; ++c) {
        if (c == 0) continue;
        CHECK(std::abs(a(r, c) - b(r, c)) <= 1e-9 * std::max(1.0, std::abs(a(r, c))));
      }
  }

  TEST_CASE("audio shorter than one frame is rejected") {
    AudioFeatureConfig cfg;
    CHECK_THROWS_AS(AudioFeatureExtractor(cfg).extract(std::vector<double>(1000, 0.1)), InputError);
    cfg.mfcc_count = 50;
    cfg.mel_filters = 40;
    CHECK_THROWS_AS(cfg.validate(), InputError);
  }
}
