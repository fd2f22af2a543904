#include <doctest.h>

#include <cmath>

#include "coughdet/metrics.hpp"
#include "coughdet/random.hpp"
#include "coughdet/signal.hpp"
#include "oracles.hpp"

using namespace coughdet;

namespace {

// Scores drawn from a handful of levels so that ties are common.
void random_scores(Rng& rng, std::size_t n, std::vector<double>& s, std::vector<int>& y) {
  s.resize(n);
  y.resize(n);
  const std::size_t levels = 2 + rng.index(30);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = rng.uniform() < 0.4 ? 1 : 0;
    s[i] = static_cast<double>(rng.index(levels)) / static_cast<double>(levels) + (y[i] ? 0.1 : 0.0);
  }
  y[0] = 1;
  y[1] = 0;
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("confusion metrics: hand-built table") {
    // TP=3 FN=1 TN=4 FP=2
    const std::vector<double> s{0.9, 0.8, 0.7, 0.2, 0.1, 0.3, 0.4, 0.45, 0.6, 0.55};
    const std::vector<int> y{1, 1, 1, 1, 0, 0, 0, 0, 0, 0};
    const auto m = confusion_metrics(s, y);
    CHECK(m.specificity == doctest::Approx(4.0 / 6.0));
    CHECK(m.sensitivity == doctest::Approx(0.75));
    CHECK(m.accuracy == doctest::Approx(0.7));
  }

  TEST_CASE("confusion metrics: perfect and inverted") {
    const std::vector<double> s{0.9, 0.6, 0.1, 0.2};
    const std::vector<int> y{1, 1, 0, 0};
    const auto good = confusion_metrics(s, y);
    CHECK(good.specificity == 1.0);
    CHECK(good.sensitivity == 1.0);
    CHECK(good.accuracy == 1.0);
    const std::vector<int> flipped{0, 0, 1, 1};
    const auto bad = confusion_metrics(s, flipped);
    CHECK(bad.specificity == 0.0);
    CHECK(bad.sensitivity == 0.0);
    CHECK(bad.accuracy == 0.0);
    const std::vector<int> both{1, 0};
    CHECK(confusion_metrics(std::vector<double>{0.5, 0.49}, both, 0.5).sensitivity == 1.0);
    CHECK_THROWS_AS(confusion_metrics(std::vector<double>{0.5}, std::vector<int>{1}), InputError);
  }

  TEST_CASE("ROC of separated scores passes through (0,1)") {
    const std::vector<double> s{0.9, 0.8, 0.3, 0.1};
    const std::vector<int> y{1, 1, 0, 0};
    const auto roc = roc_curve(s, y);
    CHECK(roc.points.front().fpr == 0.0);
    CHECK(roc.points.front().tpr == 0.0);
    CHECK(roc.points.back().fpr == 1.0);
    CHECK(roc.points.back().tpr == 1.0);
    CHECK(std::isinf(roc.thresholds.front()));
    bool corner = false;
    for (const auto& p : roc.points) corner |= p.fpr == 0.0 && p.tpr == 1.0;
    CHECK(corner);
    CHECK(auc(s, y) == 1.0);
    CHECK(interpolate_tpr(roc, 0.0) == 1.0);
  }

  TEST_CASE("AUC equals the pairwise statistic exactly") {
    Rng rng(81);
    std::vector<double> s;
    std::vector<int> y;
    for (int trial = 0; trial < 100; ++trial) {
      random_scores(rng, 2 + rng.index(199), s, y);
      CHECK(auc(s, y) == oracle::pairwise_auc(s, y));
    }
  }

  TEST_CASE("AUC is invariant under x -> x^3") {
    Rng rng(82);
    std::vector<double> s;
    std::vector<int> y;
    for (int trial = 0; trial < 50; ++trial) {
      random_scores(rng, 50 + rng.index(150), s, y);
      for (double& v : s) v -= 0.5;
      auto cube = s;
      for (double& v : cube) v = v * v * v;
      CHECK(auc(cube, y) == auc(s, y));
    }
  }

  TEST_CASE("ROC is monotone and AUC matches the trapezoid") {
    Rng rng(83);
    std::vector<double> s;
    std::vector<int> y;
    for (int trial = 0; trial < 50; ++trial) {
      random_scores(rng, 10 + rng.index(100), s, y);
      const auto roc = roc_curve(s, y);
      for (std::size_t i = 1; i < roc.points.size(); ++i) {
        CHECK(roc.points[i].fpr >= roc.points[i - 1].fpr);
        CHECK(roc.points[i].tpr >= roc.points[i - 1].tpr);
        CHECK(roc.thresholds[i] < roc.thresholds[i - 1]);
      }
      CHECK(trapezoid_area(roc.points) == doctest::Approx(auc(s, y)).epsilon(1e-12));
    }
  }

  TEST_CASE("random labels give AUC near one half") {
    Rng rng(84);
    std::vector<double> s(20000);
    std::vector<int> y(20000);
    for (std::size_t i = 0; i < s.size(); ++i) {
      s[i] = rng.uniform();
      y[i] = rng.uniform() < 0.3;
    }
    CHECK(std::abs(auc(s, y) - 0.5) < 0.05);
  }

  TEST_CASE("one-class labels are rejected") {
    const std::vector<double> s{0.1, 0.2};
    CHECK_THROWS_AS(auc(s, std::vector<int>{1, 1}), InputError);
    CHECK_THROWS_AS(roc_curve(s, std::vector<int>{0, 0}), InputError);
    CHECK_THROWS_AS(auc(s, std::vector<int>{1}), InputError);
  }

  TEST_CASE("summary statistics") {
    CHECK(mean(std::vector<double>{0.9, 1.0}) == doctest::Approx(0.95));
    CHECK(sample_std(std::vector<double>{0.9, 1.0}) == doctest::Approx(0.0707).epsilon(1e-3));
    CHECK(sample_std(std::vector<double>{0.8}) == 0.0);
  }

  TEST_CASE("identical folds average to themselves") {
    const std::vector<double> s{0.9, 0.7, 0.6, 0.4, 0.3, 0.1};
    const std::vector<int> y{1, 0, 1, 1, 0, 0};
    const auto roc = roc_curve(s, y);
    const std::vector<RocCurve> curves{roc, roc, roc};
    const double a = auc(s, y);
    const std::vector<double> aucs{a, a, a};
    const auto sum = summarize_rocs(curves, aucs);
    REQUIRE(sum.mean_roc.size() == 101);
    CHECK(sum.std_auc == 0.0);
    CHECK(sum.mean_auc == a);
    for (const auto& p : sum.mean_roc) CHECK(p.tpr == interpolate_tpr(roc, p.fpr));
    CHECK(sum.mean_roc.front().fpr == 0.0);
    CHECK(sum.mean_roc.back().fpr == 1.0);
    CHECK(sum.mean_roc.back().tpr == 1.0);
  }

  TEST_CASE("mean ROC area tracks the mean fold AUC") {
    Rng rng(85);
    std::vector<RocCurve> curves;
    std::vector<double> aucs;
    for (int f = 0; f < 14; ++f) {
      std::vector<double> s(400);
      std::vector<int> y(400);
      for (std::size_t i = 0; i < s.size(); ++i) {
        y[i] = i % 3 == 0;
        s[i] = rng.normal(y[i] ? 1.2 : 0.0, 1.0);
      }
      curves.push_back(roc_curve(s, y));
      aucs.push_back(auc(s, y));
    }
    const auto sum = summarize_rocs(curves, aucs);
    CHECK(std::abs(trapezoid_area(sum.mean_roc) - sum.mean_auc) < 0.01);
  }
}
