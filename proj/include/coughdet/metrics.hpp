#pragma once

#include <span>
#include <vector>

namespace coughdet {

struct RocPoint {
  double fpr;
  double tpr;
};

struct RocCurve {
  std::vector<RocPoint> points;    // (0,0) ... (1,1), non-decreasing in both
  std::vector<double> thresholds;  // points[i] predicts positive for score >= thresholds[i]; first is +inf
};

/// Threshold sweep over the distinct scores, highest first. Labels are 0/1.
/// Throws InputError unless both classes are present.
RocCurve roc_curve(std::span<const double> scores, std::span<const int> labels);

/// Trapezoidal area under roc_curve. Accumulated in integer counts so the
/// result equals the Mann-Whitney statistic (ties counted 1/2) exactly.
double auc(std::span<const double> scores, std::span<const int> labels);

/// Trapezoidal area under an arbitrary polyline.
double trapezoid_area(std::span<const RocPoint> pts);

struct ConfusionMetrics {
  double specificity;
  double sensitivity;
  double accuracy;
};

/// Rows with score >= threshold are predicted positive.
ConfusionMetrics confusion_metrics(std::span<const double> scores, std::span<const int> labels,
                                   double threshold = 0.5);

/// TPR of the piecewise-linear curve at `fpr`; on a vertical segment the
/// highest TPR wins.
double interpolate_tpr(const RocCurve& roc, double fpr);

struct RocSummary {
  std::vector<RocPoint> mean_roc;  // vertically averaged on a uniform FPR grid
  double mean_auc = 0.0;
  double std_auc = 0.0;  // sample standard deviation; 0 for a single curve
};

/// Vertical averaging of `curves` on `grid_points` FPR values in [0, 1];
/// mean and sample std of `aucs`.
RocSummary summarize_rocs(std::span<const RocCurve> curves, std::span<const double> aucs,
                          std::size_t grid_points = 101);

double mean(std::span<const double> v);
double sample_std(std::span<const double> v);

}  // namespace coughdet
