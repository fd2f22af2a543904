#include "coughdet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

#include "coughdet/signal.hpp"

namespace coughdet {

namespace {

struct Counts {
  std::int64_t pos = 0, neg = 0;
};

Counts count_classes(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw InputError("metrics: score/label length mismatch");
  Counts c;
  for (int l : labels) {
    if (l == 1) ++c.pos;
    else if (l == 0) ++c.neg;
    else throw InputError("metrics: labels must be 0 or 1");
  }
  if (c.pos == 0 || c.neg == 0) throw InputError("metrics: both classes must be present");
  return c;
}

// Groups of tied scores, highest first, as (tp, fp) increments.
std::vector<std::pair<double, std::pair<std::int64_t, std::int64_t>>> tied_steps(
    std::span<const double> scores, std::span<const int> labels) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::vector<std::pair<double, std::pair<std::int64_t, std::int64_t>>> steps;
  for (std::size_t k = 0; k < order.size();) {
    const double s = scores[order[k]];
    std::int64_t tp = 0, fp = 0;
    for (; k < order.size() && scores[order[k]] == s; ++k) (labels[order[k]] == 1 ? tp : fp) += 1;
    steps.push_back({s, {tp, fp}});
  }
  return steps;
}

}  // namespace

RocCurve roc_curve(std::span<const double> scores, std::span<const int> labels) {
  const auto c = count_classes(scores, labels);
  RocCurve roc;
  roc.points.push_back({0.0, 0.0});
  roc.thresholds.push_back(std::numeric_limits<double>::infinity());
  std::int64_t tp = 0, fp = 0;
  for (const auto& [s, inc] : tied_steps(scores, labels)) {
    tp += inc.first;
    fp += inc.second;
    roc.points.push_back({static_cast<double>(fp) / static_cast<double>(c.neg),
                          static_cast<double>(tp) / static_cast<double>(c.pos)});
    roc.thresholds.push_back(s);
  }
  return roc;
}

double auc(std::span<const double> scores, std::span<const int> labels) {
  const auto c = count_classes(scores, labels);
  // sum over steps of dFP * (TP_prev + TP_new), i.e. twice the trapezoid area in count units
  std::int64_t twice = 0, tp = 0;
  for (const auto& [s, inc] : tied_steps(scores, labels)) {
    twice += inc.second * (2 * tp + inc.first);
    tp += inc.first;
  }
  return static_cast<double>(twice) / (2.0 * static_cast<double>(c.pos) * static_cast<double>(c.neg));
}

double trapezoid_area(std::span<const RocPoint> pts) {
  double a = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i)
    a += (pts[i].fpr - pts[i - 1].fpr) * (pts[i].tpr + pts[i - 1].tpr) / 2.0;
  return a;
}

ConfusionMetrics confusion_metrics(std::span<const double> scores, std::span<const int> labels,
                                   double threshold) {
  const auto c = count_classes(scores, labels);
  std::int64_t tp = 0, tn = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    if (labels[i] == 1 && predicted) ++tp;
    if (labels[i] == 0 && !predicted) ++tn;
  }
  return {static_cast<double>(tn) / static_cast<double>(c.neg), static_cast<double>(tp) / static_cast<double>(c.pos),
          static_cast<double>(tp + tn) / static_cast<double>(c.pos + c.neg)};
}

double interpolate_tpr(const RocCurve& roc, double fpr) {
  const auto& p = roc.points;
  // last point with p.fpr <= fpr
  auto it = std::upper_bound(p.begin(), p.end(), fpr, [](double x, const RocPoint& q) { return x < q.fpr; });
  if (it == p.begin()) return p.front().tpr;
  const auto& lo = *(it - 1);
  if (it == p.end() || lo.fpr == fpr) return lo.tpr;
  const auto& hi = *it;
  return lo.tpr + (hi.tpr - lo.tpr) * (fpr - lo.fpr) / (hi.fpr - lo.fpr);
}

double mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_std(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

RocSummary summarize_rocs(std::span<const RocCurve> curves, std::span<const double> aucs,
                          std::size_t grid_points) {
  if (grid_points < 2) throw InputError("summarize_rocs: need at least 2 grid points");
  RocSummary s;
  s.mean_auc = mean(aucs);
  s.std_auc = sample_std(aucs);
  if (curves.empty()) return s;
  s.mean_roc.resize(grid_points);
  for (std::size_t g = 0; g < grid_points; ++g) {
    const double x = static_cast<double>(g) / static_cast<double>(grid_points - 1);
    double acc = 0.0;
    for (const auto& c : curves) acc += interpolate_tpr(c, x);
    s.mean_roc[g] = {x, acc / static_cast<double>(curves.size())};
  }
  return s;
}

}  // namespace coughdet
