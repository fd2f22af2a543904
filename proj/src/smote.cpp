#include "coughdet/smote.hpp"

#include <algorithm>
#include <numeric>

#include "coughdet/random.hpp"
#include "coughdet/signal.hpp"

namespace coughdet {

std::vector<std::vector<std::size_t>> minority_neighbors(const Eigen::MatrixXd& X,
                                                         std::span<const std::size_t> rows,
                                                         std::size_t k) {
  const auto m = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd P(m, X.cols());
  for (Eigen::Index i = 0; i < m; ++i) P.row(i) = X.row(static_cast<Eigen::Index>(rows[i]));

  const Eigen::VectorXd sq = P.rowwise().squaredNorm();

  // One distance row at a time keeps memory linear in the minority count.
  std::vector<std::vector<std::size_t>> out(rows.size());
  std::vector<std::size_t> order;
  Eigen::VectorXd dist(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    dist.noalias() = P * P.row(i).transpose();
    dist = sq.array() - 2.0 * dist.array() + sq[i];
    order.resize(rows.size());
    std::iota(order.begin(), order.end(), 0);
    order.erase(order.begin() + i);
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](std::size_t a, std::size_t b) {
                        const double da = dist[static_cast<Eigen::Index>(a)];
                        const double db = dist[static_cast<Eigen::Index>(b)];
                        return da < db || (da == db && a < b);
                      });
    out[static_cast<std::size_t>(i)].assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  }
  return out;
}

SmoteResult smote(const Eigen::MatrixXd& X, std::span<const int> y, const SmoteConfig& cfg) {
  if (static_cast<std::size_t>(X.rows()) != y.size()) throw InputError("smote: label count mismatch");
  if (cfg.k_neighbors < 1) throw InputError("smote: k_neighbors must be >= 1");

  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] != 0 && y[i] != 1) throw InputError("smote: labels must be 0 or 1");
    (y[i] == 1 ? pos : neg).push_back(i);
  }
  if (pos.empty() || neg.empty()) throw InputError("smote: both classes must be present");

  const bool minority_is_pos = pos.size() <= neg.size();
  const auto& minority = minority_is_pos ? pos : neg;
  const std::size_t majority_count = minority_is_pos ? neg.size() : pos.size();
  const std::size_t target = cfg.target.value_or(majority_count);
  if (target < minority.size()) throw InputError("smote: target below current minority count");

  SmoteResult out;
  out.minority_label = minority_is_pos ? 1 : 0;
  const std::size_t n_new = target - minority.size();
  const auto n = static_cast<Eigen::Index>(y.size());
  out.X.resize(n + static_cast<Eigen::Index>(n_new), X.cols());
  out.X.topRows(n) = X;
  out.y.assign(y.begin(), y.end());
  out.origin.reserve(y.size() + n_new);
  for (std::size_t i = 0; i < y.size(); ++i) out.origin.push_back({i, i, 0.0, false});
  if (n_new == 0) return out;

  if (minority.size() <= cfg.k_neighbors)
    throw InputError("smote: minority class has " + std::to_string(minority.size()) +
                     " rows, need more than k_neighbors=" + std::to_string(cfg.k_neighbors) +
                     "; use a smaller k");

  const auto nn = minority_neighbors(X, minority, cfg.k_neighbors);
  Rng rng(cfg.rng_seed);
  for (std::size_t s = 0; s < n_new; ++s) {
    const std::size_t b = rng.index(minority.size());
    const std::size_t j = nn[b][rng.index(cfg.k_neighbors)];
    const double u = rng.uniform();
    const auto base = static_cast<Eigen::Index>(minority[b]);
    const auto nb = static_cast<Eigen::Index>(minority[j]);
    const auto a = X.row(base);
    const auto c = X.row(nb);
    // Clamp so round-off never leaves the segment's bounding box.
    out.X.row(n + static_cast<Eigen::Index>(s)) =
        (a + u * (c - a)).cwiseMax(a.cwiseMin(c)).cwiseMin(a.cwiseMax(c));
    out.y.push_back(out.minority_label);
    out.origin.push_back({minority[b], minority[j], u, true});
  }
  return out;
}

}  // namespace coughdet
