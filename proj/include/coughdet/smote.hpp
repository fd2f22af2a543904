#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace coughdet {

struct SmoteConfig {
  std::size_t k_neighbors = 5;
  std::optional<std::size_t> target;  // minority count after balancing; default majority count
  std::uint64_t rng_seed = 0;
};

/// Where an output row came from. Original rows carry base == neighbor and u == 0.
struct RowOrigin {
  std::size_t base;
  std::size_t neighbor;
  double u;
  bool synthetic;
};

struct SmoteResult {
  Eigen::MatrixXd X;
  std::vector<int> y;
  std::vector<RowOrigin> origin;
  int minority_label = 1;
};

/// k nearest minority neighbors (Euclidean, exact) of each minority row, as
/// indices into `minority_rows`. Ties resolve to the lower index.
std::vector<std::vector<std::size_t>> minority_neighbors(const Eigen::MatrixXd& X,
                                                         std::span<const std::size_t> minority_rows,
                                                         std::size_t k);

/// Appends target - minority synthetic rows s = x + u (x_nn - x) after the
/// unchanged input rows. Labels are 0/1.
SmoteResult smote(const Eigen::MatrixXd& X, std::span<const int> y, const SmoteConfig& cfg);

}  // namespace coughdet
