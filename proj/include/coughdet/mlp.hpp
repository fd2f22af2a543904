#pragma once

#include <cstdint>
#include <span>

#include <Eigen/Dense>

#include "coughdet/smote.hpp"

namespace coughdet {

/// One hidden ReLU layer, logistic output unit.
struct MlpWeights {
  Eigen::MatrixXd W1;  // inputs x hidden
  Eigen::VectorXd b1;
  Eigen::VectorXd w2;  // hidden
  double b2 = 0.0;
};

enum class MlpSolver {
  automatic,  // dual when rows < 2 * inputs
  primal,     // iterate on W1 directly
  dual,       // W1 = c * W1_0 + X^T B; iterate on (c, B) using K = X X^T
};

struct MlpOptions {
  int max_epochs = 2000;
  double tolerance = 1e-8;     // on the change of the penalized loss
  double learning_rate = 0.5;  // scaled by the input curvature, see fit_mlp
  MlpSolver solver = MlpSolver::automatic;
};

struct MlpFit {
  MlpWeights weights;
  int epochs = 0;
  bool converged = false;
  double loss = 0.0;
  double step = 0.0;
};

/// Glorot-uniform weights in (-r, r), r = sqrt(6 / (fan_in + fan_out)); zero biases.
MlpWeights init_mlp(Eigen::Index inputs, Eigen::Index hidden, std::uint64_t seed);

/// Mean cross-entropy + alpha / (2n) * (||W1||^2 + ||w2||^2). When `grad` is
/// non-null it receives the exact gradient by backpropagation.
double mlp_loss(const MlpWeights& p, const Eigen::MatrixXd& X, std::span<const int> y, double alpha,
                MlpWeights* grad = nullptr);

Eigen::VectorXd mlp_forward(const MlpWeights& p, const Eigen::MatrixXd& X);

/// Full-batch gradient descent with one fixed step for the whole run. Every
/// first-layer gradient lies in the row space of X and weight decay only
/// rescales W1, so the dual solver produces the same iterates in exact
/// arithmetic at O(n^2 h) instead of O(n d h) per epoch.
///
/// When `origin` is non-empty, row i of X must equal (1 - u) X[base] + u X[neighbor]
/// with base and neighbor indexing the leading non-synthetic rows (as produced
/// by smote). The dual solver then works with the Gram matrix of those rows only.
MlpFit fit_mlp(const Eigen::MatrixXd& X, std::span<const int> y, Eigen::Index hidden, double alpha,
               std::uint64_t seed, const MlpOptions& opt = {}, std::span<const RowOrigin> origin = {});

}  // namespace coughdet
