#pragma once

#include <span>

#include <Eigen/Dense>

namespace coughdet {

struct LogisticOptions {
  int max_iterations = 5000;
  double tolerance = 1e-8;  // on the change of the full objective
};

struct LogisticFit {
  Eigen::VectorXd w;
  double b = 0.0;
  int iterations = 0;
  bool converged = false;
  double objective = 0.0;
};

/// Mean logistic loss plus (l2/2)||w||^2; the intercept is unpenalized.
double logistic_smooth_loss(const Eigen::MatrixXd& X, std::span<const int> y,
                            const Eigen::VectorXd& w, double b, double l2);

/// Gradient of logistic_smooth_loss; returns d/dw and writes d/db.
Eigen::VectorXd logistic_smooth_gradient(const Eigen::MatrixXd& X, std::span<const int> y,
                                         const Eigen::VectorXd& w, double b, double l2,
                                         double* grad_b);

/// Minimizes logistic_smooth_loss + l1 ||w||_1 by accelerated proximal gradient
/// descent (FISTA with restarts) with backtracking on the Lipschitz estimate. X is used as given (no
/// standardization here).
LogisticFit fit_elastic_net_logistic(const Eigen::MatrixXd& X, std::span<const int> y, double l1,
                                     double l2, const LogisticOptions& opt = {});

/// Largest eigenvalue of [X 1]^T [X 1] by power iteration.
double top_gram_eigenvalue(const Eigen::MatrixXd& X, int iterations = 30);

}  // namespace coughdet
