#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace coughdet {

struct SmoOptions {
  double tolerance = 1e-3;  // maximal KKT violation m(alpha) - M(alpha)
  long max_iterations = 10'000'000;
};

struct SmoSolution {
  Eigen::VectorXd alpha;
  double rho = 0.0;  // decision f(x) = sum_i alpha_i y_i K(x_i, x) - rho
  double objective = 0.0;  // dual objective sum(alpha) - 1/2 alpha^T Q alpha (maximized)
  double violation = 0.0;
  long iterations = 0;
};

Eigen::MatrixXd rbf_kernel_matrix(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double gamma);

/// Dual objective sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij.
double svm_dual_objective(const Eigen::MatrixXd& K, std::span<const double> y,
                          const Eigen::VectorXd& alpha);

/// Soft-margin C-SVM dual by sequential minimal optimization with
/// second-order working-set selection. Labels are +1/-1.
SmoSolution solve_smo(const Eigen::MatrixXd& K, std::span<const double> y, double C,
                      const SmoOptions& opt = {});

struct PlattScaling {
  double a = 0.0;
  double b = 0.0;
  double operator()(double decision) const;  // 1 / (1 + exp(a f + b))
};

/// Sigmoid fit of P(y=1 | f) with Platt's smoothed targets, Newton's method
/// with backtracking.
PlattScaling fit_platt(std::span<const double> decision, std::span<const int> labels);

}  // namespace coughdet
