#include "coughdet/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "coughdet/signal.hpp"

namespace coughdet {

Eigen::MatrixXd rbf_kernel_matrix(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double gamma) {
  const Eigen::VectorXd a2 = A.rowwise().squaredNorm();
  const Eigen::VectorXd b2 = B.rowwise().squaredNorm();
  Eigen::MatrixXd D = -2.0 * (A * B.transpose());
  D.colwise() += a2;
  D.rowwise() += b2.transpose();
  return (-gamma * D.cwiseMax(0.0)).array().exp().matrix();
}

double svm_dual_objective(const Eigen::MatrixXd& K, std::span<const double> y,
                          const Eigen::VectorXd& alpha) {
  const auto n = alpha.size();
  Eigen::VectorXd ay(n);
  for (Eigen::Index i = 0; i < n; ++i) ay[i] = alpha[i] * y[static_cast<std::size_t>(i)];
  return alpha.sum() - 0.5 * ay.dot(K * ay);
}

SmoSolution solve_smo(const Eigen::MatrixXd& K, std::span<const double> y, double C,
                      const SmoOptions& opt) {
  const Eigen::Index n = K.rows();
  if (K.cols() != n || static_cast<std::size_t>(n) != y.size())
    throw InputError("smo: kernel / label shape mismatch");
  if (!(C > 0)) throw InputError("smo: C must be positive");
  constexpr double kTau = 1e-12;
  constexpr double kInf = std::numeric_limits<double>::infinity();

  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd G = Eigen::VectorXd::Constant(n, -1.0);  // gradient of 1/2 a'Qa - e'a
  auto yy = [&](Eigen::Index i) { return y[static_cast<std::size_t>(i)]; };
  auto in_up = [&](Eigen::Index t) { return (yy(t) > 0 && alpha[t] < C) || (yy(t) < 0 && alpha[t] > 0); };
  auto in_low = [&](Eigen::Index t) { return (yy(t) > 0 && alpha[t] > 0) || (yy(t) < 0 && alpha[t] < C); };

  SmoSolution sol;
  long it = 0;
  for (; it < opt.max_iterations; ++it) {
    double gmax = -kInf, gmin = kInf;
    Eigen::Index i = -1;
    for (Eigen::Index t = 0; t < n; ++t)
      if (in_up(t) && -yy(t) * G[t] > gmax) {
        gmax = -yy(t) * G[t];
        i = t;
      }
    Eigen::Index j = -1;
    double best = kInf;
    for (Eigen::Index t = 0; t < n; ++t) {
      if (!in_low(t)) continue;
      const double v = -yy(t) * G[t];
      gmin = std::min(gmin, v);
      if (i < 0) continue;
      const double b = gmax - v;
      if (b > 0) {
        double a = K(i, i) + K(t, t) - 2.0 * K(i, t);
        if (a <= 0) a = kTau;
        if (-(b * b) / a < best) {
          best = -(b * b) / a;
          j = t;
        }
      }
    }
    sol.violation = gmax - gmin;
    if (i < 0 || j < 0 || sol.violation < opt.tolerance) break;

    const double yi = yy(i), yj = yy(j);
    const double ai_old = alpha[i], aj_old = alpha[j];
    double quad = K(i, i) + K(j, j) - 2.0 * K(i, j);
    if (quad <= 0) quad = kTau;
    if (yi != yj) {
      const double delta = (-G[i] - G[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0 && alpha[j] < 0) {
        alpha[j] = 0;
        alpha[i] = diff;
      } else if (diff <= 0 && alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = -diff;
      }
      if (diff > 0 && alpha[i] > C) {
        alpha[i] = C;
        alpha[j] = C - diff;
      } else if (diff <= 0 && alpha[j] > C) {
        alpha[j] = C;
        alpha[i] = C + diff;
      }
    } else {
      const double delta = (G[i] - G[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > C && alpha[i] > C) {
        alpha[i] = C;
        alpha[j] = sum - C;
      } else if (sum <= C && alpha[j] < 0) {
        alpha[j] = 0;
        alpha[i] = sum;
      }
      if (sum > C && alpha[j] > C) {
        alpha[j] = C;
        alpha[i] = sum - C;
      } else if (sum <= C && alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = sum;
      }
    }
    const double di = alpha[i] - ai_old, dj = alpha[j] - aj_old;
    for (Eigen::Index t = 0; t < n; ++t)
      G[t] += yy(t) * (yi * K(t, i) * di + yj * K(t, j) * dj);
  }
  sol.iterations = it;

  double ub = kInf, lb = -kInf, sum_free = 0.0;
  int n_free = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    const double yg = yy(t) * G[t];
    if (alpha[t] >= C) {
      if (yy(t) < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (alpha[t] <= 0) {
      if (yy(t) > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  sol.rho = n_free > 0 ? sum_free / n_free : 0.5 * (ub + lb);
  sol.alpha = std::move(alpha);
  sol.objective = svm_dual_objective(K, y, sol.alpha);
  return sol;
}

double PlattScaling::operator()(double f) const {
  const double z = a * f + b;
  if (z >= 0) {
    const double e = std::exp(-z);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(z));
}

PlattScaling fit_platt(std::span<const double> dec, std::span<const int> labels) {
  const std::size_t n = dec.size();
  if (labels.size() != n) throw InputError("platt: label count mismatch");
  double prior1 = 0, prior0 = 0;
  for (int l : labels) (l == 1 ? prior1 : prior0) += 1;
  const double hi = (prior1 + 1.0) / (prior1 + 2.0), lo = 1.0 / (prior0 + 2.0);
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = labels[i] == 1 ? hi : lo;

  constexpr int kMaxIter = 100;
  constexpr double kMinStep = 1e-10, kSigma = 1e-12, kEps = 1e-5;
  double A = 0.0, B = std::log((prior0 + 1.0) / (prior1 + 1.0));
  auto objective = [&](double a, double b) {
    double f = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = dec[i] * a + b;
      f += z >= 0 ? t[i] * z + std::log1p(std::exp(-z)) : (t[i] - 1.0) * z + std::log1p(std::exp(z));
    }
    return f;
  };
  double fval = objective(A, B);
  for (int it = 0; it < kMaxIter; ++it) {
    double h11 = kSigma, h22 = kSigma, h21 = 0, g1 = 0, g2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = dec[i] * A + B;
      double p, q;
      if (z >= 0) {
        p = std::exp(-z) / (1.0 + std::exp(-z));
        q = 1.0 / (1.0 + std::exp(-z));
      } else {
        p = 1.0 / (1.0 + std::exp(z));
        q = std::exp(z) / (1.0 + std::exp(z));
      }
      const double d2 = p * q;
      h11 += dec[i] * dec[i] * d2;
      h22 += d2;
      h21 += dec[i] * d2;
      const double d1 = t[i] - p;
      g1 += dec[i] * d1;
      g2 += d1;
    }
    if (std::abs(g1) < kEps && std::abs(g2) < kEps) break;
    const double det = h11 * h22 - h21 * h21;
    const double dA = -(h22 * g1 - h21 * g2) / det;
    const double dB = -(-h21 * g1 + h11 * g2) / det;
    const double gd = g1 * dA + g2 * dB;
    double step = 1.0;
    while (step >= kMinStep) {
      const double na = A + step * dA, nb = B + step * dB;
      const double nf = objective(na, nb);
      if (nf < fval + 1e-4 * step * gd) {
        A = na;
        B = nb;
        fval = nf;
        break;
      }
      step /= 2.0;
    }
    if (step < kMinStep) break;
  }
  return {A, B};
}

}  // namespace coughdet
