#pragma once

// Slow, direct reimplementations used as test oracles. Nothing here shares
// code with the library beyond plain types.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

inline std::vector<double> dft_power(const std::vector<double>& x) {
  const std::size_t n = x.size();
  // Twiddles indexed by k*t mod n keep every angle accurate for large products.
  std::vector<long double> c(n), s(n);
  for (std::size_t j = 0; j < n; ++j) {
    const long double a = -2.0L * std::numbers::pi_v<long double> * static_cast<long double>(j) /
                          static_cast<long double>(n);
    c[j] = std::cos(a);
    s[j] = std::sin(a);
  }
  std::vector<double> out(n / 2 + 1);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    long double re = 0, im = 0;
    for (std::size_t t = 0; t < n; ++t) {
      const std::size_t j = (k * t) % n;
      re += x[t] * c[j];
      im += x[t] * s[j];
    }
    out[k] = static_cast<double>(re * re + im * im);
  }
  return out;
}

struct MfccParams {
  std::size_t mfcc = 13;
  std::size_t filters = 40;
  double rate = 22050.0;
  double fmin = 0.0;
  double fmax = 11025.0;
  double preemphasis = 0.97;
  double floor = 1e-10;
};

inline double mel(double f) { return 2595.0 * std::log10(1.0 + f / 700.0); }
inline double inv_mel(double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); }

/// Textbook MFCC of one frame: pre-emphasis (first sample kept), symmetric
/// Hamming window, |DFT|^2, triangular mel filters evaluated at the bin
/// frequencies, natural log with floor, orthonormal DCT-II.
inline std::vector<double> mfcc(const std::vector<double>& frame, const MfccParams& p) {
  const std::size_t n = frame.size();
  std::vector<double> y(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double pre = t == 0 ? frame[0] : frame[t] - p.preemphasis * frame[t - 1];
    const double w = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * t / (n - 1.0));
    y[t] = pre * w;
  }
  const auto power = dft_power(y);

  std::vector<double> centers(p.filters + 2);
  const double m0 = mel(p.fmin), m1 = mel(p.fmax);
  for (std::size_t i = 0; i < centers.size(); ++i) centers[i] = inv_mel(m0 + i * (m1 - m0) / (p.filters + 1.0));

  std::vector<double> logmel(p.filters);
  for (std::size_t m = 0; m < p.filters; ++m) {
    double e = 0.0;
    for (std::size_t k = 0; k < power.size(); ++k) {
      const double f = k * p.rate / n;
      const double up = (f - centers[m]) / (centers[m + 1] - centers[m]);
      const double down = (centers[m + 2] - f) / (centers[m + 2] - centers[m + 1]);
      e += std::max(0.0, std::min(up, down)) * power[k];
    }
    logmel[m] = std::log(std::max(e, p.floor));
  }

  std::vector<double> c(p.mfcc);
  const double N = static_cast<double>(p.filters);
  for (std::size_t k = 0; k < p.mfcc; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < p.filters; ++i) acc += logmel[i] * std::cos(std::numbers::pi / N * (i + 0.5) * k);
    c[k] = acc * (k == 0 ? std::sqrt(1.0 / N) : std::sqrt(2.0 / N));
  }
  return c;
}

/// Regression deltas, half-window 2, edges replicated. seq is rows x cols row-major.
inline std::vector<double> deltas(const std::vector<double>& seq, std::size_t rows, std::size_t cols) {
  std::vector<double> out(seq.size());
  auto c = [&](long t, std::size_t j) {
    t = std::max(0L, std::min(t, static_cast<long>(rows) - 1));
    return seq[t * cols + j];
  };
  for (std::size_t t = 0; t < rows; ++t)
    for (std::size_t j = 0; j < cols; ++j) {
      const long s = static_cast<long>(t);
      out[t * cols + j] = (1.0 * (c(s + 1, j) - c(s - 1, j)) + 2.0 * (c(s + 2, j) - c(s - 2, j))) / 10.0;
    }
  return out;
}

/// Mann-Whitney U / (n_pos n_neg), ties counted one half.
inline double pairwise_auc(const std::vector<double>& s, const std::vector<int>& y) {
  double wins = 0.0;
  long pos = 0, neg = 0;
  for (int v : y) (v ? pos : neg)++;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (y[i])
      for (std::size_t j = 0; j < s.size(); ++j)
        if (!y[j]) wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
  return wins / (static_cast<double>(pos) * static_cast<double>(neg));
}

/// Exact maximum of the C-SVM dual by enumerating every assignment of each
/// alpha to {0, C, free} and solving the equality-constrained KKT system on
/// the free set. Exponential; meant for n <= 8.
inline double svm_dual_max(const Eigen::MatrixXd& K, const std::vector<double>& y, double C) {
  const int n = static_cast<int>(y.size());
  Eigen::MatrixXd Q(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) Q(i, j) = y[i] * y[j] * K(i, j);
  auto objective = [&](const Eigen::VectorXd& a) { return a.sum() - 0.5 * a.dot(Q * a); };

  double best = -std::numeric_limits<double>::infinity();
  long combos = 1;
  for (int i = 0; i < n; ++i) combos *= 3;
  for (long code = 0; code < combos; ++code) {
    std::vector<int> state(n);
    long c = code;
    for (int i = 0; i < n; ++i, c /= 3) state[i] = static_cast<int>(c % 3);  // 0: at 0, 1: at C, 2: free
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
    std::vector<int> F;
    for (int i = 0; i < n; ++i) {
      if (state[i] == 1) a[i] = C;
      if (state[i] == 2) F.push_back(i);
    }
    double yb = 0.0;
    for (int i = 0; i < n; ++i) yb += y[i] * a[i];
    if (F.empty()) {
      if (std::abs(yb) < 1e-12) best = std::max(best, objective(a));
      continue;
    }
    const int m = static_cast<int>(F.size());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m + 1, m + 1);
    Eigen::VectorXd rhs(m + 1);
    for (int r = 0; r < m; ++r) {
      double qa = 0.0;
      for (int j = 0; j < n; ++j)
        if (state[j] != 2) qa += Q(F[r], j) * a[j];
      for (int s = 0; s < m; ++s) A(r, s) = Q(F[r], F[s]);
      A(r, m) = y[F[r]];
      A(m, r) = y[F[r]];
      rhs[r] = 1.0 - qa;
    }
    rhs[m] = -yb;
    const Eigen::VectorXd sol = A.completeOrthogonalDecomposition().solve(rhs);
    if ((A * sol - rhs).norm() > 1e-8 * (1.0 + rhs.norm())) continue;
    bool feasible = true;
    for (int r = 0; r < m; ++r) {
      if (sol[r] < -1e-10 || sol[r] > C + 1e-10) feasible = false;
      a[F[r]] = std::clamp(sol[r], 0.0, C);
    }
    if (feasible) best = std::max(best, objective(a));
  }
  return best;
}

/// Central differences of f at x, step h.
inline Eigen::VectorXd central_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                        const Eigen::VectorXd& x, double h = 1e-5) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd p = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    p[i] = x[i] + h;
    const double up = f(p);
    p[i] = x[i] - h;
    const double down = f(p);
    p[i] = x[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

inline double relative_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).norm() / std::max({a.norm(), b.norm(), 1e-12});
}

}  // namespace oracle
