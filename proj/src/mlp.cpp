#include "coughdet/mlp.hpp"

#include <algorithm>
#include <cmath>

#include "coughdet/logistic.hpp"
#include "coughdet/random.hpp"
#include "coughdet/signal.hpp"

namespace coughdet {

namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

}  // namespace

MlpWeights init_mlp(Eigen::Index inputs, Eigen::Index hidden, std::uint64_t seed) {
  Rng rng(seed);
  MlpWeights p;
  const double r1 = std::sqrt(6.0 / static_cast<double>(inputs + hidden));
  const double r2 = std::sqrt(6.0 / static_cast<double>(hidden + 1));
  p.W1.resize(inputs, hidden);
  for (Eigen::Index c = 0; c < hidden; ++c)
    for (Eigen::Index r = 0; r < inputs; ++r) p.W1(r, c) = rng.uniform(-r1, r1);
  p.b1 = Eigen::VectorXd::Zero(hidden);
  p.w2.resize(hidden);
  for (Eigen::Index c = 0; c < hidden; ++c) p.w2[c] = rng.uniform(-r2, r2);
  p.b2 = 0.0;
  return p;
}

Eigen::VectorXd mlp_forward(const MlpWeights& p, const Eigen::MatrixXd& X) {
  Eigen::MatrixXd H = X * p.W1;
  H.rowwise() += p.b1.transpose();
  H = H.cwiseMax(0.0);
  return ((H * p.w2).array() + p.b2).unaryExpr(&sigmoid).matrix();
}

double mlp_loss(const MlpWeights& p, const Eigen::MatrixXd& X, std::span<const int> y, double alpha,
                MlpWeights* grad) {
  const Eigen::Index n = X.rows();
  const double nd = static_cast<double>(n);
  Eigen::MatrixXd A = X * p.W1;
  A.rowwise() += p.b1.transpose();
  const Eigen::MatrixXd H = A.cwiseMax(0.0);
  const Eigen::VectorXd z = (H * p.w2).array() + p.b2;

  double loss = 0.0;
  Eigen::VectorXd r(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double yi = y[static_cast<std::size_t>(i)];
    loss += softplus(z[i]) - yi * z[i];
    r[i] = (sigmoid(z[i]) - yi) / nd;
  }
  loss /= nd;
  loss += alpha / (2.0 * nd) * (p.W1.squaredNorm() + p.w2.squaredNorm());

  if (grad) {
    grad->w2 = H.transpose() * r + (alpha / nd) * p.w2;
    grad->b2 = r.sum();
    Eigen::MatrixXd D = r * p.w2.transpose();
    D = D.cwiseProduct((A.array() > 0.0).cast<double>().matrix());
    grad->W1 = X.transpose() * D + (alpha / nd) * p.W1;
    grad->b1 = D.colwise().sum().transpose();
  }
  return loss;
}

namespace {

struct Epoch {
  double loss;
  Eigen::MatrixXd D;  // d loss / d A, rows x hidden
  Eigen::VectorXd g_w2;
  double g_b2;
};

// Loss and output-side gradients given the first-layer pre-activations A
// and the squared norm of W1.
Epoch head_pass(const MlpWeights& p, const Eigen::MatrixXd& A, double w1_norm2, std::span<const int> y,
                double alpha) {
  const Eigen::Index n = A.rows();
  const double nd = static_cast<double>(n);
  const Eigen::MatrixXd H = A.cwiseMax(0.0);
  const Eigen::VectorXd z = (H * p.w2).array() + p.b2;
  Epoch e;
  e.loss = 0.0;
  Eigen::VectorXd r(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double yi = y[static_cast<std::size_t>(i)];
    e.loss += softplus(z[i]) - yi * z[i];
    r[i] = (sigmoid(z[i]) - yi) / nd;
  }
  e.loss /= nd;
  e.loss += alpha / (2.0 * nd) * (w1_norm2 + p.w2.squaredNorm());
  e.g_w2 = H.transpose() * r + (alpha / nd) * p.w2;
  e.g_b2 = r.sum();
  e.D = (r * p.w2.transpose()).cwiseProduct((A.array() > 0.0).cast<double>().matrix());
  return e;
}

}  // namespace

MlpFit fit_mlp(const Eigen::MatrixXd& X, std::span<const int> y, Eigen::Index hidden, double alpha,
               std::uint64_t seed, const MlpOptions& opt, std::span<const RowOrigin> origin) {
  if (static_cast<std::size_t>(X.rows()) != y.size()) throw InputError("mlp: label count mismatch");
  if (hidden < 1) throw InputError("mlp: need at least one hidden unit");
  bool has0 = false, has1 = false;
  for (int v : y) (v == 1 ? has1 : has0) = true;
  if (!has0 || !has1) throw InputError("mlp: need both classes");
  Eigen::Index n_base = X.rows();
  if (!origin.empty()) {
    if (origin.size() != y.size()) throw InputError("mlp: row origin count mismatch");
    n_base = std::count_if(origin.begin(), origin.end(), [](const RowOrigin& o) { return !o.synthetic; });
    for (std::size_t i = 0; i < origin.size(); ++i) {
      const auto& o = origin[i];
      const bool ok = o.synthetic ? (static_cast<Eigen::Index>(o.base) < n_base &&
                                     static_cast<Eigen::Index>(o.neighbor) < n_base)
                                  : o.base == i;
      if (!ok) throw InputError("mlp: row origins must reference the leading original rows");
    }
  }

  MlpFit fit;
  fit.weights = init_mlp(X.cols(), hidden, seed);
  // Correlated inputs raise the curvature along the first layer; dividing by
  // the mean top Gram eigenvalue keeps one fixed step stable for any input width.
  const double curvature = top_gram_eigenvalue(X) / static_cast<double>(X.rows());
  fit.step = opt.learning_rate / std::max(1.0, curvature);
  const double eta = fit.step;
  const double nd = static_cast<double>(X.rows());
  const double shrink = 1.0 - eta * alpha / nd;
  auto& w = fit.weights;

  const bool dual = opt.solver == MlpSolver::dual ||
                    (opt.solver == MlpSolver::automatic && X.rows() < 2 * X.cols());

  auto finish = [&](int epoch, double prev, double cur) {
    fit.epochs = epoch;
    fit.loss = cur;
    fit.converged = std::abs(prev - cur) < opt.tolerance;
    return fit.converged;
  };

  if (!dual) {
    MlpWeights g;
    double prev = mlp_loss(w, X, y, alpha, &g);
    fit.loss = prev;
    for (int epoch = 1; epoch <= opt.max_epochs; ++epoch) {
      w.W1 -= eta * g.W1;
      w.b1 -= eta * g.b1;
      w.w2 -= eta * g.w2;
      w.b2 -= eta * g.b2;
      const double cur = mlp_loss(w, X, y, alpha, &g);
      if (finish(epoch, prev, cur)) break;
      prev = cur;
    }
    return fit;
  }

  // Gram operator B -> X X^T B. With row origins X = M X_base, so
  // X X^T B = M (K_base (M^T B)) with M holding at most two weights per row.
  const Eigen::MatrixXd Xb = X.topRows(n_base);
  Eigen::MatrixXd K(n_base, n_base);
  K.triangularView<Eigen::Lower>() = Xb * Xb.transpose();
  K.triangularView<Eigen::StrictlyUpper>() = K.transpose();
  Eigen::MatrixXd T(n_base, hidden), U(n_base, hidden);
  auto apply_gram = [&](const Eigen::MatrixXd& Bm, Eigen::MatrixXd& out) {
    if (origin.empty()) {
      out.noalias() = K * Bm;
      return;
    }
    T.setZero();
    for (std::size_t i = 0; i < origin.size(); ++i) {
      const auto& o = origin[i];
      const auto r = static_cast<Eigen::Index>(i);
      if (!o.synthetic) {
        T.row(r) += Bm.row(r);
        continue;
      }
      T.row(static_cast<Eigen::Index>(o.base)) += (1.0 - o.u) * Bm.row(r);
      T.row(static_cast<Eigen::Index>(o.neighbor)) += o.u * Bm.row(r);
    }
    U.noalias() = K * T;
    for (std::size_t i = 0; i < origin.size(); ++i) {
      const auto& o = origin[i];
      const auto r = static_cast<Eigen::Index>(i);
      if (!o.synthetic)
        out.row(r) = U.row(r);
      else
        out.row(r) = (1.0 - o.u) * U.row(static_cast<Eigen::Index>(o.base)) +
                     o.u * U.row(static_cast<Eigen::Index>(o.neighbor));
    }
  };
  const Eigen::MatrixXd A0 = X * w.W1;
  const double n0 = w.W1.squaredNorm();
  double c = 1.0;
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(X.rows(), hidden);
  Eigen::MatrixXd KB = Eigen::MatrixXd::Zero(X.rows(), hidden);

  auto pass = [&] {
    Eigen::MatrixXd A = c * A0 + KB;
    A.rowwise() += w.b1.transpose();
    // ||c W1_0 + X^T B||^2 expanded through K.
    const double norm2 = c * c * n0 + 2.0 * c * (A0.cwiseProduct(B)).sum() + (B.cwiseProduct(KB)).sum();
    return head_pass(w, A, norm2, y, alpha);
  };

  Epoch e = pass();
  double prev = e.loss;
  fit.loss = prev;
  for (int epoch = 1; epoch <= opt.max_epochs; ++epoch) {
    c *= shrink;
    B = shrink * B - eta * e.D;
    w.b1 -= eta * e.D.colwise().sum().transpose();
    w.w2 -= eta * e.g_w2;
    w.b2 -= eta * e.g_b2;
    apply_gram(B, KB);
    e = pass();
    if (finish(epoch, prev, e.loss)) break;
    prev = e.loss;
  }
  w.W1 = c * w.W1 + X.transpose() * B;
  return fit;
}

}  // namespace coughdet
