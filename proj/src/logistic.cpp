#include "coughdet/logistic.hpp"

#include <algorithm>
#include <cmath>

#include "coughdet/signal.hpp"

namespace coughdet {

namespace {

double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }
double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

Eigen::VectorXd labels(std::span<const int> y) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(y.size()));
  for (std::size_t i = 0; i < y.size(); ++i) v[static_cast<Eigen::Index>(i)] = y[i];
  return v;
}

double loss_from_margins(const Eigen::VectorXd& z, const Eigen::VectorXd& y) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) acc += softplus(z[i]) - y[i] * z[i];
  return acc / static_cast<double>(z.size());
}

Eigen::VectorXd soft_threshold(const Eigen::VectorXd& v, double t) {
  return v.unaryExpr([t](double x) { return x > t ? x - t : (x < -t ? x + t : 0.0); });
}

}  // namespace

double logistic_smooth_loss(const Eigen::MatrixXd& X, std::span<const int> y,
                            const Eigen::VectorXd& w, double b, double l2) {
  const Eigen::VectorXd z = (X * w).array() + b;
  return loss_from_margins(z, labels(y)) + 0.5 * l2 * w.squaredNorm();
}

Eigen::VectorXd logistic_smooth_gradient(const Eigen::MatrixXd& X, std::span<const int> y,
                                         const Eigen::VectorXd& w, double b, double l2,
                                         double* grad_b) {
  const Eigen::VectorXd z = (X * w).array() + b;
  const Eigen::VectorXd r = z.unaryExpr(&sigmoid) - labels(y);
  const double n = static_cast<double>(X.rows());
  if (grad_b) *grad_b = r.sum() / n;
  return X.transpose() * r / n + l2 * w;
}

double top_gram_eigenvalue(const Eigen::MatrixXd& X, int iterations) {
  const Eigen::Index d = X.cols();
  Eigen::VectorXd v = Eigen::VectorXd::Ones(d + 1);
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < iterations; ++it) {
    const Eigen::VectorXd Av = (X * v.head(d)).array() + v[d];
    Eigen::VectorXd next(d + 1);
    next.head(d) = X.transpose() * Av;
    next[d] = Av.sum();
    lambda = next.norm();
    if (lambda == 0.0) return 0.0;
    v = next / lambda;
  }
  return lambda;
}

LogisticFit fit_elastic_net_logistic(const Eigen::MatrixXd& X, std::span<const int> y, double l1,
                                     double l2, const LogisticOptions& opt) {
  const Eigen::Index n = X.rows(), d = X.cols();
  if (static_cast<std::size_t>(n) != y.size()) throw InputError("logistic: label count mismatch");
  if (n == 0) throw InputError("logistic: empty training set");
  const Eigen::VectorXd yv = labels(y);
  const double pos = yv.sum();
  if (pos == 0 || pos == static_cast<double>(n)) throw InputError("logistic: need both classes");

  LogisticFit fit;
  fit.w = Eigen::VectorXd::Zero(d);
  fit.b = std::log(pos / (static_cast<double>(n) - pos));

  double L = top_gram_eigenvalue(X) / (4.0 * static_cast<double>(n)) + l2;
  if (!(L > 0)) L = 1.0;

  // Accelerated proximal gradient (FISTA) with backtracking. The momentum is
  // reset whenever the step points against the previous move, which keeps
  // the objective close to monotone on ill-conditioned problems.
  Eigen::VectorXd z = (X * fit.w).array() + fit.b;
  double objective = loss_from_margins(z, yv) + 0.5 * l2 * fit.w.squaredNorm();
  Eigen::VectorXd w_prev = fit.w, z_prev = z;
  double b_prev = fit.b;
  double t = 1.0;

  for (int it = 1; it <= opt.max_iterations; ++it) {
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double beta = (t - 1.0) / t_next;
    // Extrapolated point; margins are affine in (w, b) so no extra product.
    const Eigen::VectorXd wy = fit.w + beta * (fit.w - w_prev);
    const double by = fit.b + beta * (fit.b - b_prev);
    const Eigen::VectorXd zy = z + beta * (z - z_prev);
    const double smooth_y = loss_from_margins(zy, yv) + 0.5 * l2 * wy.squaredNorm();
    const Eigen::VectorXd r = zy.unaryExpr(&sigmoid) - yv;
    const Eigen::VectorXd gw = X.transpose() * r / static_cast<double>(n) + l2 * wy;
    const double gb = r.sum() / static_cast<double>(n);

    Eigen::VectorXd w_new, z_new;
    double b_new = 0.0, smooth_new = 0.0;
    for (;;) {
      w_new = soft_threshold(wy - gw / L, l1 / L);
      b_new = by - gb / L;
      z_new = (X * w_new).array() + b_new;
      smooth_new = loss_from_margins(z_new, yv) + 0.5 * l2 * w_new.squaredNorm();
      const Eigen::VectorXd dw = w_new - wy;
      const double db = b_new - by;
      const double model = smooth_y + gw.dot(dw) + gb * db + 0.5 * L * (dw.squaredNorm() + db * db);
      if (smooth_new <= model + 1e-12 * std::abs(smooth_y)) break;
      L *= 2.0;
    }
    const double restart = (wy - w_new).dot(w_new - fit.w) + (by - b_new) * (b_new - fit.b);
    w_prev = std::move(fit.w);
    b_prev = fit.b;
    z_prev = std::move(z);
    fit.w = std::move(w_new);
    fit.b = b_new;
    z = std::move(z_new);
    t = restart > 0.0 ? 1.0 : t_next;

    const double next = smooth_new + l1 * fit.w.lpNorm<1>();
    fit.iterations = it;
    const double change = std::abs(objective - next);
    objective = next;
    if (change < opt.tolerance) {
      fit.converged = true;
      break;
    }
  }
  fit.objective = objective;
  return fit;
}

}  // namespace coughdet
