#include "coughdet/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "coughdet/logistic.hpp"
#include "coughdet/signal.hpp"

namespace coughdet {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(ClassifierKind k) {
  switch (k) {
    case ClassifierKind::lr: return "lr";
    case ClassifierKind::svm: return "svm";
    case ClassifierKind::mlp: return "mlp";
    case ClassifierKind::external: return "external";
  }
  return "?";
}

ClassifierKind parse_classifier_kind(std::string_view s) {
  if (s == "lr") return ClassifierKind::lr;
  if (s == "svm") return ClassifierKind::svm;
  if (s == "mlp") return ClassifierKind::mlp;
  if (s == "external") return ClassifierKind::external;
  throw InputError("unknown classifier '" + std::string(s) + "'");
}

void ClassifierSpec::validate() const {
  switch (kind) {
    case ClassifierKind::lr:
      if (!(gamma1 > 0)) throw InputError("lr: gamma1 must be positive");
      if (gamma2 < 0 || gamma2 > 1 || gamma3 < 0 || gamma3 > 1)
        throw InputError("lr: gamma2 and gamma3 must lie in [0, 1]");
      break;
    case ClassifierKind::svm:
      if (!(gamma1 > 0) || !(gamma4 > 0)) throw InputError("svm: gamma1 and gamma4 must be positive");
      break;
    case ClassifierKind::mlp:
      if (gamma3 < 0) throw InputError("mlp: gamma3 must be non-negative");
      if (gamma5 < 1) throw InputError("mlp: gamma5 must be at least 1");
      break;
    case ClassifierKind::external:
      if (scores_path.empty()) throw InputError("external: scores path required");
      break;
  }
}

namespace {

std::string num(double v) {
  std::ostringstream ss;
  ss << v;
  return ss.str();
}

Eigen::VectorXd to_vec(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> from_vec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

// Row-major flattening.
std::vector<double> from_mat(const Eigen::MatrixXd& m) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
  return out;
}

Eigen::MatrixXd to_mat(const json& j, Eigen::Index rows, Eigen::Index cols) {
  const auto v = j.get<std::vector<double>>();
  if (static_cast<Eigen::Index>(v.size()) != rows * cols) throw InputError("model json: matrix size mismatch");
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = v[static_cast<std::size_t>(r * cols + c)];
  return m;
}

}  // namespace

std::string ClassifierSpec::describe() const {
  switch (kind) {
    case ClassifierKind::lr: return "g1=" + num(gamma1) + " g2=" + num(gamma2) + " g3=" + num(gamma3);
    case ClassifierKind::svm: return "g1=" + num(gamma1) + " g4=" + num(gamma4);
    case ClassifierKind::mlp: return "g3=" + num(gamma3) + " g5=" + std::to_string(gamma5);
    case ClassifierKind::external: return "scores=" + scores_path;
  }
  return {};
}

ordered_json ClassifierSpec::to_json() const {
  ordered_json j;
  j["kind"] = std::string(to_string(kind));
  switch (kind) {
    case ClassifierKind::lr:
      j["gamma1"] = gamma1;
      j["gamma2"] = gamma2;
      j["gamma3"] = gamma3;
      break;
    case ClassifierKind::svm:
      j["gamma1"] = gamma1;
      j["gamma4"] = gamma4;
      break;
    case ClassifierKind::mlp:
      j["gamma3"] = gamma3;
      j["gamma5"] = gamma5;
      break;
    case ClassifierKind::external:
      j["scores_path"] = scores_path;
      break;
  }
  return j;
}

ClassifierSpec ClassifierSpec::from_json(const json& j) {
  ClassifierSpec s;
  s.kind = parse_classifier_kind(j.at("kind").get<std::string>());
  s.gamma1 = j.value("gamma1", s.gamma1);
  s.gamma2 = j.value("gamma2", s.gamma2);
  s.gamma3 = j.value("gamma3", s.gamma3);
  s.gamma4 = j.value("gamma4", s.gamma4);
  s.gamma5 = j.value("gamma5", s.gamma5);
  s.scores_path = j.value("scores_path", std::string{});
  return s;
}

Standardizer::Standardizer(const Eigen::MatrixXd& X) {
  if (X.rows() == 0) throw InputError("standardizer: empty matrix");
  mean_ = X.colwise().mean().transpose();
  scale_.resize(X.cols());
  for (Eigen::Index c = 0; c < X.cols(); ++c) {
    const double var = (X.col(c).array() - mean_[c]).square().mean();
    const double sd = std::sqrt(var);
    scale_[c] = sd > 1e-12 * std::max(1.0, std::abs(mean_[c])) ? sd : 1.0;
  }
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& X) const {
  if (X.cols() != dims())
    throw InputError("feature dimension mismatch: model expects " + std::to_string(dims()) +
                     " columns, got " + std::to_string(X.cols()));
  Eigen::MatrixXd Z = X;
  Z.rowwise() -= mean_.transpose();
  Z.array().rowwise() /= scale_.transpose().array();
  return Z;
}

ordered_json Standardizer::to_json() const {
  ordered_json j;
  j["mean"] = from_vec(mean_);
  j["std"] = from_vec(scale_);
  return j;
}

Standardizer Standardizer::from_json(const json& j) {
  Standardizer s;
  s.mean_ = to_vec(j.at("mean"));
  s.scale_ = to_vec(j.at("std"));
  if (s.mean_.size() != s.scale_.size()) throw InputError("model json: standardization size mismatch");
  return s;
}

TrainedModel::TrainedModel(ClassifierSpec spec, Standardizer standardizer, Params params, TrainStats stats)
    : spec_(std::move(spec)), std_(std::move(standardizer)), params_(std::move(params)), stats_(stats) {}

Eigen::VectorXd TrainedModel::decision(const Eigen::MatrixXd& X) const {
  if (X.rows() == 0 && X.cols() == 0) return {};
  const Eigen::MatrixXd Z = std_.apply(X);
  if (const auto* lr = std::get_if<LogisticModel>(&params_)) return (Z * lr->w).array() + lr->b;
  if (const auto* svm = std::get_if<SvmModel>(&params_)) {
    // gamma4 is the kernel coefficient used at training time.
    return (rbf_kernel_matrix(Z, svm->support, spec_.gamma4) * svm->coef).array() - svm->rho;
  }
  const auto& mlp = std::get<MlpWeights>(params_);
  Eigen::MatrixXd H = Z * mlp.W1;
  H.rowwise() += mlp.b1.transpose();
  return (H.cwiseMax(0.0) * mlp.w2).array() + mlp.b2;
}

Eigen::VectorXd TrainedModel::score(const Eigen::MatrixXd& X) const {
  Eigen::VectorXd d = decision(X);
  if (const auto* svm = std::get_if<SvmModel>(&params_)) return d.unaryExpr([&](double f) { return svm->platt(f); });
  return d.unaryExpr([](double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
  });
}

ordered_json TrainedModel::to_json() const {
  ordered_json j;
  j["format_version"] = kModelFormatVersion;
  j["kind"] = std::string(to_string(spec_.kind));
  j["hyperparameters"] = spec_.to_json();
  j["standardization"] = std_.to_json();
  j["training"] = {{"iterations", stats_.iterations}, {"converged", stats_.converged}};
  ordered_json w;
  if (const auto* lr = std::get_if<LogisticModel>(&params_)) {
    w["w"] = from_vec(lr->w);
    w["b"] = lr->b;
  } else if (const auto* svm = std::get_if<SvmModel>(&params_)) {
    w["support_rows"] = svm->support.rows();
    w["support"] = from_mat(svm->support);
    w["coef"] = from_vec(svm->coef);
    w["rho"] = svm->rho;
    w["platt_a"] = svm->platt.a;
    w["platt_b"] = svm->platt.b;
  } else {
    const auto& m = std::get<MlpWeights>(params_);
    w["hidden"] = m.W1.cols();
    w["W1"] = from_mat(m.W1);
    w["b1"] = from_vec(m.b1);
    w["w2"] = from_vec(m.w2);
    w["b2"] = m.b2;
  }
  j["parameters"] = std::move(w);
  return j;
}

TrainedModel TrainedModel::from_json(const json& j) {
  if (j.at("format_version").get<int>() != kModelFormatVersion)
    throw InputError("model json: unsupported format_version");
  auto spec = ClassifierSpec::from_json(j.at("hyperparameters"));
  auto st = Standardizer::from_json(j.at("standardization"));
  TrainStats stats;
  if (j.contains("training")) {
    stats.iterations = j["training"].value("iterations", 0);
    stats.converged = j["training"].value("converged", false);
  }
  const auto& w = j.at("parameters");
  const Eigen::Index d = st.dims();
  switch (spec.kind) {
    case ClassifierKind::lr: {
      LogisticModel m{to_vec(w.at("w")), w.at("b").get<double>()};
      if (m.w.size() != d) throw InputError("model json: weight size mismatch");
      return {spec, st, m, stats};
    }
    case ClassifierKind::svm: {
      SvmModel m;
      const auto rows = w.at("support_rows").get<Eigen::Index>();
      m.support = to_mat(w.at("support"), rows, d);
      m.coef = to_vec(w.at("coef"));
      m.rho = w.at("rho").get<double>();
      m.platt = {w.at("platt_a").get<double>(), w.at("platt_b").get<double>()};
      return {spec, st, m, stats};
    }
    case ClassifierKind::mlp: {
      MlpWeights m;
      const auto h = w.at("hidden").get<Eigen::Index>();
      m.W1 = to_mat(w.at("W1"), d, h);
      m.b1 = to_vec(w.at("b1"));
      m.w2 = to_vec(w.at("w2"));
      m.b2 = w.at("b2").get<double>();
      return {spec, st, m, stats};
    }
    case ClassifierKind::external: break;
  }
  throw InputError("model json: external models carry no parameters");
}

namespace {

void require_both_classes(std::span<const int> y, Eigen::Index rows) {
  if (static_cast<std::size_t>(rows) != y.size()) throw InputError("train: label count mismatch");
  bool has0 = false, has1 = false;
  for (int v : y) {
    if (v != 0 && v != 1) throw InputError("train: labels must be 0 or 1");
    (v == 1 ? has1 : has0) = true;
  }
  if (!has0 || !has1) throw InputError("train: both classes are required");
}

}  // namespace

TrainedModel train_lr(const Eigen::MatrixXd& X, std::span<const int> y, double gamma1, double gamma2,
                      double gamma3, std::uint64_t /*seed*/) {
  ClassifierSpec spec{.kind = ClassifierKind::lr, .gamma1 = gamma1, .gamma2 = gamma2, .gamma3 = gamma3, .scores_path = {}};
  spec.validate();
  require_both_classes(y, X.rows());
  Standardizer st(X);
  const double mix = gamma2 + gamma3;
  const double l1 = mix > 0 ? gamma2 / mix / gamma1 : 0.0;
  const double l2 = mix > 0 ? gamma3 / mix / gamma1 : 0.0;
  const auto fit = fit_elastic_net_logistic(st.apply(X), y, l1, l2);
  return {spec, std::move(st), LogisticModel{fit.w, fit.b}, {fit.iterations, fit.converged}};
}

TrainedModel train_svm(const Eigen::MatrixXd& X_in, std::span<const int> y_in, double gamma1, double gamma4,
                       std::uint64_t /*seed*/) {
  ClassifierSpec spec{.kind = ClassifierKind::svm, .gamma1 = gamma1, .gamma4 = gamma4, .scores_path = {}};
  spec.validate();
  require_both_classes(y_in, X_in.rows());

  // SMO stops at a loose KKT tolerance, so its answer depends on the visiting
  // order. Sorting the rows first makes the model independent of input order.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(X_in.rows()));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    const int ya = y_in[static_cast<std::size_t>(a)], yb = y_in[static_cast<std::size_t>(b)];
    if (ya != yb) return ya < yb;
    for (Eigen::Index j = 0; j < X_in.cols(); ++j)
      if (X_in(a, j) != X_in(b, j)) return X_in(a, j) < X_in(b, j);
    return false;
  });
  Eigen::MatrixXd X(X_in.rows(), X_in.cols());
  for (std::size_t i = 0; i < order.size(); ++i) X.row(static_cast<Eigen::Index>(i)) = X_in.row(order[i]);
  std::vector<int> y(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) y[i] = y_in[static_cast<std::size_t>(order[i])];

  Standardizer st(X);
  const Eigen::MatrixXd Z = st.apply(X);
  std::vector<double> ypm(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) ypm[i] = y[i] == 1 ? 1.0 : -1.0;
  const Eigen::MatrixXd K = rbf_kernel_matrix(Z, Z, gamma4);
  const auto sol = solve_smo(K, ypm, gamma1);

  std::vector<Eigen::Index> sv;
  for (Eigen::Index i = 0; i < sol.alpha.size(); ++i)
    if (sol.alpha[i] > 0) sv.push_back(i);
  SvmModel m;
  m.support.resize(static_cast<Eigen::Index>(sv.size()), Z.cols());
  m.coef.resize(static_cast<Eigen::Index>(sv.size()));
  for (std::size_t k = 0; k < sv.size(); ++k) {
    m.support.row(static_cast<Eigen::Index>(k)) = Z.row(sv[k]);
    m.coef[static_cast<Eigen::Index>(k)] = sol.alpha[sv[k]] * ypm[static_cast<std::size_t>(sv[k])];
  }
  m.rho = sol.rho;

  // Training decision values straight from the kernel matrix.
  Eigen::VectorXd dec = Eigen::VectorXd::Constant(K.rows(), -sol.rho);
  for (std::size_t k = 0; k < sv.size(); ++k) dec += m.coef[static_cast<Eigen::Index>(k)] * K.col(sv[k]);
  m.platt = fit_platt(std::span<const double>(dec.data(), static_cast<std::size_t>(dec.size())), y);
  return {spec, std::move(st), std::move(m), {static_cast<int>(sol.iterations), sol.violation < 1e-3}};
}

TrainedModel train_mlp(const Eigen::MatrixXd& X, std::span<const int> y, double gamma3, int gamma5,
                       std::uint64_t seed, std::span<const RowOrigin> origin) {
  ClassifierSpec spec{.kind = ClassifierKind::mlp, .gamma3 = gamma3, .gamma5 = gamma5, .scores_path = {}};
  spec.validate();
  require_both_classes(y, X.rows());
  Standardizer st(X);
  auto fit = fit_mlp(st.apply(X), y, gamma5, gamma3, seed, {}, origin);
  return {spec, std::move(st), std::move(fit.weights), {fit.epochs, fit.converged}};
}

TrainedModel train(const ClassifierSpec& spec, const Eigen::MatrixXd& X, std::span<const int> y,
                   std::uint64_t seed, std::span<const RowOrigin> origin) {
  switch (spec.kind) {
    case ClassifierKind::lr: return train_lr(X, y, spec.gamma1, spec.gamma2, spec.gamma3, seed);
    case ClassifierKind::svm: return train_svm(X, y, spec.gamma1, spec.gamma4, seed);
    case ClassifierKind::mlp: return train_mlp(X, y, spec.gamma3, spec.gamma5, seed, origin);
    case ClassifierKind::external: break;
  }
  throw InputError("external classifiers supply pre-computed scores and cannot be trained");
}

}  // namespace coughdet
