#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>

#include <Eigen/Dense>
#include <json.hpp>

#include "coughdet/mlp.hpp"
#include "coughdet/smote.hpp"
#include "coughdet/svm.hpp"

namespace coughdet {

enum class ClassifierKind { lr, svm, mlp, external };

std::string_view to_string(ClassifierKind k);
ClassifierKind parse_classifier_kind(std::string_view s);

/// Hyperparameters. gamma1: LR/SVM regularisation strength; gamma2, gamma3:
/// LR l1/l2 mixing weights (normalized to sum 1); gamma3 is also the MLP l2
/// penalty; gamma4: RBF kernel coefficient; gamma5: MLP hidden units.
struct ClassifierSpec {
  ClassifierKind kind = ClassifierKind::lr;
  double gamma1 = 1.0;
  double gamma2 = 0.5;
  double gamma3 = 0.5;
  double gamma4 = 1e-3;
  int gamma5 = 10;
  std::string scores_path;  // external only

  void validate() const;
  /// Hyperparameters relevant to the kind, e.g. "g1=1 g2=0.5 g3=0.5".
  std::string describe() const;
  nlohmann::ordered_json to_json() const;
  static ClassifierSpec from_json(const nlohmann::json& j);
};

class Standardizer {
 public:
  Standardizer() = default;
  explicit Standardizer(const Eigen::MatrixXd& X);

  Eigen::MatrixXd apply(const Eigen::MatrixXd& X) const;
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::VectorXd& scale() const { return scale_; }
  Eigen::Index dims() const { return mean_.size(); }

  nlohmann::ordered_json to_json() const;
  static Standardizer from_json(const nlohmann::json& j);

 private:
  Eigen::VectorXd mean_;
  Eigen::VectorXd scale_;  // population std; 1 for constant columns
};

struct LogisticModel {
  Eigen::VectorXd w;
  double b = 0.0;
};

struct SvmModel {
  Eigen::MatrixXd support;  // standardized support vectors (rows)
  Eigen::VectorXd coef;     // alpha_i y_i
  double rho = 0.0;
  PlattScaling platt;
};

struct TrainStats {
  int iterations = 0;
  bool converged = false;
};

class TrainedModel {
 public:
  using Params = std::variant<LogisticModel, SvmModel, MlpWeights>;

  TrainedModel(ClassifierSpec spec, Standardizer standardizer, Params params, TrainStats stats = {});

  const ClassifierSpec& spec() const { return spec_; }
  const Standardizer& standardizer() const { return std_; }
  const Params& params() const { return params_; }
  const TrainStats& stats() const { return stats_; }

  /// Raw decision values (LR/MLP logits, SVM margins).
  Eigen::VectorXd decision(const Eigen::MatrixXd& X) const;
  /// Scores in [0, 1]; throws InputError on a column-count mismatch.
  Eigen::VectorXd score(const Eigen::MatrixXd& X) const;

  nlohmann::ordered_json to_json() const;
  static TrainedModel from_json(const nlohmann::json& j);

 private:
  ClassifierSpec spec_;
  Standardizer std_;
  Params params_;
  TrainStats stats_;
};

inline constexpr int kModelFormatVersion = 1;

TrainedModel train_lr(const Eigen::MatrixXd& X, std::span<const int> y, double gamma1, double gamma2,
                      double gamma3, std::uint64_t seed);
TrainedModel train_svm(const Eigen::MatrixXd& X, std::span<const int> y, double gamma1, double gamma4,
                       std::uint64_t seed);
TrainedModel train_mlp(const Eigen::MatrixXd& X, std::span<const int> y, double gamma3, int gamma5,
                       std::uint64_t seed, std::span<const RowOrigin> origin = {});

/// Dispatches on spec.kind. External classifiers are not trainable.
/// `origin` optionally describes X as smote output; only the MLP uses it, to
/// speed up training without changing the model.
TrainedModel train(const ClassifierSpec& spec, const Eigen::MatrixXd& X, std::span<const int> y,
                   std::uint64_t seed, std::span<const RowOrigin> origin = {});

inline Eigen::VectorXd score(const TrainedModel& m, const Eigen::MatrixXd& X) { return m.score(X); }

}  // namespace coughdet
