#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <unordered_map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "coughdet/accel_features.hpp"
#include "coughdet/audio_features.hpp"
#include "coughdet/classifier.hpp"
#include "coughdet/metrics.hpp"
#include "coughdet/smote.hpp"

namespace coughdet {

struct FoldPlan {
  std::string test_patient;
  std::string dev_patient;
  std::vector<std::string> train_patients;
};

enum class DevRule {
  cyclic_next,  // the patient after the test patient in sorted order, wrapping around
};

/// One fold per patient. Throws InputError for fewer than 3 distinct patients.
std::vector<FoldPlan> make_folds(std::span<const std::string> patient_ids,
                                 DevRule rule = DevRule::cyclic_next);

struct FeatureConfig {
  Modality modality = Modality::accel;
  AccelFeatureConfig accel;
  AudioFeatureConfig audio;

  std::string key() const;
  std::string describe() const;  // e.g. "psi=32 C=10"
  nlohmann::ordered_json to_json() const;
  static FeatureConfig from_json(const nlohmann::json& j);
};

/// One point of the joint feature x classifier grid.
struct HyperConfig {
  FeatureConfig features;
  ClassifierSpec classifier;
};

/// Event metadata; row i of every FeatureTable describes event i.
struct EventTable {
  std::vector<std::string> ids;
  std::vector<std::string> patients;
  std::vector<int> labels;  // 1 = cough

  std::size_t size() const { return ids.size(); }
  std::vector<std::size_t> rows_of(std::span<const std::string> patients) const;
};

/// Flattened (row-major) feature matrices of all events for one feature config.
struct FeatureTable {
  FeatureConfig config;
  Eigen::MatrixXd X;
};

enum class Stage { smote_input, standardization, training, dev_scoring, test_scoring };

std::string_view to_string(Stage s);

/// Receives the event rows that reach each pipeline stage. Called from worker
/// threads; implementations must be thread-safe.
class PipelineObserver {
 public:
  virtual ~PipelineObserver() = default;
  virtual void on_rows(Stage stage, std::size_t fold, std::span<const std::size_t> event_rows) = 0;
};

struct GridOptions {
  SmoteConfig smote;
  std::uint64_t seed = 7;
  double threshold = 0.5;
  bool apply_smote = true;
};

struct TestMetrics {
  double auc = 0.0;
  double specificity = 0.0;
  double sensitivity = 0.0;
  double accuracy = 0.0;
};

struct ConfigOutcome {
  double dev_auc = -std::numeric_limits<double>::infinity();
  std::optional<TestMetrics> test;
  std::string error;
};

struct GridSearchResult {
  std::size_t chosen = 0;
  HyperConfig chosen_config;
  std::vector<ConfigOutcome> outcomes;  // in grid order
  std::vector<double> test_scores;      // chosen config, test patient rows (when scored)
  std::vector<std::size_t> test_rows;
};

/// Grid order: feature tables outer, classifiers inner.
std::vector<HyperConfig> expand_grid(std::span<const FeatureTable> features,
                                     std::span<const ClassifierSpec> classifiers);

/// For each config: balance the training patients (SMOTE), fit, score the dev
/// patient. Returns the config with the highest dev AUC, earliest on ties; a
/// config that throws scores -inf. With `score_test`, every fitted model also
/// scores the test patient.
GridSearchResult grid_search(std::size_t fold_index, const FoldPlan& fold, const EventTable& events,
                             std::span<const FeatureTable> features,
                             std::span<const ClassifierSpec> classifiers, const GridOptions& opt,
                             PipelineObserver* observer = nullptr, bool score_test = true);

struct FoldResult {
  std::size_t fold = 0;
  FoldPlan plan;
  std::size_t chosen = 0;
  HyperConfig chosen_config;
  double dev_auc = 0.0;
  std::vector<std::string> event_ids;
  std::vector<double> scores;
  std::vector<int> labels;
  RocCurve roc;
  TestMetrics test;
  std::vector<ConfigOutcome> outcomes;
};

struct ConfigSummary {
  std::string id;  // "C1", "C2", ...
  HyperConfig config;
  std::size_t folds = 0;  // folds where the config produced test metrics
  double specificity = 0.0;
  double sensitivity = 0.0;
  double accuracy = 0.0;
  double auc = 0.0;
  double std_auc = 0.0;
};

struct EvalReport {
  nlohmann::ordered_json run_config;  // resolved configuration, seeds, notes
  std::vector<HyperConfig> configs;
  std::vector<FoldResult> folds;
  double mean_auc = 0.0;
  double std_auc = 0.0;
  double mean_specificity = 0.0;
  double mean_sensitivity = 0.0;
  double mean_accuracy = 0.0;
  std::vector<RocPoint> mean_roc;
  std::vector<ConfigSummary> per_config;
  std::optional<std::size_t> best_config;  // argmax of mean test AUC
};

/// Mean ROC by vertical averaging on a 101-point FPR grid, mean and sample
/// std of the fold AUCs, per-config rows averaged over folds.
EvalReport aggregate(std::vector<FoldResult> folds, std::vector<HyperConfig> configs);

struct EvalOptions {
  GridOptions grid;
  unsigned threads = 1;
};

/// Nested leave-one-patient-out cross-validation.
EvalReport evaluate(const EventTable& events, std::span<const FeatureTable> features,
                    std::span<const ClassifierSpec> classifiers, const EvalOptions& opt,
                    PipelineObserver* observer = nullptr);

/// Event id -> score, from JSON lines with keys event_id and score.
std::unordered_map<std::string, double> read_external_scores(const std::filesystem::path& path);

}  // namespace coughdet
