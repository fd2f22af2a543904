#pragma once

#include <string>

#include <json.hpp>

#include "coughdet/cross_validation.hpp"

namespace coughdet {

inline constexpr int kReportFormatVersion = 1;

nlohmann::ordered_json report_to_json(const EvalReport& r);
EvalReport report_from_json(const nlohmann::json& j);

/// One row per evaluated config (ID, classifier, feature and classifier
/// hyperparameters, Spec, Sens, Acc, AUC, sigma_AUC), preceded by '#'
/// comment lines carrying the seed, threshold and nested-CV summary. A pure
/// function of the report.
std::string format_table_csv(const EvalReport& r);

/// "fpr,tpr" rows of the mean ROC curve.
std::string format_mean_roc_csv(const EvalReport& r);

}  // namespace coughdet
