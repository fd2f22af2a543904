#include "coughdet/report.hpp"

#include <cmath>
#include <cstdio>

namespace coughdet {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

ordered_json metrics_json(const TestMetrics& t) {
  return {{"auc", t.auc}, {"specificity", t.specificity}, {"sensitivity", t.sensitivity}, {"accuracy", t.accuracy}};
}

TestMetrics metrics_from(const json& j) {
  return {j.at("auc").get<double>(), j.at("specificity").get<double>(), j.at("sensitivity").get<double>(),
          j.at("accuracy").get<double>()};
}

ordered_json config_json(const HyperConfig& c) {
  return {{"features", c.features.to_json()}, {"classifier", c.classifier.to_json()}};
}

HyperConfig config_from(const json& j) {
  return {FeatureConfig::from_json(j.at("features")), ClassifierSpec::from_json(j.at("classifier"))};
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

ordered_json report_to_json(const EvalReport& r) {
  ordered_json j;
  j["format_version"] = kReportFormatVersion;
  j["run_config"] = r.run_config;
  j["configs"] = ordered_json::array();
  for (const auto& c : r.configs) j["configs"].push_back(config_json(c));

  j["folds"] = ordered_json::array();
  for (const auto& f : r.folds) {
    ordered_json fj;
    fj["fold"] = f.fold;
    fj["test_patient"] = f.plan.test_patient;
    fj["dev_patient"] = f.plan.dev_patient;
    fj["train_patients"] = f.plan.train_patients;
    fj["chosen"] = f.chosen;
    fj["dev_auc"] = f.dev_auc;
    fj["test"] = metrics_json(f.test);
    fj["event_ids"] = f.event_ids;
    fj["labels"] = f.labels;
    fj["scores"] = f.scores;
    ordered_json roc = ordered_json::array();
    for (const auto& p : f.roc.points) roc.push_back({p.fpr, p.tpr});
    fj["roc"] = std::move(roc);
    ordered_json oc = ordered_json::array();
    for (const auto& o : f.outcomes) {
      ordered_json e;
      e["dev_auc"] = std::isfinite(o.dev_auc) ? json(o.dev_auc) : json(nullptr);
      e["test"] = o.test ? json(metrics_json(*o.test)) : json(nullptr);
      if (!o.error.empty()) e["error"] = o.error;
      oc.push_back(std::move(e));
    }
    fj["configs"] = std::move(oc);
    j["folds"].push_back(std::move(fj));
  }

  ordered_json s;
  s["mean_auc"] = r.mean_auc;
  s["std_auc"] = r.std_auc;
  s["mean_specificity"] = r.mean_specificity;
  s["mean_sensitivity"] = r.mean_sensitivity;
  s["mean_accuracy"] = r.mean_accuracy;
  s["best_config"] = r.best_config ? json(*r.best_config) : json(nullptr);
  j["summary"] = std::move(s);

  ordered_json rows = ordered_json::array();
  for (const auto& c : r.per_config) {
    rows.push_back({{"id", c.id},
                    {"folds", c.folds},
                    {"specificity", c.specificity},
                    {"sensitivity", c.sensitivity},
                    {"accuracy", c.accuracy},
                    {"auc", c.auc},
                    {"std_auc", c.std_auc}});
  }
  j["per_config"] = std::move(rows);

  ordered_json roc = ordered_json::array();
  for (const auto& p : r.mean_roc) roc.push_back({p.fpr, p.tpr});
  j["mean_roc"] = std::move(roc);
  return j;
}

EvalReport report_from_json(const json& j) {
  if (!j.is_object() || !j.contains("format_version")) throw InputError("report json: not a report (no format_version)");
  if (j.at("format_version").get<int>() != kReportFormatVersion)
    throw InputError("report json: unsupported format_version");
  EvalReport r;
  r.run_config = j.at("run_config");
  for (const auto& c : j.at("configs")) r.configs.push_back(config_from(c));
  for (const auto& fj : j.at("folds")) {
    FoldResult f;
    f.fold = fj.at("fold").get<std::size_t>();
    f.plan.test_patient = fj.at("test_patient").get<std::string>();
    f.plan.dev_patient = fj.at("dev_patient").get<std::string>();
    f.plan.train_patients = fj.at("train_patients").get<std::vector<std::string>>();
    f.chosen = fj.at("chosen").get<std::size_t>();
    if (f.chosen < r.configs.size()) f.chosen_config = r.configs[f.chosen];
    f.dev_auc = fj.at("dev_auc").get<double>();
    f.test = metrics_from(fj.at("test"));
    f.event_ids = fj.at("event_ids").get<std::vector<std::string>>();
    f.labels = fj.at("labels").get<std::vector<int>>();
    f.scores = fj.at("scores").get<std::vector<double>>();
    f.roc = roc_curve(f.scores, f.labels);
    for (const auto& e : fj.at("configs")) {
      ConfigOutcome o;
      if (!e.at("dev_auc").is_null()) o.dev_auc = e["dev_auc"].get<double>();
      if (!e.at("test").is_null()) o.test = metrics_from(e["test"]);
      o.error = e.value("error", std::string{});
      f.outcomes.push_back(std::move(o));
    }
    r.folds.push_back(std::move(f));
  }
  const auto& s = j.at("summary");
  r.mean_auc = s.at("mean_auc").get<double>();
  r.std_auc = s.at("std_auc").get<double>();
  r.mean_specificity = s.at("mean_specificity").get<double>();
  r.mean_sensitivity = s.at("mean_sensitivity").get<double>();
  r.mean_accuracy = s.at("mean_accuracy").get<double>();
  if (!s.at("best_config").is_null()) r.best_config = s["best_config"].get<std::size_t>();
  const auto& rows = j.at("per_config");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    ConfigSummary c;
    c.id = rows[i].at("id").get<std::string>();
    if (i < r.configs.size()) c.config = r.configs[i];
    c.folds = rows[i].at("folds").get<std::size_t>();
    c.specificity = rows[i].at("specificity").get<double>();
    c.sensitivity = rows[i].at("sensitivity").get<double>();
    c.accuracy = rows[i].at("accuracy").get<double>();
    c.auc = rows[i].at("auc").get<double>();
    c.std_auc = rows[i].at("std_auc").get<double>();
    r.per_config.push_back(std::move(c));
  }
  for (const auto& p : j.at("mean_roc")) r.mean_roc.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  return r;
}

std::string format_table_csv(const EvalReport& r) {
  std::string out;
  const auto& rc = r.run_config;
  if (rc.contains("seed")) out += "# seed: " + rc["seed"].dump() + "\n";
  if (rc.contains("threshold"))
    out += "# spec/sens/acc at fixed score threshold " + rc["threshold"].dump() +
           " (not a per-fold operating point)\n";
  out += "# folds: " + std::to_string(r.folds.size()) + "; nested CV mean AUC " + fmt(r.mean_auc) +
         ", sigma_AUC " + fmt(r.std_auc) + "\n";
  if (r.best_config && *r.best_config < r.per_config.size())
    out += "# best hyperparameters: " + r.per_config[*r.best_config].id + "\n";
  out += "ID,Classifier,Feature hyperparameters,Classifier hyperparameters,Spec,Sens,Acc,AUC,sigma_AUC,Folds\n";
  for (const auto& c : r.per_config) {
    out += c.id + "," + upper(to_string(c.config.classifier.kind)) + "," + quote(c.config.features.describe()) +
           "," + quote(c.config.classifier.describe()) + "," + fmt(c.specificity) + "," + fmt(c.sensitivity) +
           "," + fmt(c.accuracy) + "," + fmt(c.auc) + "," + fmt(c.std_auc) + "," + std::to_string(c.folds) + "\n";
  }
  return out;
}

std::string format_mean_roc_csv(const EvalReport& r) {
  std::string out = "fpr,tpr\n";
  char buf[64];
  for (const auto& p : r.mean_roc) {
    std::snprintf(buf, sizeof buf, "%.6f,%.6f\n", p.fpr, p.tpr);
    out += buf;
  }
  return out;
}

}  // namespace coughdet
