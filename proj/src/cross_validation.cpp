#include "coughdet/cross_validation.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "coughdet/io.hpp"
#include "coughdet/parallel.hpp"
#include "coughdet/random.hpp"

namespace coughdet {

using nlohmann::json;
using nlohmann::ordered_json;

std::vector<FoldPlan> make_folds(std::span<const std::string> patient_ids, DevRule rule) {
  const std::set<std::string> unique(patient_ids.begin(), patient_ids.end());
  if (unique.size() < 3) throw InputError("make_folds: need at least 3 patients");
  const std::vector<std::string> ids(unique.begin(), unique.end());
  const std::size_t n = ids.size();
  std::vector<FoldPlan> folds;
  for (std::size_t t = 0; t < n; ++t) {
    FoldPlan f;
    f.test_patient = ids[t];
    switch (rule) {
      case DevRule::cyclic_next: f.dev_patient = ids[(t + 1) % n]; break;
    }
    for (const auto& p : ids)
      if (p != f.test_patient && p != f.dev_patient) f.train_patients.push_back(p);
    folds.push_back(std::move(f));
  }
  return folds;
}

std::string FeatureConfig::key() const {
  return std::string(to_string(modality)) + "_" + (modality == Modality::accel ? accel.key() : audio.key());
}

std::string FeatureConfig::describe() const {
  if (modality == Modality::accel)
    return "psi=" + std::to_string(accel.frame_len) + " C=" + std::to_string(accel.segments);
  return "M=" + std::to_string(audio.mfcc_count) + " F=" + std::to_string(audio.frame_len) +
         " S=" + std::to_string(audio.segments);
}

ordered_json FeatureConfig::to_json() const {
  ordered_json j;
  j["modality"] = std::string(to_string(modality));
  if (modality == Modality::accel) {
    j["frame_len"] = accel.frame_len;
    j["segments"] = accel.segments;
  } else {
    j["mfcc_count"] = audio.mfcc_count;
    j["frame_len"] = audio.frame_len;
    j["segments"] = audio.segments;
    j["mel_filters"] = audio.resolved_mel_filters();
    j["fmin"] = audio.fmin;
    j["fmax"] = audio.fmax;
    j["preemphasis"] = audio.preemphasis;
    j["log_floor"] = audio.log_floor;
    j["window"] = "hamming";
    j["delta_half_window"] = 2;
  }
  return j;
}

FeatureConfig FeatureConfig::from_json(const json& j) {
  FeatureConfig f;
  f.modality = parse_modality(j.at("modality").get<std::string>());
  if (f.modality == Modality::accel) {
    f.accel.frame_len = j.at("frame_len").get<std::size_t>();
    f.accel.segments = j.at("segments").get<std::size_t>();
  } else {
    f.audio.mfcc_count = j.at("mfcc_count").get<std::size_t>();
    f.audio.frame_len = j.at("frame_len").get<std::size_t>();
    f.audio.segments = j.at("segments").get<std::size_t>();
    f.audio.fmin = j.value("fmin", f.audio.fmin);
    f.audio.fmax = j.value("fmax", f.audio.fmax);
    f.audio.preemphasis = j.value("preemphasis", f.audio.preemphasis);
    f.audio.log_floor = j.value("log_floor", f.audio.log_floor);
    const auto nf = j.value("mel_filters", std::size_t{0});
    if (nf != std::max<std::size_t>(f.audio.mfcc_count, 40)) f.audio.mel_filters = nf;
  }
  return f;
}

std::vector<std::size_t> EventTable::rows_of(std::span<const std::string> wanted) const {
  const std::set<std::string> set(wanted.begin(), wanted.end());
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < patients.size(); ++i)
    if (set.contains(patients[i])) rows.push_back(i);
  return rows;
}

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::smote_input: return "smote_input";
    case Stage::standardization: return "standardization";
    case Stage::training: return "training";
    case Stage::dev_scoring: return "dev_scoring";
    case Stage::test_scoring: return "test_scoring";
  }
  return "?";
}

std::vector<HyperConfig> expand_grid(std::span<const FeatureTable> features,
                                     std::span<const ClassifierSpec> classifiers) {
  std::vector<HyperConfig> out;
  for (const auto& f : features)
    for (const auto& c : classifiers) out.push_back({f.config, c});
  return out;
}

std::unordered_map<std::string, double> read_external_scores(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError(path.string() + ": cannot open scores file");
  std::unordered_map<std::string, double> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = json::parse(line);
      out[j.at("event_id").get<std::string>()] = j.at("score").get<double>();
    } catch (const json::exception& e) {
      throw LoadError(path.string() + ": " + e.what());
    }
  }
  return out;
}

namespace {

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& X, std::span<const std::size_t> rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), X.cols());
  for (std::size_t i = 0; i < rows.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = X.row(static_cast<Eigen::Index>(rows[i]));
  return out;
}

std::vector<int> take_labels(const EventTable& ev, std::span<const std::size_t> rows) {
  std::vector<int> out;
  out.reserve(rows.size());
  for (auto r : rows) out.push_back(ev.labels[r]);
  return out;
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

std::vector<double> lookup_scores(const std::unordered_map<std::string, double>& table, const EventTable& ev,
                                  std::span<const std::size_t> rows) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (auto r : rows) {
    const auto it = table.find(ev.ids[r]);
    if (it == table.end()) throw InputError("external scores: no score for event " + ev.ids[r]);
    out.push_back(it->second);
  }
  return out;
}

void notify(PipelineObserver* obs, Stage s, std::size_t fold, std::span<const std::size_t> rows) {
  if (obs) obs->on_rows(s, fold, rows);
}

}  // namespace

GridSearchResult grid_search(std::size_t fold_index, const FoldPlan& fold, const EventTable& events,
                             std::span<const FeatureTable> features,
                             std::span<const ClassifierSpec> classifiers, const GridOptions& opt,
                             PipelineObserver* observer, bool score_test) {
  if (features.empty() || classifiers.empty()) throw InputError("grid_search: empty grid");
  const auto train_rows = events.rows_of(fold.train_patients);
  const std::string dev_id[] = {fold.dev_patient};
  const std::string test_id[] = {fold.test_patient};
  const auto dev_rows = events.rows_of(dev_id);
  const auto test_rows = events.rows_of(test_id);
  const auto y_train = take_labels(events, train_rows);
  const auto y_dev = take_labels(events, dev_rows);
  const auto y_test = take_labels(events, test_rows);

  GridSearchResult res;
  res.test_rows = test_rows;
  res.outcomes.resize(features.size() * classifiers.size());
  double best = -std::numeric_limits<double>::infinity();
  bool have_best = false;

  for (std::size_t fi = 0; fi < features.size(); ++fi) {
    const auto& table = features[fi];
    if (static_cast<std::size_t>(table.X.rows()) != events.size())
      throw InputError("grid_search: feature table rows do not match the event table");

    std::optional<SmoteResult> balanced;
    std::string balance_error;
    std::vector<std::size_t> source_rows;
    const bool need_training = std::any_of(classifiers.begin(), classifiers.end(),
                                           [](const ClassifierSpec& c) { return c.kind != ClassifierKind::external; });
    if (need_training) {
      try {
        const Eigen::MatrixXd X_train = take_rows(table.X, train_rows);
        if (opt.apply_smote) {
          notify(observer, Stage::smote_input, fold_index, train_rows);
          SmoteConfig sc = opt.smote;
          sc.rng_seed = derive_seed(opt.smote.rng_seed ^ opt.seed, fold_index, 0x5307e000 + fi);
          balanced = smote(X_train, y_train, sc);
        } else {
          balanced = SmoteResult{X_train, y_train, {}, 1};
          for (std::size_t i = 0; i < train_rows.size(); ++i) balanced->origin.push_back({i, i, 0.0, false});
        }
        std::set<std::size_t> src;
        for (const auto& o : balanced->origin) {
          src.insert(train_rows[o.base]);
          src.insert(train_rows[o.neighbor]);
        }
        source_rows.assign(src.begin(), src.end());
      } catch (const std::exception& e) {
        balance_error = e.what();
      }
    }

    for (std::size_t ci = 0; ci < classifiers.size(); ++ci) {
      const std::size_t idx = fi * classifiers.size() + ci;
      auto& out = res.outcomes[idx];
      const auto& spec = classifiers[ci];
      std::vector<double> dev_scores, test_scores;
      try {
        if (spec.kind == ClassifierKind::external) {
          const auto table_scores = read_external_scores(spec.scores_path);
          dev_scores = lookup_scores(table_scores, events, dev_rows);
          if (score_test) test_scores = lookup_scores(table_scores, events, test_rows);
        } else {
          if (!balanced) throw InputError(balance_error);
          notify(observer, Stage::standardization, fold_index, source_rows);
          notify(observer, Stage::training, fold_index, source_rows);
          const auto model =
              train(spec, balanced->X, balanced->y, derive_seed(opt.seed, fold_index, idx), balanced->origin);
          notify(observer, Stage::dev_scoring, fold_index, dev_rows);
          dev_scores = to_std(model.score(take_rows(table.X, dev_rows)));
          if (score_test) {
            notify(observer, Stage::test_scoring, fold_index, test_rows);
            test_scores = to_std(model.score(take_rows(table.X, test_rows)));
          }
        }
        out.dev_auc = auc(dev_scores, y_dev);
        if (score_test) {
          const auto cm = confusion_metrics(test_scores, y_test, opt.threshold);
          out.test = TestMetrics{auc(test_scores, y_test), cm.specificity, cm.sensitivity, cm.accuracy};
        }
      } catch (const std::exception& e) {
        out.dev_auc = -std::numeric_limits<double>::infinity();
        out.test.reset();
        out.error = e.what();
        continue;
      }
      if (!have_best || out.dev_auc > best) {
        have_best = true;
        best = out.dev_auc;
        res.chosen = idx;
        res.test_scores = std::move(test_scores);
      }
    }
  }
  if (!have_best) {
    std::string why = res.outcomes.empty() ? "" : res.outcomes.front().error;
    throw InputError("grid_search: every configuration failed (first error: " + why + ")");
  }
  res.chosen_config = {features[res.chosen / classifiers.size()].config, classifiers[res.chosen % classifiers.size()]};
  return res;
}

EvalReport aggregate(std::vector<FoldResult> folds, std::vector<HyperConfig> configs) {
  EvalReport r;
  r.configs = std::move(configs);
  r.folds = std::move(folds);

  std::vector<RocCurve> curves;
  std::vector<double> aucs, spec, sens, acc;
  for (const auto& f : r.folds) {
    curves.push_back(f.roc);
    aucs.push_back(f.test.auc);
    spec.push_back(f.test.specificity);
    sens.push_back(f.test.sensitivity);
    acc.push_back(f.test.accuracy);
  }
  const auto summary = summarize_rocs(curves, aucs, 101);
  r.mean_roc = summary.mean_roc;
  r.mean_auc = summary.mean_auc;
  r.std_auc = summary.std_auc;
  r.mean_specificity = mean(spec);
  r.mean_sensitivity = mean(sens);
  r.mean_accuracy = mean(acc);

  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < r.configs.size(); ++c) {
    ConfigSummary s;
    s.id = "C" + std::to_string(c + 1);
    s.config = r.configs[c];
    std::vector<double> ca, cs, cn, cc;
    for (const auto& f : r.folds) {
      if (c >= f.outcomes.size() || !f.outcomes[c].test) continue;
      const auto& t = *f.outcomes[c].test;
      ca.push_back(t.auc);
      cs.push_back(t.specificity);
      cn.push_back(t.sensitivity);
      cc.push_back(t.accuracy);
    }
    s.folds = ca.size();
    s.auc = mean(ca);
    s.std_auc = sample_std(ca);
    s.specificity = mean(cs);
    s.sensitivity = mean(cn);
    s.accuracy = mean(cc);
    if (s.folds == r.folds.size() && s.folds > 0 && s.auc > best) {
      best = s.auc;
      r.best_config = c;
    }
    r.per_config.push_back(std::move(s));
  }
  return r;
}

EvalReport evaluate(const EventTable& events, std::span<const FeatureTable> features,
                    std::span<const ClassifierSpec> classifiers, const EvalOptions& opt,
                    PipelineObserver* observer) {
  if (events.labels.size() != events.size() || events.patients.size() != events.size())
    throw InputError("evaluate: inconsistent event table");
  const auto plans = make_folds(events.patients);
  std::vector<FoldResult> results(plans.size());

  parallel_for(plans.size(), opt.threads, [&](std::size_t k) {
    auto g = grid_search(k, plans[k], events, features, classifiers, opt.grid, observer, true);
    FoldResult& f = results[k];
    f.fold = k;
    f.plan = plans[k];
    f.chosen = g.chosen;
    f.chosen_config = g.chosen_config;
    f.dev_auc = g.outcomes[g.chosen].dev_auc;
    for (auto r : g.test_rows) {
      f.event_ids.push_back(events.ids[r]);
      f.labels.push_back(events.labels[r]);
    }
    f.scores = std::move(g.test_scores);
    f.roc = roc_curve(f.scores, f.labels);
    f.test = *g.outcomes[g.chosen].test;
    f.outcomes = std::move(g.outcomes);
  });

  return aggregate(std::move(results), expand_grid(features, classifiers));
}

}  // namespace coughdet
