#include <doctest.h>

#include <mutex>
#include <set>

#include "coughdet/accel_features.hpp"
#include "coughdet/cross_validation.hpp"
#include "coughdet/random.hpp"
#include "coughdet/report.hpp"
#include "coughdet/signal.hpp"

using namespace coughdet;

namespace {

std::vector<std::string> names(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("p" + std::to_string(10 + i));
  return out;
}

// Class 1: x[n+16] = x[n]; class 0: x[n+16] = -x[n]. Frames of 32 samples
// see only even or only odd DFT bins; frames of 16 see plain noise.
std::vector<double> planted_event(Rng& rng, int label, std::size_t len) {
  std::vector<double> x(len);
  for (std::size_t n = 0; n < len; ++n) x[n] = n < 16 ? rng.normal() : (label ? x[n - 16] : -x[n - 16]);
  return x;
}

struct Planted {
  EventTable events;
  std::vector<FeatureTable> tables;
};

Planted planted_dataset(std::size_t patients, std::size_t per_patient, std::uint64_t seed) {
  Rng rng(seed);
  Planted out;
  std::vector<std::vector<double>> signals;
  const auto pats = names(patients);
  for (const auto& p : pats)
    for (std::size_t k = 0; k < per_patient; ++k) {
      const int label = k % 3 == 0;
      out.events.ids.push_back(p + "_e" + std::to_string(k));
      out.events.patients.push_back(p);
      out.events.labels.push_back(label);
      signals.push_back(planted_event(rng, label, 150 + rng.index(80)));
    }
  for (std::size_t psi : {16u, 32u}) {
    FeatureTable t;
    t.config.modality = Modality::accel;
    t.config.accel = {psi, 5};
    t.X.resize(static_cast<Eigen::Index>(signals.size()), static_cast<Eigen::Index>(5 * t.config.accel.cols()));
    for (std::size_t i = 0; i < signals.size(); ++i) {
      const auto m = extract_accel_features(signals[i], t.config.accel);
      t.X.row(static_cast<Eigen::Index>(i)) =
          Eigen::Map<const Eigen::RowVectorXd>(m.data.data(), static_cast<Eigen::Index>(m.data.size()));
    }
    out.tables.push_back(std::move(t));
  }
  return out;
}

ClassifierSpec lr_spec(double gamma1 = 100.0) {
  ClassifierSpec s;
  s.kind = ClassifierKind::lr;
  s.gamma1 = gamma1;
  return s;
}

class Recorder : public PipelineObserver {
 public:
  void on_rows(Stage stage, std::size_t fold, std::span<const std::size_t> rows) override {
    std::lock_guard lock(mu_);
    auto& dst = seen[{stage, fold}];
    dst.insert(rows.begin(), rows.end());
  }
  std::map<std::pair<Stage, std::size_t>, std::set<std::size_t>> seen;

 private:
  std::mutex mu_;
};

}  // namespace

TEST_SUITE("cross_validation") {
  TEST_CASE("fourteen patients give fourteen disjoint folds") {
    const auto pats = names(14);
    const auto folds = make_folds(pats);
    REQUIRE(folds.size() == 14);
    std::multiset<std::string> tested;
    for (std::size_t f = 0; f < 14; ++f) {
      const auto& fold = folds[f];
      tested.insert(fold.test_patient);
      CHECK(fold.train_patients.size() == 12);
      CHECK(fold.dev_patient != fold.test_patient);
      CHECK(fold.dev_patient == pats[(f + 1) % 14]);
      std::set<std::string> all(fold.train_patients.begin(), fold.train_patients.end());
      CHECK(all.size() == 12);
      CHECK_FALSE(all.count(fold.test_patient));
      CHECK_FALSE(all.count(fold.dev_patient));
    }
    CHECK(tested == std::multiset<std::string>(pats.begin(), pats.end()));
  }

  TEST_CASE("three patients is the minimum") {
    const auto folds = make_folds(names(3));
    REQUIRE(folds.size() == 3);
    for (const auto& f : folds) CHECK(f.train_patients.size() == 1);
    CHECK_THROWS_AS(make_folds(names(2)), InputError);
  }

  TEST_CASE("duplicate and unsorted patient ids collapse to sorted folds") {
    const std::vector<std::string> pats{"p3", "p1", "p2", "p1", "p3"};
    const auto folds = make_folds(pats);
    REQUIRE(folds.size() == 3);
    CHECK(folds[0].test_patient == "p1");
    CHECK(folds[2].dev_patient == "p1");
  }

  TEST_CASE("grid order is feature tables outer, classifiers inner") {
    const auto data = planted_dataset(3, 6, 1);
    const std::vector<ClassifierSpec> cls{lr_spec(1), lr_spec(2), lr_spec(3)};
    const auto grid = expand_grid(data.tables, cls);
    REQUIRE(grid.size() == 6);
    CHECK(grid[1].features.accel.frame_len == 16);
    CHECK(grid[1].classifier.gamma1 == 2);
    CHECK(grid[3].features.accel.frame_len == 32);
    CHECK(grid[3].classifier.gamma1 == 1);
  }

  TEST_CASE("grid search on the planted dataset selects psi 32") {
    const auto data = planted_dataset(5, 24, 2);
    const auto folds = make_folds(names(5));
    const std::vector<ClassifierSpec> cls{lr_spec()};
    for (std::size_t f = 0; f < folds.size(); ++f) {
      const auto r = grid_search(f, folds[f], data.events, data.tables, cls, {});
      CHECK(r.chosen == 1);
      CHECK(r.chosen_config.features.accel.frame_len == 32);
      CHECK(r.outcomes[1].dev_auc > 0.95);
      CHECK(r.outcomes[0].dev_auc < r.outcomes[1].dev_auc);
    }
  }

  TEST_CASE("one config is chosen; identical configs tie to the first") {
    const auto data = planted_dataset(3, 24, 3);
    const auto folds = make_folds(names(3));
    const std::span<const FeatureTable> one(&data.tables[1], 1);
    const std::vector<ClassifierSpec> single{lr_spec()};
    CHECK(grid_search(0, folds[0], data.events, one, single, {}).chosen == 0);
    const std::vector<ClassifierSpec> twins{lr_spec(), lr_spec(), lr_spec()};
    const auto r = grid_search(0, folds[0], data.events, one, twins, {});
    CHECK(r.outcomes[0].dev_auc == r.outcomes[1].dev_auc);
    CHECK(r.chosen == 0);
  }

  TEST_CASE("a failing config scores -inf and is skipped") {
    const auto data = planted_dataset(3, 24, 4);
    const auto folds = make_folds(names(3));
    ClassifierSpec broken;
    broken.kind = ClassifierKind::external;
    broken.scores_path = "/nonexistent/scores.jsonl";
    const std::vector<ClassifierSpec> cls{broken, lr_spec()};
    const std::span<const FeatureTable> one(&data.tables[1], 1);
    const auto r = grid_search(0, folds[0], data.events, one, cls, {});
    CHECK(std::isinf(r.outcomes[0].dev_auc));
    CHECK_FALSE(r.outcomes[0].error.empty());
    CHECK(r.chosen == 1);
  }

  TEST_CASE("test-patient rows never reach training stages") {
    const auto data = planted_dataset(6, 12, 5);
    const auto folds = make_folds(names(6));
    Recorder rec;
    EvalOptions opt;
    opt.threads = 2;
    const std::vector<ClassifierSpec> cls{lr_spec(), lr_spec(10)};
    const auto report = evaluate(data.events, data.tables, cls, opt, &rec);
    REQUIRE(report.folds.size() == 6);
    for (std::size_t f = 0; f < folds.size(); ++f) {
      const std::array<std::string, 1> test{folds[f].test_patient}, dev{folds[f].dev_patient};
      const auto test_rows = data.events.rows_of(test);
      const auto dev_rows = data.events.rows_of(dev);
      const std::set<std::size_t> test_set(test_rows.begin(), test_rows.end());
      for (Stage s : {Stage::smote_input, Stage::standardization, Stage::training}) {
        const auto& seen = rec.seen[{s, f}];
        CHECK_FALSE(seen.empty());
        for (std::size_t r : seen) {
          CHECK(data.events.patients[r] != folds[f].test_patient);
          CHECK(data.events.patients[r] != folds[f].dev_patient);
        }
      }
      CHECK(rec.seen[{Stage::dev_scoring, f}] == std::set<std::size_t>(dev_rows.begin(), dev_rows.end()));
      CHECK(rec.seen[{Stage::test_scoring, f}] == test_set);
      CHECK(report.folds[f].plan.test_patient == folds[f].test_patient);
      for (const auto& id : report.folds[f].event_ids) CHECK(id.rfind(folds[f].test_patient, 0) == 0);
    }
  }

  TEST_CASE("evaluation is deterministic and thread-count independent") {
    const auto data = planted_dataset(4, 12, 6);
    ClassifierSpec mlp;
    mlp.kind = ClassifierKind::mlp;
    const std::vector<ClassifierSpec> cls{lr_spec(), mlp};
    EvalOptions one, two;
    two.threads = 3;
    const auto a = evaluate(data.events, data.tables, cls, one);
    const auto b = evaluate(data.events, data.tables, cls, two);
    CHECK(format_table_csv(a) == format_table_csv(b));
    CHECK(report_to_json(a).dump() == report_to_json(b).dump());
  }

  TEST_CASE("aggregate statistics") {
    const auto data = planted_dataset(3, 24, 7);
    const auto report = evaluate(data.events, data.tables, std::vector<ClassifierSpec>{lr_spec()}, {});
    std::vector<double> aucs;
    for (const auto& f : report.folds) aucs.push_back(f.test.auc);
    CHECK(report.mean_auc == doctest::Approx(mean(aucs)));
    CHECK(report.std_auc == doctest::Approx(sample_std(aucs)));
    CHECK(report.mean_roc.size() == 101);
    CHECK(report.per_config.size() == 2);
    CHECK(report.per_config[0].id == "C1");
    REQUIRE(report.best_config.has_value());
    CHECK(*report.best_config == 1);
  }

  TEST_CASE("report json round trip reproduces the CSV tables") {
    const auto data = planted_dataset(3, 24, 8);
    auto report = evaluate(data.events, data.tables, std::vector<ClassifierSpec>{lr_spec()}, {});
    report.run_config["seed"] = 7;
    const auto text = report_to_json(report).dump(2);
    const auto back = report_from_json(nlohmann::json::parse(text));
    CHECK(format_table_csv(back) == format_table_csv(report));
    CHECK(format_mean_roc_csv(back) == format_mean_roc_csv(report));
    CHECK(report_to_json(back).dump(2) == text);
    CHECK(format_table_csv(report) == format_table_csv(report));
    const auto csv = format_table_csv(report);
    CHECK(csv.rfind("#", 0) == 0);
    CHECK(csv.find("AUC") != std::string::npos);
  }
}
