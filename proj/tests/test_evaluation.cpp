#include "support.hpp"

#include <grasp/evaluation.hpp>
#include <grasp/report.hpp>
#include <grasp/synth.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>

using namespace grasp;
using grasp::test::expect_error;

namespace {

// published per-subject accuracies, proposed / Model I / Model II, in percent
const std::vector<double> kMovementProposed = {69.32, 71.98, 70.22, 67.13, 59.10, 68.23, 47.43, 67.02, 58.43, 60.01};
const std::vector<double> kMovementModel1 = {39.54, 33.04, 36.23, 42.32, 39.31, 35.24, 48.23, 41.48, 45.01, 37.99};
const std::vector<double> kMovementModel2 = {41.32, 40.12, 38.88, 41.32, 44.08, 39.20, 49.12, 47.33, 39.42, 42.15};
const std::vector<double> kImageryProposed = {33.32, 38.42, 69.23, 62.13, 38.03, 43.23, 35.23, 73.48, 34.11, 42.42};
const std::vector<double> kImageryModel1 = {34.13, 33.50, 38.12, 40.31, 40.01, 39.31, 43.23, 32.48, 38.49, 44.01};
const std::vector<double> kImageryModel2 = {41.32, 36.44, 39.43, 32.54, 35.23, 59.32, 43.24, 44.24, 39.32, 41.9};

std::vector<double> fractions(const std::vector<double>& pct) {
  std::vector<double> out;
  for (double v : pct) out.push_back(v / 100.0);
  return out;
}

std::vector<Trial> dataset(std::size_t per_class, std::uint64_t seed) {
  SynthConfig c;
  c.n_trials_per_class = per_class;
  c.rng_seed = seed;
  c.snr_db = 0.0;
  c.coupling_gain = 1.5;
  return generate_dataset(c);
}

}  // namespace

TEST(Summarize, MovementProposed) {
  const auto s = summarize(kMovementProposed);
  EXPECT_NEAR(s.mean, 63.89, 0.01);
  EXPECT_NEAR(s.std_dev, 7.54, 0.01);
}

TEST(Summarize, MovementBaselines) {
  EXPECT_NEAR(summarize(kMovementModel1).mean, 39.84, 0.01);
  EXPECT_NEAR(summarize(kMovementModel1).std_dev, 4.60, 0.01);
  EXPECT_NEAR(summarize(kMovementModel2).mean, 42.29, 0.01);
  EXPECT_NEAR(summarize(kMovementModel2).std_dev, 3.52, 0.01);
}

TEST(Summarize, ImageryColumns) {
  const auto s = summarize(kImageryProposed);
  EXPECT_NEAR(s.mean, 46.96, 0.01);
  EXPECT_NEAR(s.std_dev, 15.29, 0.01);
  EXPECT_NEAR(summarize(kImageryModel1).mean, 38.36, 0.01);
  EXPECT_NEAR(summarize(kImageryModel1).std_dev, 3.93, 0.01);
  EXPECT_NEAR(summarize(kImageryModel2).mean, 41.30, 0.01);
  EXPECT_NEAR(summarize(kImageryModel2).std_dev, 7.32, 0.01);
}

TEST(Summarize, ConstantSingleAndEmpty) {
  const std::vector<double> c(7, 0.42);
  EXPECT_EQ(summarize(c).std_dev, 0.0);
  EXPECT_DOUBLE_EQ(summarize(c).mean, 0.42);
  const std::vector<double> one = {0.5};
  EXPECT_EQ(summarize(one).std_dev, 0.0);
  expect_error([] { (void)summarize(std::vector<double>{}); }, ErrorKind::EmptyInput);
}

TEST(Summarize, MatchesTwoPassOracle) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(37);
  for (auto& x : v) x = u(rng);
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  const auto s = summarize(v);
  EXPECT_NEAR(s.mean, m, 1e-15);
  EXPECT_NEAR(s.std_dev, std::sqrt(ss / 36.0), 1e-15);
}

TEST(MakeReport, RecomputesFromFoldsAndRecords) {
  std::vector<TrialRecord> recs = {{"a", GraspClass::Lateral, GraspClass::Lateral},
                                   {"b", GraspClass::Lateral, GraspClass::Palmar},
                                   {"c", GraspClass::Pincer, GraspClass::Pincer},
                                   {"d", GraspClass::Palmar, GraspClass::Pincer}};
  const auto r = make_report(Method::ModelI, Paradigm::ActualMovement, {0.5, 0.5}, recs);
  EXPECT_EQ(r.mean_accuracy, 0.5);
  EXPECT_EQ(r.std_accuracy, 0.0);
  EXPECT_EQ(r.confusion[0][0], 1u);
  EXPECT_EQ(r.confusion[0][2], 1u);
  EXPECT_EQ(r.confusion[1][1], 1u);
  EXPECT_EQ(r.confusion[2][1], 1u);
}

TEST(Method, NamesRoundTrip) {
  for (auto m : kAllMethods) EXPECT_EQ(parse_method(to_string(m)), m);
  EXPECT_EQ(display_name(Method::ModelII), "Model II");
  EXPECT_FALSE(parse_method("model3").has_value());
}

TEST(StratifiedFolds, BalancedAndDeterministic) {
  std::vector<GraspClass> labels;
  for (int i = 0; i < 50; ++i) {
    for (auto c : kAllClasses) labels.push_back(c);
  }
  const auto f = stratified_folds(labels, 5, 11);
  ASSERT_EQ(f.size(), 150u);
  std::array<std::array<int, 5>, 3> counts{};
  for (std::size_t i = 0; i < f.size(); ++i) {
    ASSERT_LT(f[i], 5u);
    ++counts[class_index(labels[i])][f[i]];
  }
  for (const auto& row : counts) {
    for (int n : row) EXPECT_EQ(n, 10);
  }
  EXPECT_EQ(f, stratified_folds(labels, 5, 11));
  EXPECT_NE(f, stratified_folds(labels, 5, 12));
}

TEST(StratifiedFolds, UnevenCountsDifferByAtMostOne) {
  std::vector<GraspClass> labels(13, GraspClass::Pincer);
  labels.insert(labels.end(), 7, GraspClass::Palmar);
  const auto f = stratified_folds(labels, 4, 0);
  std::array<int, 4> pincer{}, palmar{};
  for (std::size_t i = 0; i < labels.size(); ++i) {
    ++(labels[i] == GraspClass::Pincer ? pincer : palmar)[f[i]];
  }
  EXPECT_LE(*std::max_element(pincer.begin(), pincer.end()) - *std::min_element(pincer.begin(), pincer.end()), 1);
  EXPECT_LE(*std::max_element(palmar.begin(), palmar.end()) - *std::min_element(palmar.begin(), palmar.end()), 1);
}

TEST(StratifiedFolds, InsufficientData) {
  const std::vector<GraspClass> labels = {GraspClass::Lateral, GraspClass::Lateral, GraspClass::Pincer};
  expect_error([&] { (void)stratified_folds(labels, 2, 0); }, ErrorKind::InsufficientData);
  expect_error([&] { (void)stratified_folds(labels, 1, 0); }, ErrorKind::InsufficientData);
}

class CrossValidation : public ::testing::Test {
 protected:
  static void SetUpTestSuite() { trials_ = new std::vector<Trial>(dataset(8, 5)); }
  static void TearDownTestSuite() { delete trials_; }
  static std::vector<Trial>* trials_;

  static EvaluationConfig config(Paradigm p) {
    EvaluationConfig c;
    c.k_folds = 4;
    c.paradigm = p;
    c.fold_seed = 2;
    return c;
  }
};

std::vector<Trial>* CrossValidation::trials_ = nullptr;

TEST_F(CrossValidation, ProposedMovementAuditsClean) {
  const auto r = cross_validate(*trials_, config(Paradigm::ActualMovement), Method::Proposed);
  ASSERT_EQ(r.per_fold_accuracy.size(), 4u);
  ASSERT_EQ(r.audits.size(), 4u);
  EXPECT_EQ(count_leakage_violations(r), 0u);
  EXPECT_EQ(r.per_trial_records.size(), 24u);

  std::set<std::string> tested;
  for (const auto& a : r.audits) {
    EXPECT_EQ(a.test_ids.size(), 6u);
    EXPECT_EQ(a.fit_ids.size(), 18u);
    EXPECT_EQ(a.library_ids.size(), 18u);
    for (const auto& id : a.test_ids) {
      EXPECT_TRUE(tested.insert(id).second);
      EXPECT_EQ(id.rfind("mov-", 0), 0u);
    }
  }
  EXPECT_EQ(tested.size(), 24u);

  const auto s = summarize(r.per_fold_accuracy);
  EXPECT_EQ(r.mean_accuracy, s.mean);
  EXPECT_EQ(r.std_accuracy, s.std_dev);
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    std::size_t row = 0;
    for (auto n : r.confusion[k]) row += n;
    EXPECT_EQ(row, 8u);
  }
  EXPECT_GE(r.mean_accuracy, 0.8);
}

TEST_F(CrossValidation, ImageryTrainsOnMovement) {
  const auto r = cross_validate(*trials_, config(Paradigm::MotorImagery), Method::Proposed);
  EXPECT_EQ(count_leakage_violations(r), 0u);
  for (const auto& a : r.audits) {
    for (const auto& id : a.test_ids) EXPECT_EQ(id.rfind("mi-", 0), 0u);
    for (const auto& id : a.fit_ids) EXPECT_EQ(id.rfind("mov-", 0), 0u);
    for (const auto& id : a.library_ids) EXPECT_EQ(id.rfind("mov-", 0), 0u);
  }
  EXPECT_EQ(r.paradigm, Paradigm::MotorImagery);
}

TEST_F(CrossValidation, BaselinesAuditClean) {
  for (auto m : {Method::ModelI, Method::ModelII}) {
    for (auto p : {Paradigm::ActualMovement, Paradigm::MotorImagery}) {
      const auto r = cross_validate(*trials_, config(p), m);
      EXPECT_EQ(count_leakage_violations(r), 0u);
      EXPECT_EQ(r.per_trial_records.size(), 24u);
      for (const auto& a : r.audits) EXPECT_TRUE(a.library_ids.empty());
    }
  }
}

TEST_F(CrossValidation, DeterministicAcrossParallelism) {
  auto a_cfg = config(Paradigm::ActualMovement);
  a_cfg.max_parallel_folds = 1;
  auto b_cfg = a_cfg;
  b_cfg.max_parallel_folds = 4;
  const auto a = cross_validate(*trials_, a_cfg, Method::ModelI);
  const auto b = cross_validate(*trials_, b_cfg, Method::ModelI);
  EXPECT_EQ(a.per_fold_accuracy, b.per_fold_accuracy);
  EXPECT_EQ(a.per_trial_records, b.per_trial_records);
}

TEST_F(CrossValidation, Holdout) {
  const auto r = holdout_evaluate(*trials_, config(Paradigm::ActualMovement), Method::ModelI, 0.25);
  EXPECT_EQ(r.per_fold_accuracy.size(), 1u);
  EXPECT_EQ(r.per_trial_records.size(), 6u);
  EXPECT_EQ(count_leakage_violations(r), 0u);
  expect_error([&] { (void)holdout_evaluate(*trials_, config(Paradigm::ActualMovement), Method::ModelI, 1.5); },
               ErrorKind::InvalidConfig);
}

TEST_F(CrossValidation, TooFewTrials) {
  auto cfg = config(Paradigm::ActualMovement);
  cfg.k_folds = 9;
  expect_error([&] { (void)cross_validate(*trials_, cfg, Method::ModelI); }, ErrorKind::InsufficientData);
}

TEST(LeakageAudit, CountsPlantedViolations) {
  EvaluationReport r;
  r.audits.push_back(FoldAudit{{"a", "b"}, {"c", "a"}, {"b", "d"}});
  r.audits.push_back(FoldAudit{{"x"}, {"y"}, {}});
  EXPECT_EQ(count_leakage_violations(r), 2u);
}

TEST(Report, TableShapeWithThreeMethods) {
  const std::vector<EvaluationReport> reports = {
      make_report(Method::Proposed, Paradigm::ActualMovement, fractions(kMovementProposed)),
      make_report(Method::ModelI, Paradigm::ActualMovement, fractions(kMovementModel1)),
      make_report(Method::ModelII, Paradigm::ActualMovement, fractions(kMovementModel2))};
  const auto text = emit_report(reports, ReportFormat::Table);
  EXPECT_NE(text.find("Accuracy (%)"), std::string::npos);
  EXPECT_NE(text.find("Proposed"), std::string::npos);
  EXPECT_NE(text.find("Model II"), std::string::npos);
  EXPECT_NE(text.find("69.32"), std::string::npos);
  EXPECT_NE(text.find("60.01"), std::string::npos);
  EXPECT_EQ(text.find("Confusion"), std::string::npos);

  std::istringstream in(text);
  std::string line, last;
  std::size_t fold_rows = 0;
  while (std::getline(in, line)) {
    if (!line.empty()) last = line;
    if (line.rfind("S", 0) == 0 || (line.size() > 0 && std::isdigit(static_cast<unsigned char>(line[0])))) {
      ++fold_rows;
    }
  }
  EXPECT_EQ(fold_rows, 10u);
  EXPECT_EQ(last.rfind("Mean±Std.", 0), 0u) << last;
  // 7.5489 rounds to 7.55
  EXPECT_NE(last.find("63.89±7.55"), std::string::npos) << last;
  EXPECT_NE(last.find("39.84±4.60"), std::string::npos) << last;
  EXPECT_NE(last.find("42.29±3.52"), std::string::npos) << last;
  EXPECT_EQ(text, emit_report(reports, ReportFormat::Table));
}

TEST(Report, ConfusionSectionOnlyWithRecords) {
  std::vector<TrialRecord> recs = {{"a", GraspClass::Lateral, GraspClass::Lateral},
                                   {"b", GraspClass::Pincer, GraspClass::Palmar}};
  const auto with = emit_report(make_report(Method::Proposed, Paradigm::ActualMovement, {0.5}, recs),
                                ReportFormat::Table);
  const auto without = emit_report(make_report(Method::Proposed, Paradigm::ActualMovement, {0.5}),
                                   ReportFormat::Table);
  EXPECT_NE(with.find("Confusion"), std::string::npos);
  EXPECT_EQ(without.find("Confusion"), std::string::npos);
}

TEST(Report, CsvRoundTrip) {
  const std::vector<EvaluationReport> reports = {
      make_report(Method::Proposed, Paradigm::MotorImagery, fractions(kImageryProposed)),
      make_report(Method::ModelI, Paradigm::MotorImagery, fractions(kImageryModel1)),
      make_report(Method::ModelII, Paradigm::MotorImagery, fractions(kImageryModel2))};
  const auto csv = emit_report(reports, ReportFormat::Csv);
  EXPECT_EQ(csv.rfind("fold,proposed,model1,model2", 0), 0u);
  const auto parsed = parse_report_csv(csv);
  ASSERT_EQ(parsed.methods.size(), 3u);
  EXPECT_EQ(parsed.methods[2], Method::ModelII);
  const std::vector<const std::vector<double>*> cols = {&kImageryProposed, &kImageryModel1, &kImageryModel2};
  for (std::size_t m = 0; m < 3; ++m) {
    ASSERT_EQ(parsed.per_fold[m].size(), 10u);
    for (std::size_t f = 0; f < 10; ++f) EXPECT_NEAR(parsed.per_fold[m][f], (*cols[m])[f], 0.005);
    EXPECT_NEAR(parsed.mean[m], reports[m].mean_accuracy * 100.0, 0.005);
    EXPECT_NEAR(parsed.std_dev[m], reports[m].std_accuracy * 100.0, 0.005);
  }
  EXPECT_NEAR(parsed.mean[0], 46.96, 0.01);
  EXPECT_NEAR(parsed.std_dev[0], 15.29, 0.01);
  // re-emitting the parsed values gives the same text
  std::vector<EvaluationReport> again;
  for (std::size_t m = 0; m < 3; ++m) {
    again.push_back(make_report(parsed.methods[m], Paradigm::MotorImagery, fractions(parsed.per_fold[m])));
  }
  EXPECT_EQ(emit_report(again, ReportFormat::Csv), csv);
}

TEST(Report, CsvParseErrors) {
  expect_error([] { (void)parse_report_csv("nonsense"); }, ErrorKind::FormatError);
  expect_error([] { (void)parse_report_csv("fold,proposed\n1,abc\nmean,1\nstd,0\n"); }, ErrorKind::FormatError);
}

TEST(Report, FormatNames) {
  EXPECT_EQ(parse_report_format("table"), ReportFormat::Table);
  EXPECT_EQ(parse_report_format("csv"), ReportFormat::Csv);
  EXPECT_FALSE(parse_report_format("xml").has_value());
}

TEST(Report, MatchReports) {
  MatchReport a;
  a.trial_id = "t1";
  a.per_class_mean_mse = {0.1, 0.2, 0.3};
  a.predicted = GraspClass::Lateral;
  MatchReport b = a;
  b.trial_id = "t2";
  const std::vector<MatchReport> rs = {a, b};
  const std::vector<std::optional<GraspClass>> truth = {GraspClass::Lateral, GraspClass::Palmar};
  const auto table = emit_match_reports(rs, ReportFormat::Table, truth);
  EXPECT_NE(table.find("0.100000"), std::string::npos);
  EXPECT_NE(table.find("50.00"), std::string::npos) << table;
  const auto csv = emit_match_reports(rs, ReportFormat::Csv);
  EXPECT_NE(csv.find("t2"), std::string::npos);
}
