#include "support.hpp"

#include <grasp/matching.hpp>
#include <grasp/pipeline.hpp>
#include <grasp/synth.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

using namespace grasp;
using grasp::test::expect_error;
using grasp::test::random_pattern;

namespace {

ActivationPattern labeled(ActivationPattern p, GraspClass c, std::string id = {}) {
  p.class_label = c;
  p.trial_id = std::move(id);
  return p;
}

std::size_t brute_count(const ActivationPattern& a, const ActivationPattern& b) {
  std::size_t n = 0;
  for (Eigen::Index r = 0; r < a.values.rows(); ++r) {
    for (Eigen::Index c = 0; c < a.values.cols(); ++c) n += a.values(r, c) != b.values(r, c);
  }
  return n;
}

// flips `k` distinct entries, chosen deterministically from `seed`
ActivationPattern flip(ActivationPattern p, std::size_t k, std::uint64_t seed) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(p.values.size()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  for (std::size_t i = 0; i < k; ++i) {
    auto& v = p.values.data()[idx[i]];
    v = v ? 0 : 1;
  }
  return p;
}

SynthConfig strong_coupling() {
  SynthConfig c;
  c.snr_db = 0.0;
  c.coupling_gain = 1.5;
  c.n_trials_per_class = 12;
  c.rng_seed = 33;
  return c;
}

}  // namespace

TEST(PatternMse, IdentityAndComplement) {
  std::mt19937_64 rng(1);
  const auto a = random_pattern(rng);
  EXPECT_EQ(pattern_mse(a, a), 0.0);
  ActivationPattern b = a;
  b.values = (1 - a.values.array()).matrix();
  EXPECT_EQ(pattern_mse(a, b), 1.0);
  EXPECT_EQ(hamming_distance(a, b), 180u);
}

TEST(PatternMse, EighteenDifferencesIsPointOne) {
  std::mt19937_64 rng(2);
  const auto a = random_pattern(rng);
  const auto b = flip(a, 18, 7);
  EXPECT_EQ(brute_count(a, b), 18u);
  EXPECT_EQ(hamming_distance(a, b), 18u);
  EXPECT_EQ(pattern_mse(a, b), 18.0 / 180.0);
}

TEST(PatternMse, DimensionMismatch) {
  std::mt19937_64 rng(3);
  const auto a = random_pattern(rng, 6, 30);
  const auto b = random_pattern(rng, 6, 29);
  expect_error([&] { (void)pattern_mse(a, b); }, ErrorKind::DimensionMismatch);
  expect_error([&] { (void)hamming_distance(a, b); }, ErrorKind::DimensionMismatch);
  expect_error([&] { (void)pattern_mse(Eigen::MatrixXd::Zero(5, 30), a); }, ErrorKind::DimensionMismatch);
}

TEST(PatternMse, HammingEquivalenceSymmetryTriangle) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> density(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const auto a = random_pattern(rng, 6, 30, density(rng));
    const auto b = random_pattern(rng, 6, 30, density(rng));
    const auto c = random_pattern(rng, 6, 30, density(rng));
    const auto n = brute_count(a, b);
    const double m = pattern_mse(a, b);
    ASSERT_EQ(std::llround(m * 180.0), static_cast<long long>(n));
    ASSERT_EQ(m, static_cast<double>(n) / 180.0);
    ASSERT_EQ(m, pattern_mse(b, a));
    ASSERT_LE(pattern_mse(a, c), m + pattern_mse(b, c) + 1e-15);
  }
}

TEST(PatternMse, SoftEqualsHardForBinaryInput) {
  std::mt19937_64 rng(5);
  const auto a = random_pattern(rng);
  const auto b = random_pattern(rng);
  EXPECT_EQ(pattern_mse(a.values.cast<double>().eval(), b), pattern_mse(a, b));
  Eigen::MatrixXd half = Eigen::MatrixXd::Constant(6, 30, 0.5);
  EXPECT_DOUBLE_EQ(pattern_mse(half, b), 0.25);
}

TEST(ClassifyPattern, ControlledDistancesPickPincer) {
  std::mt19937_64 rng(6);
  const auto target = random_pattern(rng);
  PatternLibrary lib(WindowSpec{}, 6, 30);
  lib.add(labeled(target, GraspClass::Pincer, "p0"));
  lib.add(labeled(flip(target, 10, 1), GraspClass::Pincer, "p1"));
  for (std::uint64_t s = 0; s < 3; ++s) {
    lib.add(labeled(flip(target, 54 + s, 10 + s), GraspClass::Lateral, "l" + std::to_string(s)));
    lib.add(labeled(flip(target, 60 + s, 20 + s), GraspClass::Palmar, "m" + std::to_string(s)));
  }
  const auto r = classify_pattern(target, lib);
  EXPECT_EQ(r.predicted, GraspClass::Pincer);
  EXPECT_DOUBLE_EQ(r.per_class_mean_mse[1], (0.0 + 10.0 / 180.0) / 2.0);
  EXPECT_GE(r.per_class_mean_mse[0], 0.3);
  EXPECT_GE(r.per_class_mean_mse[2], 0.3);
}

TEST(ClassifyPattern, ThreeWayTieGoesToLateral) {
  std::mt19937_64 rng(7);
  const auto p = random_pattern(rng);
  PatternLibrary lib(WindowSpec{}, 6, 30);
  lib.add(labeled(p, GraspClass::Palmar));
  lib.add(labeled(p, GraspClass::Pincer));
  lib.add(labeled(p, GraspClass::Lateral));
  const auto r = classify_pattern(p, lib);
  EXPECT_EQ(r.predicted, GraspClass::Lateral);
  for (double e : r.per_class_mean_mse) EXPECT_EQ(e, 0.0);

  // Pincer/Palmar tie below Lateral
  PatternLibrary lib2(WindowSpec{}, 6, 30);
  lib2.add(labeled(flip(p, 30, 1), GraspClass::Lateral));
  lib2.add(labeled(flip(p, 12, 2), GraspClass::Pincer));
  lib2.add(labeled(flip(p, 12, 3), GraspClass::Palmar));
  EXPECT_EQ(classify_pattern(p, lib2).predicted, GraspClass::Pincer);
}

TEST(ClassifyPattern, FullLibraryReportsEveryPattern) {
  std::mt19937_64 rng(8);
  PatternLibrary lib(WindowSpec{}, 6, 30);
  for (auto c : kAllClasses) {
    for (int i = 0; i < 50; ++i) lib.add(labeled(random_pattern(rng, 6, 30, 0.3), c));
  }
  const auto est = random_pattern(rng);
  const auto r = classify_pattern(est, lib);
  ASSERT_EQ(r.per_pattern_mse.size(), 150u);

  std::array<double, kNumClasses> sum{};
  std::array<std::size_t, kNumClasses> n{};
  for (const auto& e : r.per_pattern_mse) {
    const auto k = class_index(e.class_label);
    EXPECT_EQ(e.mse, pattern_mse(est, lib.patterns(e.class_label)[e.pattern_index]));
    EXPECT_GE(e.mse, 0.0);
    EXPECT_LE(e.mse, 1.0);
    sum[k] += e.mse;
    ++n[k];
  }
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    EXPECT_EQ(n[k], 50u);
    EXPECT_EQ(r.per_class_mean_mse[k], sum[k] / 50.0);
  }
}

TEST(ClassifyPattern, UniformShiftKeepsOrdering) {
  // every library pattern is 0 on the first row; flipping entries there
  // adds the same distance to every comparison
  std::mt19937_64 rng(9);
  PatternLibrary lib(WindowSpec{}, 6, 30);
  for (auto c : kAllClasses) {
    for (int i = 0; i < 5; ++i) {
      auto p = random_pattern(rng);
      p.values.row(0).setZero();
      lib.add(labeled(p, c));
    }
  }
  auto est = random_pattern(rng);
  est.values.row(0).setZero();
  const auto base = classify_pattern(est, lib);
  for (Eigen::Index k = 1; k <= 30; k += 7) {
    auto shifted = est;
    shifted.values.row(0).head(k).setOnes();
    const auto r = classify_pattern(shifted, lib);
    EXPECT_EQ(r.predicted, base.predicted);
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      EXPECT_NEAR(r.per_class_mean_mse[c] - base.per_class_mean_mse[c], static_cast<double>(k) / 180.0, 1e-15);
    }
  }
}

TEST(ClassifyPattern, MinimumAggregationUsesNearest) {
  std::mt19937_64 rng(10);
  const auto target = random_pattern(rng);
  PatternLibrary lib(WindowSpec{}, 6, 30);
  // Lateral: one exact match and one far pattern; Pincer: two moderate ones
  lib.add(labeled(target, GraspClass::Lateral));
  lib.add(labeled(flip(target, 170, 1), GraspClass::Lateral));
  lib.add(labeled(flip(target, 20, 2), GraspClass::Pincer));
  lib.add(labeled(flip(target, 22, 3), GraspClass::Pincer));
  lib.add(labeled(flip(target, 90, 4), GraspClass::Palmar));
  EXPECT_EQ(classify_pattern(target, lib, Aggregation::Mean).predicted, GraspClass::Pincer);
  const auto r = classify_pattern(target, lib, Aggregation::Minimum);
  EXPECT_EQ(r.predicted, GraspClass::Lateral);
  EXPECT_EQ(r.per_class_mean_mse[0], 0.0);
  EXPECT_EQ(r.per_class_mean_mse[1], 20.0 / 180.0);
}

TEST(ClassifyPattern, MissingClassIsInfinite) {
  std::mt19937_64 rng(11);
  const auto p = random_pattern(rng);
  PatternLibrary lib(WindowSpec{}, 6, 30);
  lib.add(labeled(flip(p, 40, 1), GraspClass::Palmar));
  const auto r = classify_pattern(p, lib);
  EXPECT_EQ(r.predicted, GraspClass::Palmar);
  EXPECT_TRUE(std::isinf(r.per_class_mean_mse[0]));
  EXPECT_TRUE(std::isinf(r.per_class_mean_mse[1]));
}

TEST(ClassifyPattern, Errors) {
  std::mt19937_64 rng(12);
  const auto p = random_pattern(rng);
  expect_error([&] { (void)classify_pattern(p, PatternLibrary{}); }, ErrorKind::EmptyLibrary);
  PatternLibrary lib(WindowSpec{}, 6, 30);
  lib.add(labeled(p, GraspClass::Lateral));
  expect_error([&] { (void)classify_pattern(random_pattern(rng, 5, 30), lib); }, ErrorKind::DimensionMismatch);
  expect_error([&] { (void)classify_soft_pattern(Eigen::MatrixXd::Zero(6, 31), lib); },
               ErrorKind::DimensionMismatch);
}

TEST(ClassifySoftPattern, BinaryInputMatchesHard) {
  std::mt19937_64 rng(13);
  PatternLibrary lib(WindowSpec{}, 6, 30);
  for (auto c : kAllClasses) {
    for (int i = 0; i < 4; ++i) lib.add(labeled(random_pattern(rng), c));
  }
  const auto est = random_pattern(rng);
  const auto hard = classify_pattern(est, lib);
  const auto soft = classify_soft_pattern(est.values.cast<double>(), lib);
  EXPECT_EQ(hard.per_class_mean_mse, soft.per_class_mean_mse);
  EXPECT_EQ(hard.predicted, soft.predicted);
}

class TrialMatching : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    std::vector<Trial> mv;
    for (auto& t : generate_dataset(strong_coupling())) {
      if (t.paradigm == Paradigm::ActualMovement) mv.push_back(std::move(t));
    }
    model_ = new PipelineModel(train_pipeline(mv, PipelineConfig{}));
  }
  static void TearDownTestSuite() { delete model_; }
  static PipelineModel* model_;
};

PipelineModel* TrialMatching::model_ = nullptr;

TEST_F(TrialMatching, FreshTrialsAreClassifiedByTheirSchedule) {
  const auto schedules = default_schedules();
  auto cfg = strong_coupling();
  std::size_t ok = 0;
  for (std::uint64_t s = 0; s < 9; ++s) {
    const auto& sched = schedules[s % 3];
    const auto trial = generate_trial(jitter_schedule(sched, cfg.jitter_ms, cfg.duration_ms, s), cfg,
                                      Paradigm::ActualMovement, 9000 + s, "f" + std::to_string(s));
    const auto r = classify_trial(*model_, trial);
    ok += r.predicted == sched.class_label;
    EXPECT_EQ(r.trial_id, trial.id);
    EXPECT_EQ(r.per_pattern_mse.size(), model_->library.size());
  }
  EXPECT_GE(ok, 8u);
  // the specific Lateral example
  const auto lateral = generate_trial(schedules[0], cfg, Paradigm::ActualMovement, 424242, "lat");
  EXPECT_EQ(classify_trial(*model_, lateral).predicted, GraspClass::Lateral);
}

TEST_F(TrialMatching, SoftModeAgreesOnCleanTrials) {
  const auto schedules = default_schedules();
  const auto cfg = strong_coupling();
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    const auto trial = generate_trial(schedules[k], cfg, Paradigm::ActualMovement, 777 + k, "s");
    const auto r = classify_trial(*model_, trial, MatchOptions{Aggregation::Mean, true});
    EXPECT_EQ(r.predicted, schedules[k].class_label);
    for (double e : r.per_class_mean_mse) {
      EXPECT_GE(e, 0.0);
      EXPECT_LE(e, 1.0);
    }
  }
}

TEST_F(TrialMatching, DeterministicRepeat) {
  const auto cfg = strong_coupling();
  const auto trial = generate_trial(default_schedules()[1], cfg, Paradigm::ActualMovement, 5, "rep");
  EXPECT_EQ(classify_trial(*model_, trial), classify_trial(*model_, trial));
}

TEST_F(TrialMatching, UncorrelatedEegIsAtChance) {
  auto cfg = strong_coupling();
  cfg.coupling_gain = 0.0;
  const auto schedules = default_schedules();
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::size_t> pick(0, 2);
  std::size_t ok = 0;
  const std::size_t n = 300;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& sched = schedules[pick(rng)];
    const auto trial = generate_trial(sched, cfg, Paradigm::ActualMovement, 50000 + i, "n");
    ok += classify_trial(*model_, trial).predicted == sched.class_label;
  }
  EXPECT_NEAR(static_cast<double>(ok) / n, 1.0 / 3.0, 0.1);
}
