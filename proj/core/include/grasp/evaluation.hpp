#pragma once

#include "grasp/baselines.hpp"
#include "grasp/matching.hpp"
#include "grasp/pipeline.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace grasp {

enum class Method { Proposed, ModelI, ModelII };

inline constexpr std::array<Method, 3> kAllMethods = {Method::Proposed, Method::ModelI,
                                                      Method::ModelII};

/// "proposed", "model1", "model2".
std::string_view to_string(Method method) noexcept;
std::optional<Method> parse_method(std::string_view text) noexcept;
/// Column title: "Proposed", "Model I", "Model II".
std::string_view display_name(Method method) noexcept;

struct Summary {
  double mean = 0.0;
  /// Sample standard deviation (n - 1); 0 for a single value.
  double std_dev = 0.0;
};

/// Throws EmptyInput for an empty list.
Summary summarize(std::span<const double> values);

using ConfusionMatrix = std::array<std::array<std::size_t, kNumClasses>, kNumClasses>;

struct TrialRecord {
  std::string trial_id;
  GraspClass truth = GraspClass::Lateral;
  GraspClass predicted = GraspClass::Lateral;

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

/// What went into one fold, for the leakage audit.
struct FoldAudit {
  std::vector<std::string> test_ids;
  /// Trials the fitted model reports it was trained on.
  std::vector<std::string> fit_ids;
  /// Trials whose EMG patterns sit in the fold's library (Proposed only).
  std::vector<std::string> library_ids;
};

struct EvaluationReport {
  Method method = Method::Proposed;
  Paradigm paradigm = Paradigm::ActualMovement;
  /// Fractions in [0, 1].
  std::vector<double> per_fold_accuracy;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;
  /// confusion[truth][predicted].
  ConfusionMatrix confusion{};
  std::vector<TrialRecord> per_trial_records;
  std::vector<FoldAudit> audits;
};

/// Report with mean/std recomputed from the folds and confusion from the
/// records.
EvaluationReport make_report(Method method, Paradigm paradigm, std::vector<double> per_fold_accuracy,
                             std::vector<TrialRecord> records = {});

struct EvaluationConfig {
  PipelineConfig pipeline;
  MatchOptions matching;
  BaselineConfig model1 = BaselineConfig::defaults(BaselineKind::ModelI);
  BaselineConfig model2 = BaselineConfig::defaults(BaselineKind::ModelII);
  std::size_t k_folds = 5;
  /// Movement: train and test on movement trials. Imagery: the Proposed
  /// model is trained on movement trials and tested on imagery trials;
  /// baselines are trained on the imagery training folds.
  Paradigm paradigm = Paradigm::ActualMovement;
  std::uint64_t fold_seed = 0;
  /// Folds evaluated concurrently; 0 means hardware concurrency.
  std::size_t max_parallel_folds = 0;
};

/// Fold index per label, stratified by class: each class is shuffled with
/// `seed` and dealt round-robin. Throws InsufficientData if k < 2 or any
/// present class has fewer than k members.
std::vector<std::size_t> stratified_folds(std::span<const GraspClass> labels, std::size_t k,
                                          std::uint64_t seed);

/// Stratified k-fold cross-validation. Every fit sees training-fold trials
/// only. Throws InsufficientData when folds cannot be formed.
EvaluationReport cross_validate(std::span<const Trial> trials, const EvaluationConfig& config,
                                Method method);

/// Single stratified train/test split; `test_fraction` in (0, 1).
EvaluationReport holdout_evaluate(std::span<const Trial> trials, const EvaluationConfig& config,
                                  Method method, double test_fraction);

/// Test ids found among fit or library ids, summed over folds.
std::size_t count_leakage_violations(const EvaluationReport& report);

}  // namespace grasp
