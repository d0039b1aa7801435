#pragma once

#include "grasp/emg_activation.hpp"
#include "grasp/pipeline.hpp"

#include <array>
#include <string>
#include <vector>

namespace grasp {

/// How the per-pattern errors of a class are combined.
enum class Aggregation {
  Mean,     // average error over every pattern of the class
  Minimum,  // nearest pattern of the class
};

struct PatternError {
  GraspClass class_label = GraspClass::Lateral;
  std::size_t pattern_index = 0;
  double mse = 0.0;

  friend bool operator==(const PatternError&, const PatternError&) = default;
};

struct MatchReport {
  std::string trial_id;
  /// Aggregated error per class; +inf for a class with no patterns.
  std::array<double, kNumClasses> per_class_mean_mse{};
  std::vector<PatternError> per_pattern_mse;
  GraspClass predicted = GraspClass::Lateral;

  friend bool operator==(const MatchReport&, const MatchReport&) = default;
};

/// Mean squared difference over all entries; the Hamming fraction for
/// binary patterns. Throws DimensionMismatch on shape mismatch.
double pattern_mse(const ActivationPattern& a, const ActivationPattern& b);

/// MSE between real-valued activation estimates in [0, 1] and a binary pattern.
double pattern_mse(const Eigen::MatrixXd& soft, const ActivationPattern& b);

/// Number of differing entries.
std::size_t hamming_distance(const ActivationPattern& a, const ActivationPattern& b);

/// Compares against every library pattern; argmin over classes, ties to the
/// lowest class index.
MatchReport classify_pattern(const ActivationPattern& estimated, const PatternLibrary& library,
                             Aggregation aggregation = Aggregation::Mean);

MatchReport classify_soft_pattern(const Eigen::MatrixXd& soft, const PatternLibrary& library,
                                  Aggregation aggregation = Aggregation::Mean);

struct MatchOptions {
  Aggregation aggregation = Aggregation::Mean;
  /// Compare logistic-squashed LDA scores instead of hard decisions.
  bool soft_scores = false;

  friend bool operator==(const MatchOptions&, const MatchOptions&) = default;
};

/// estimate_pattern followed by classify_pattern.
MatchReport classify_trial(const PipelineModel& model, const Trial& trial,
                           const MatchOptions& options = {});

}  // namespace grasp
