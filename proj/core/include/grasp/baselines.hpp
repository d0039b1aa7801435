#pragma once

#include "grasp/csp.hpp"
#include "grasp/filter.hpp"
#include "grasp/lda.hpp"
#include "grasp/signal.hpp"

#include <array>
#include <span>
#include <string>
#include <vector>

namespace grasp {

/// Direct 3-class trial classifiers used for comparison.
///  - ModelI: broadband 4-40 Hz CSP, no regularization, LDA head.
///  - ModelII: filter-bank CSP with covariance shrinkage, LDA head.
enum class BaselineKind { ModelI, ModelII };

enum class MulticlassScheme {
  OneVsRest,  // CSP of each class against the rest, one multiclass LDA head
  Pairwise,   // CSP + binary LDA per class pair, majority vote
};

std::string_view to_string(BaselineKind kind) noexcept;

struct BaselineConfig {
  FilterBankSpec filter_bank = broadband_filter_bank();
  int csp_pairs = kDefaultCspPairs;
  double gamma = 0.0;
  double shrinkage = kDefaultLdaShrinkage;
  MulticlassScheme scheme = MulticlassScheme::OneVsRest;

  static BaselineConfig defaults(BaselineKind kind);
  /// ModelI needs one band and gamma 0, ModelII needs gamma > 0.
  void validate(BaselineKind kind, double sample_rate_hz) const;

  friend bool operator==(const BaselineConfig&, const BaselineConfig&) = default;
};

inline constexpr double kDefaultModelIIGamma = 0.1;

struct BaselineModel {
  BaselineKind kind = BaselineKind::ModelI;
  BaselineConfig config;
  /// OneVsRest: one per class. Pairwise: one per pair (0,1), (0,2), (1,2).
  std::vector<SpatialFilterModel> spatial;
  MulticlassLdaModel head;
  std::array<LdaModel, 3> pair_heads;
  double sample_rate_hz = 0.0;
  Eigen::Index n_eeg_channels = 0;
  std::vector<std::string> training_trial_ids;

  friend bool operator==(const BaselineModel&, const BaselineModel&) = default;
};

/// Whole-trial features; only trial.eeg is read.
BaselineModel train_baseline(BaselineKind kind, std::span<const Trial> trials,
                             const BaselineConfig& config);

inline BaselineModel train_baseline(BaselineKind kind, std::span<const Trial> trials) {
  return train_baseline(kind, trials, BaselineConfig::defaults(kind));
}

GraspClass predict_baseline(const BaselineModel& model, const Trial& trial);

}  // namespace grasp
