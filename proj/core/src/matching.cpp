#include "grasp/matching.hpp"

#include "grasp/errors.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>

namespace grasp {
namespace {

void check_shape(Eigen::Index rows_a, Eigen::Index cols_a, Eigen::Index rows_b,
                 Eigen::Index cols_b) {
  if (rows_a != rows_b || cols_a != cols_b) {
    fail(ErrorKind::DimensionMismatch,
         fmt::format("pattern {}x{} vs {}x{}", rows_a, cols_a, rows_b, cols_b));
  }
}

template <typename ErrorFn>
MatchReport match(Eigen::Index rows, Eigen::Index cols, const PatternLibrary& library,
                  Aggregation aggregation, ErrorFn&& error_of) {
  if (library.empty()) fail(ErrorKind::EmptyLibrary, "pattern library is empty");
  check_shape(rows, cols, static_cast<Eigen::Index>(library.n_channels()),
              static_cast<Eigen::Index>(library.n_segments()));

  MatchReport report;
  report.per_pattern_mse.reserve(library.size());
  for (auto c : kAllClasses) {
    const auto& patterns = library.patterns(c);
    double aggregate = std::numeric_limits<double>::infinity();
    if (!patterns.empty()) {
      double sum = 0.0;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < patterns.size(); ++i) {
        const double e = error_of(patterns[i]);
        report.per_pattern_mse.push_back(PatternError{c, i, e});
        sum += e;
        best = std::min(best, e);
      }
      aggregate = aggregation == Aggregation::Mean ? sum / static_cast<double>(patterns.size()) : best;
    }
    report.per_class_mean_mse[class_index(c)] = aggregate;
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < kNumClasses; ++k) {
    if (report.per_class_mean_mse[k] < report.per_class_mean_mse[best]) best = k;
  }
  report.predicted = class_from_index(best);
  return report;
}

}  // namespace

std::size_t hamming_distance(const ActivationPattern& a, const ActivationPattern& b) {
  check_shape(a.n_channels(), a.n_segments(), b.n_channels(), b.n_segments());
  return static_cast<std::size_t>((a.values.array() != b.values.array()).count());
}

double pattern_mse(const ActivationPattern& a, const ActivationPattern& b) {
  check_shape(a.n_channels(), a.n_segments(), b.n_channels(), b.n_segments());
  if (a.values.size() == 0) return 0.0;
  const Eigen::ArrayXXd diff =
      a.values.cast<double>().array() - b.values.cast<double>().array();
  // Sum of squares of 0/1 differences is an exact integer, so this equals
  // hamming / n correctly rounded.
  return diff.square().sum() / static_cast<double>(a.values.size());
}

double pattern_mse(const Eigen::MatrixXd& soft, const ActivationPattern& b) {
  check_shape(soft.rows(), soft.cols(), b.n_channels(), b.n_segments());
  if (soft.size() == 0) return 0.0;
  return (soft.array() - b.values.cast<double>().array()).square().sum() /
         static_cast<double>(soft.size());
}

MatchReport classify_pattern(const ActivationPattern& estimated, const PatternLibrary& library,
                             Aggregation aggregation) {
  auto report = match(estimated.n_channels(), estimated.n_segments(), library, aggregation,
                      [&](const ActivationPattern& p) { return pattern_mse(estimated, p); });
  report.trial_id = estimated.trial_id;
  return report;
}

MatchReport classify_soft_pattern(const Eigen::MatrixXd& soft, const PatternLibrary& library,
                                  Aggregation aggregation) {
  return match(soft.rows(), soft.cols(), library, aggregation,
               [&](const ActivationPattern& p) { return pattern_mse(soft, p); });
}

MatchReport classify_trial(const PipelineModel& model, const Trial& trial,
                           const MatchOptions& options) {
  if (options.soft_scores) {
    const Eigen::MatrixXd scores = segment_scores(model, trial);
    const Eigen::MatrixXd soft = (1.0 / (1.0 + (-scores.array()).exp())).matrix();
    auto report = classify_soft_pattern(soft, model.library, options.aggregation);
    report.trial_id = trial.id;
    return report;
  }
  return classify_pattern(estimate_pattern(model, trial), model.library, options.aggregation);
}

}  // namespace grasp
