#pragma once

#include "grasp/signal.hpp"
#include "grasp/types.hpp"
#include "grasp/window.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace grasp {

using BinaryMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr std::size_t kDefaultMuscleChannels = 6;

struct ThresholdPolicy {
  enum class Source { PerTrialMeanRMS };

  double scale = 1.0;
  Source source = Source::PerTrialMeanRMS;

  void validate() const;
  friend bool operator==(const ThresholdPolicy&, const ThresholdPolicy&) = default;
};

/// Optional conditioning applied to raw EMG before RMS. Both off by default.
struct EmgPreprocessing {
  std::optional<double> notch_hz;
  std::optional<double> highpass_hz;

  friend bool operator==(const EmgPreprocessing&, const EmgPreprocessing&) = default;
};

/// Root mean square. Throws EmptySegment on empty input.
double rms(std::span<const double> segment);

/// RMS of every window position, in temporal order.
std::vector<double> segment_rms(std::span<const double> channel, double sample_rate_hz,
                                const WindowSpec& window);

/// scale * mean over segments of the segment RMS.
double trial_threshold(std::span<const double> channel, double sample_rate_hz,
                       const WindowSpec& window, const ThresholdPolicy& policy);

/// The 1 x n_segments decode image: entry t is 1 iff rms(segment t) > threshold.
std::vector<std::uint8_t> binarize_channel(std::span<const double> channel, double sample_rate_hz,
                                           const WindowSpec& window, const ThresholdPolicy& policy);

/// Binary muscles x segments image for one trial.
struct ActivationPattern {
  BinaryMatrix values;
  std::string trial_id;
  std::optional<GraspClass> class_label;

  Eigen::Index n_channels() const noexcept { return values.rows(); }
  Eigen::Index n_segments() const noexcept { return values.cols(); }
  std::size_t size() const noexcept { return static_cast<std::size_t>(values.size()); }

  friend bool operator==(const ActivationPattern&, const ActivationPattern&) = default;
};

/// Requires exactly `n_channels` muscle channels in trial.emg.
ActivationPattern build_pattern(const Trial& trial, const WindowSpec& window,
                                const ThresholdPolicy& policy,
                                const EmgPreprocessing& preprocessing = {},
                                std::size_t n_channels = kDefaultMuscleChannels);

/// EMG-derived patterns grouped by grasp class.
class PatternLibrary {
 public:
  PatternLibrary() = default;
  PatternLibrary(WindowSpec window, std::size_t n_channels, std::size_t n_segments);

  /// Throws DimensionMismatch if the pattern shape differs, UnlabeledTrial if unlabeled.
  void add(ActivationPattern pattern);

  const std::vector<ActivationPattern>& patterns(GraspClass c) const {
    return by_class_[class_index(c)];
  }
  std::size_t count(GraspClass c) const { return patterns(c).size(); }
  std::size_t size() const noexcept;
  bool empty() const noexcept { return size() == 0; }

  const WindowSpec& window() const noexcept { return window_; }
  std::size_t n_channels() const noexcept { return n_channels_; }
  std::size_t n_segments() const noexcept { return n_segments_; }

  /// Trial ids of every contained pattern, in class then insertion order.
  std::vector<std::string> trial_ids() const;

  friend bool operator==(const PatternLibrary&, const PatternLibrary&) = default;

 private:
  std::array<std::vector<ActivationPattern>, kNumClasses> by_class_;
  WindowSpec window_;
  std::size_t n_channels_ = kDefaultMuscleChannels;
  std::size_t n_segments_ = 0;
};

/// Every trial must be labeled movement data with EMG.
PatternLibrary build_library(std::span<const Trial> trials, const WindowSpec& window,
                             const ThresholdPolicy& policy,
                             const EmgPreprocessing& preprocessing = {},
                             std::size_t n_channels = kDefaultMuscleChannels);

}  // namespace grasp
