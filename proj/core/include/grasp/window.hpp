#pragma once

#include "grasp/signal.hpp"

#include <cstddef>
#include <vector>

namespace grasp {

/// Sliding window over a trial. The pipeline requires window_ms in
/// [500, 2000] (see validate_for_pipeline); plain segmentation only needs
/// the window to fit inside the epoch.
struct WindowSpec {
  double window_ms = 1100.0;
  double step_ms = 100.0;
  std::size_t expected_segments = 30;

  /// floor((duration - window) / step) + 1, or 0 if the window does not fit.
  std::size_t segment_count(double duration_ms) const;

  /// Window range, positive step, and the expected count for 4000 ms trials.
  void validate_for_pipeline() const;

  friend bool operator==(const WindowSpec&, const WindowSpec&) = default;
};

/// Sample-index layout of the segments for one sampling rate.
struct SegmentLayout {
  std::size_t count = 0;
  Eigen::Index window_samples = 0;
  Eigen::Index step_samples = 0;

  Eigen::Index start(std::size_t i) const noexcept {
    return static_cast<Eigen::Index>(i) * step_samples;
  }
};

/// Throws WindowTooLong if the window exceeds the epoch, InvalidWindow for
/// non-positive sizes.
SegmentLayout segment_layout(const WindowSpec& window, double sample_rate_hz,
                             Eigen::Index n_samples);

/// Segment i covers [i*step, i*step + window) ms, in temporal order.
std::vector<SignalEpoch> segment(const SignalEpoch& epoch, const WindowSpec& window);

}  // namespace grasp
