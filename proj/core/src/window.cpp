#include "grasp/window.hpp"

#include "grasp/errors.hpp"

#include <fmt/format.h>

#include <cmath>

namespace grasp {
namespace {
constexpr double kMsTolerance = 1e-9;
}

std::size_t WindowSpec::segment_count(double duration_ms) const {
  if (!(step_ms > 0.0) || !(window_ms > 0.0) || window_ms > duration_ms + kMsTolerance) return 0;
  return static_cast<std::size_t>(std::floor((duration_ms - window_ms) / step_ms + kMsTolerance)) + 1;
}

void WindowSpec::validate_for_pipeline() const {
  if (!(window_ms >= 500.0 && window_ms <= 2000.0)) {
    fail(ErrorKind::InvalidWindow,
         fmt::format("window {} ms outside the supported 500-2000 ms range", window_ms));
  }
  if (!(step_ms > 0.0)) {
    fail(ErrorKind::InvalidWindow, fmt::format("step must be positive, got {} ms", step_ms));
  }
  const auto count = segment_count(kDefaultTrialDurationMs);
  if (count != expected_segments) {
    fail(ErrorKind::InvalidWindow,
         fmt::format("window {} ms / step {} ms gives {} segments per 4000 ms trial, expected {}",
                     window_ms, step_ms, count, expected_segments));
  }
}

SegmentLayout segment_layout(const WindowSpec& window, double sample_rate_hz,
                             Eigen::Index n_samples) {
  if (!(window.window_ms > 0.0) || !(window.step_ms > 0.0)) {
    fail(ErrorKind::InvalidWindow, fmt::format("window {} ms and step {} ms must be positive",
                                               window.window_ms, window.step_ms));
  }
  const double duration_ms = static_cast<double>(n_samples) / sample_rate_hz * 1000.0;
  if (window.window_ms > duration_ms + kMsTolerance) {
    fail(ErrorKind::WindowTooLong,
         fmt::format("window {} ms exceeds epoch duration {} ms", window.window_ms, duration_ms));
  }
  SegmentLayout layout;
  layout.window_samples =
      static_cast<Eigen::Index>(std::llround(window.window_ms * sample_rate_hz / 1000.0));
  layout.step_samples =
      static_cast<Eigen::Index>(std::llround(window.step_ms * sample_rate_hz / 1000.0));
  if (layout.window_samples < 1 || layout.step_samples < 1) {
    fail(ErrorKind::InvalidWindow,
         fmt::format("window {} ms / step {} ms shorter than one sample at {} Hz",
                     window.window_ms, window.step_ms, sample_rate_hz));
  }
  layout.window_samples = std::min(layout.window_samples, n_samples);
  layout.count = window.segment_count(duration_ms);
  // Rounding to whole samples can push the last window past the end.
  while (layout.count > 0 &&
         layout.start(layout.count - 1) + layout.window_samples > n_samples) {
    --layout.count;
  }
  return layout;
}

std::vector<SignalEpoch> segment(const SignalEpoch& epoch, const WindowSpec& window) {
  const auto layout = segment_layout(window, epoch.sample_rate_hz(), epoch.n_samples());
  std::vector<SignalEpoch> out;
  out.reserve(layout.count);
  for (std::size_t i = 0; i < layout.count; ++i) {
    SampleMatrix part = epoch.samples().middleCols(layout.start(i), layout.window_samples);
    out.emplace_back(std::move(part), epoch.sample_rate_hz(), epoch.channel_names(),
                     epoch.t0_ms() + static_cast<double>(i) * window.step_ms);
  }
  return out;
}

}  // namespace grasp
