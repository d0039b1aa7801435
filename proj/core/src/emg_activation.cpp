#include "grasp/emg_activation.hpp"

#include "grasp/errors.hpp"
#include "grasp/filter.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numeric>

namespace grasp {

void ThresholdPolicy::validate() const {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    fail(ErrorKind::InvalidConfig, fmt::format("threshold scale must be positive, got {}", scale));
  }
}

double rms(std::span<const double> segment) {
  if (segment.empty()) fail(ErrorKind::EmptySegment, "RMS of an empty segment");
  double sum_sq = 0.0;
  for (double v : segment) sum_sq += v * v;
  return std::sqrt(sum_sq / static_cast<double>(segment.size()));
}

std::vector<double> segment_rms(std::span<const double> channel, double sample_rate_hz,
                                const WindowSpec& window) {
  if (channel.empty()) fail(ErrorKind::EmptySegment, "empty EMG channel");
  const auto layout =
      segment_layout(window, sample_rate_hz, static_cast<Eigen::Index>(channel.size()));
  if (layout.count == 0) fail(ErrorKind::EmptySegment, "window produces no segments");
  std::vector<double> out(layout.count);
  for (std::size_t i = 0; i < layout.count; ++i) {
    out[i] = rms(channel.subspan(static_cast<std::size_t>(layout.start(i)),
                                 static_cast<std::size_t>(layout.window_samples)));
  }
  return out;
}

namespace {

double threshold_from(const std::vector<double>& rms_values, const ThresholdPolicy& policy) {
  const double mean =
      std::accumulate(rms_values.begin(), rms_values.end(), 0.0) / static_cast<double>(rms_values.size());
  return policy.scale * mean;
}

}  // namespace

double trial_threshold(std::span<const double> channel, double sample_rate_hz,
                       const WindowSpec& window, const ThresholdPolicy& policy) {
  policy.validate();
  return threshold_from(segment_rms(channel, sample_rate_hz, window), policy);
}

std::vector<std::uint8_t> binarize_channel(std::span<const double> channel, double sample_rate_hz,
                                           const WindowSpec& window, const ThresholdPolicy& policy) {
  policy.validate();
  const auto values = segment_rms(channel, sample_rate_hz, window);
  const double threshold = threshold_from(values, policy);
  std::vector<std::uint8_t> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i] > threshold ? 1 : 0;
  return out;
}

ActivationPattern build_pattern(const Trial& trial, const WindowSpec& window,
                                const ThresholdPolicy& policy,
                                const EmgPreprocessing& preprocessing, std::size_t n_channels) {
  if (!trial.emg) fail(ErrorKind::MissingEMG, fmt::format("trial {} has no EMG", trial.id));
  if (static_cast<std::size_t>(trial.emg->n_channels()) != n_channels) {
    fail(ErrorKind::ChannelCountMismatch,
         fmt::format("trial {}: expected {} EMG channels, got {}", trial.id, n_channels,
                     trial.emg->n_channels()));
  }
  SignalEpoch emg = *trial.emg;
  if (preprocessing.notch_hz) emg = notch_filter(emg, *preprocessing.notch_hz);
  if (preprocessing.highpass_hz) emg = highpass_filter(emg, *preprocessing.highpass_hz);

  const auto& samples = emg.samples();
  const auto n = static_cast<std::size_t>(samples.cols());
  ActivationPattern pattern;
  pattern.trial_id = trial.id;
  pattern.class_label = trial.class_label;
  for (Eigen::Index c = 0; c < samples.rows(); ++c) {
    const auto row = binarize_channel(std::span<const double>(samples.row(c).data(), n),
                                      emg.sample_rate_hz(), window, policy);
    if (c == 0) pattern.values.resize(samples.rows(), static_cast<Eigen::Index>(row.size()));
    for (std::size_t t = 0; t < row.size(); ++t) {
      pattern.values(c, static_cast<Eigen::Index>(t)) = row[t];
    }
  }
  return pattern;
}

PatternLibrary::PatternLibrary(WindowSpec window, std::size_t n_channels, std::size_t n_segments)
    : window_(window), n_channels_(n_channels), n_segments_(n_segments) {}

void PatternLibrary::add(ActivationPattern pattern) {
  if (!pattern.class_label) {
    fail(ErrorKind::UnlabeledTrial,
         fmt::format("pattern for trial {} has no class label", pattern.trial_id));
  }
  if (static_cast<std::size_t>(pattern.n_channels()) != n_channels_ ||
      static_cast<std::size_t>(pattern.n_segments()) != n_segments_) {
    fail(ErrorKind::DimensionMismatch,
         fmt::format("pattern {}x{} does not match library {}x{}", pattern.n_channels(),
                     pattern.n_segments(), n_channels_, n_segments_));
  }
  by_class_[class_index(*pattern.class_label)].push_back(std::move(pattern));
}

std::size_t PatternLibrary::size() const noexcept {
  std::size_t total = 0;
  for (const auto& v : by_class_) total += v.size();
  return total;
}

std::vector<std::string> PatternLibrary::trial_ids() const {
  std::vector<std::string> ids;
  ids.reserve(size());
  for (const auto& v : by_class_) {
    for (const auto& p : v) ids.push_back(p.trial_id);
  }
  return ids;
}

PatternLibrary build_library(std::span<const Trial> trials, const WindowSpec& window,
                             const ThresholdPolicy& policy, const EmgPreprocessing& preprocessing,
                             std::size_t n_channels) {
  std::vector<ActivationPattern> patterns;
  patterns.reserve(trials.size());
  for (const auto& trial : trials) {
    if (!trial.class_label) {
      fail(ErrorKind::UnlabeledTrial, fmt::format("trial {} has no class label", trial.id));
    }
    if (trial.paradigm != Paradigm::ActualMovement) {
      fail(ErrorKind::WrongParadigm,
           fmt::format("trial {} is not an actual-movement trial", trial.id));
    }
    patterns.push_back(build_pattern(trial, window, policy, preprocessing, n_channels));
  }
  const std::size_t n_segments = patterns.empty()
                                     ? window.expected_segments
                                     : static_cast<std::size_t>(patterns.front().n_segments());
  PatternLibrary library(window, n_channels, n_segments);
  for (auto& p : patterns) library.add(std::move(p));
  return library;
}

}  // namespace grasp
