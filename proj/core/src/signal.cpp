#include "grasp/signal.hpp"

#include "grasp/errors.hpp"

#include <fmt/format.h>

#include <cmath>

namespace grasp {

SignalEpoch::SignalEpoch(SampleMatrix samples, double sample_rate_hz,
                         std::vector<std::string> channel_names, double t0_ms)
    : samples_(std::move(samples)),
      sample_rate_hz_(sample_rate_hz),
      channel_names_(std::move(channel_names)),
      t0_ms_(t0_ms) {
  if (samples_.rows() < 1 || samples_.cols() < 1) {
    fail(ErrorKind::InvalidSignal,
         fmt::format("epoch must have at least one channel and sample, got {}x{}",
                     samples_.rows(), samples_.cols()));
  }
  if (!(sample_rate_hz_ > 0.0) || !std::isfinite(sample_rate_hz_)) {
    fail(ErrorKind::InvalidSignal, fmt::format("sample rate must be positive, got {}", sample_rate_hz_));
  }
  if (static_cast<Eigen::Index>(channel_names_.size()) != samples_.rows()) {
    fail(ErrorKind::InvalidSignal,
         fmt::format("{} channel names for {} channels", channel_names_.size(), samples_.rows()));
  }
  if (!samples_.allFinite()) {
    fail(ErrorKind::InvalidSignal, "epoch contains non-finite samples");
  }
}

SignalEpoch SignalEpoch::with_samples(SampleMatrix samples) const {
  if (samples.rows() != samples_.rows() || samples.cols() != samples_.cols()) {
    fail(ErrorKind::DimensionMismatch, "replacement samples must keep the epoch shape");
  }
  return SignalEpoch(std::move(samples), sample_rate_hz_, channel_names_, t0_ms_);
}

std::vector<std::string> default_eeg_channel_names() {
  return {"FC1", "FC2", "FC3", "FC4", "FC5", "FC6", "C1",  "C2",  "C3",  "C4",
          "C5",  "C6",  "Cz",  "CP1", "CP2", "CP3", "CP4", "CP5", "CP6", "CPz"};
}

std::vector<std::string> default_emg_channel_names() {
  return {"ECU", "ED", "FCR", "FCU", "BB", "TB"};
}

std::vector<std::string> channel_names_or_generic(const std::vector<std::string>& preset,
                                                  std::size_t n, std::string_view prefix) {
  std::vector<std::string> names;
  names.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    names.push_back(i < preset.size() ? preset[i] : fmt::format("{}{}", prefix, i + 1));
  }
  return names;
}

void validate_trial(const Trial& trial) {
  if (!trial.emg) return;
  const double half_period_ms = 500.0 / trial.eeg.sample_rate_hz();
  if (std::abs(trial.emg->duration_ms() - trial.eeg.duration_ms()) > half_period_ms) {
    fail(ErrorKind::DimensionMismatch,
         fmt::format("trial {}: EEG lasts {} ms but EMG lasts {} ms", trial.id,
                     trial.eeg.duration_ms(), trial.emg->duration_ms()));
  }
}

}  // namespace grasp
