#pragma once

#include "grasp/types.hpp"

#include <Eigen/Core>

#include <optional>
#include <string>
#include <vector>

namespace grasp {

/// Channels are rows, samples are columns.
using SampleMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// A multichannel epoch at a fixed sampling rate. Validated on construction,
/// immutable afterwards.
class SignalEpoch {
 public:
  SignalEpoch(SampleMatrix samples, double sample_rate_hz,
              std::vector<std::string> channel_names, double t0_ms = 0.0);

  const SampleMatrix& samples() const noexcept { return samples_; }
  double sample_rate_hz() const noexcept { return sample_rate_hz_; }
  const std::vector<std::string>& channel_names() const noexcept { return channel_names_; }
  double t0_ms() const noexcept { return t0_ms_; }

  Eigen::Index n_channels() const noexcept { return samples_.rows(); }
  Eigen::Index n_samples() const noexcept { return samples_.cols(); }
  double duration_ms() const noexcept {
    return static_cast<double>(n_samples()) / sample_rate_hz_ * 1000.0;
  }

  /// Same metadata, new sample values of identical shape.
  SignalEpoch with_samples(SampleMatrix samples) const;

  friend bool operator==(const SignalEpoch&, const SignalEpoch&) = default;

 private:
  SampleMatrix samples_;
  double sample_rate_hz_;
  std::vector<std::string> channel_names_;
  double t0_ms_;
};

/// Default channel name lists for the 20-electrode motor-strip montage and
/// the six recorded forearm/upper-arm muscles.
std::vector<std::string> default_eeg_channel_names();
std::vector<std::string> default_emg_channel_names();
/// First `n` default names, padded with generic names when n exceeds the preset.
std::vector<std::string> channel_names_or_generic(const std::vector<std::string>& preset,
                                                  std::size_t n, std::string_view prefix);

inline constexpr double kDefaultTrialDurationMs = 4000.0;

struct Trial {
  std::string id;
  SignalEpoch eeg;
  std::optional<SignalEpoch> emg;
  Paradigm paradigm = Paradigm::ActualMovement;
  std::optional<GraspClass> class_label;

  double duration_ms() const noexcept { return eeg.duration_ms(); }

  friend bool operator==(const Trial&, const Trial&) = default;
};

/// Checks the duration agreement between the contained epochs.
void validate_trial(const Trial& trial);

}  // namespace grasp
