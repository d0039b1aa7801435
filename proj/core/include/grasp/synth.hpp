#pragma once

#include "grasp/emg_activation.hpp"
#include "grasp/signal.hpp"
#include "grasp/window.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace grasp {

struct Interval {
  double start_ms = 0.0;
  double end_ms = 0.0;

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Scripted muscle activity for one grasp: active intervals per EMG channel.
struct ActivationSchedule {
  std::vector<std::vector<Interval>> per_channel_intervals;
  GraspClass class_label = GraspClass::Lateral;

  /// Intervals inside [0, duration), start < end, sorted and non-overlapping.
  void validate(double duration_ms = kDefaultTrialDurationMs) const;

  friend bool operator==(const ActivationSchedule&, const ActivationSchedule&) = default;
};

/// How class identity shows up in the EEG beyond the muscle timing.
enum class ClassCoding {
  Temporal,  // only through muscle-activation timing; equal total power per class
  Spatial,   // plus a class-specific channel group with raised rhythm power
  Spectral,  // plus a class-specific rhythm frequency on a shared channel group
};

std::string_view to_string(ClassCoding coding) noexcept;
std::optional<ClassCoding> parse_class_coding(std::string_view text) noexcept;

struct SynthConfig {
  std::size_t n_trials_per_class = 50;
  std::size_t eeg_channels = 20;
  std::size_t emg_channels = kDefaultMuscleChannels;
  double sample_rate_hz = 250.0;
  /// Rest-state rhythm power over background power, in dB.
  double snr_db = -15.0;
  /// Relative rhythm amplitude increase while the associated muscle is active.
  double coupling_gain = 1.0;
  std::uint64_t rng_seed = 1;

  double duration_ms = kDefaultTrialDurationMs;
  double jitter_ms = 100.0;
  /// EMG burst standard deviation over baseline standard deviation.
  double emg_burst_ratio = 10.0;
  /// Coupling multiplier for motor-imagery trials.
  double imagery_coupling_factor = 0.5;
  ClassCoding coding = ClassCoding::Temporal;
  /// Amplitude of the class-specific component for Spatial/Spectral coding.
  double class_gain = 1.0;

  void validate() const;

  friend bool operator==(const SynthConfig&, const SynthConfig&) = default;
};

/// Three schedules in which every muscle is active for 1000 ms per trial,
/// at a class-dependent time.
std::array<ActivationSchedule, kNumClasses> default_schedules(
    std::size_t n_channels = kDefaultMuscleChannels);

/// Entry (c, t) = 1 iff segment t overlaps any active interval of channel c.
BinaryMatrix overlap_mask(const ActivationSchedule& schedule, const WindowSpec& window,
                          double duration_ms = kDefaultTrialDurationMs);

/// Pattern that RMS thresholding recovers from noise-free EMG with bursts of
/// `burst_ratio` times the baseline amplitude: entry (c, t) = 1 iff the
/// expected RMS of segment t exceeds the channel's mean expected RMS.
BinaryMatrix expected_pattern(const ActivationSchedule& schedule, const WindowSpec& window,
                              double burst_ratio, double duration_ms = kDefaultTrialDurationMs);

/// Copy of `schedule` with every interval shifted by an independent uniform
/// offset in [-jitter, +jitter], clamped into the trial.
ActivationSchedule jitter_schedule(const ActivationSchedule& schedule, double jitter_ms,
                                   double duration_ms, std::uint64_t seed);

/// EEG channels driven by muscle `muscle`, with mixing weights.
std::vector<std::pair<std::size_t, double>> muscle_channel_map(std::size_t muscle,
                                                               std::size_t eeg_channels);

/// Deterministic given (schedule, config, paradigm, trial_seed). Samples are
/// rounded to 32-bit precision. Imagery trials carry no EMG.
Trial generate_trial(const ActivationSchedule& schedule, const SynthConfig& config,
                     Paradigm paradigm, std::uint64_t trial_seed, std::string trial_id = {});

struct SyntheticTrial {
  Trial trial;
  ActivationSchedule schedule;  // after jitter
};

/// n_trials_per_class * 3 movement trials followed by as many imagery trials,
/// with the schedule actually used for each.
std::vector<SyntheticTrial> generate_dataset_with_schedules(const SynthConfig& config);

std::vector<Trial> generate_dataset(const SynthConfig& config);

/// Mixes a seed with a stream index; used to derive per-trial seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

}  // namespace grasp
