#include "grasp/synth.hpp"

#include "grasp/errors.hpp"
#include "grasp/filter.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <random>

namespace grasp {
namespace {

constexpr double kRhythmLowHz = 8.0;
constexpr double kRhythmHighHz = 30.0;
constexpr double kBackgroundPole = 0.95;
constexpr double kBackgroundWhite = 0.5;
constexpr std::array<double, kNumClasses> kSpectralCentersHz = {10.0, 18.0, 26.0};
constexpr double kSpectralHalfWidthHz = 2.0;
constexpr std::array<double, 3> kMixWeights = {1.0, 0.7, 0.5};

std::vector<double> white_noise(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> out(n);
  for (auto& v : out) v = normal(rng);
  return out;
}

void normalize_variance(std::vector<double>& x) {
  double sum_sq = 0.0;
  for (double v : x) sum_sq += v * v;
  const double rms_value = std::sqrt(sum_sq / static_cast<double>(x.size()));
  if (rms_value > 0.0) {
    for (auto& v : x) v /= rms_value;
  }
}

std::vector<double> band_noise(std::mt19937_64& rng, std::size_t n, const FilterCoefficients& filter) {
  auto x = filtfilt(filter, white_noise(rng, n));
  normalize_variance(x);
  return x;
}

/// 0/1 activity of a channel at each sample.
std::vector<double> activity(const std::vector<Interval>& intervals, std::size_t n, double fs) {
  std::vector<double> out(n, 0.0);
  for (const auto& iv : intervals) {
    const auto first = static_cast<std::size_t>(std::max(0.0, std::ceil(iv.start_ms * fs / 1000.0)));
    const auto last = static_cast<std::size_t>(std::max(0.0, std::ceil(iv.end_ms * fs / 1000.0)));
    for (std::size_t i = first; i < std::min(last, n); ++i) out[i] = 1.0;
  }
  return out;
}

}  // namespace

std::string_view to_string(ClassCoding coding) noexcept {
  switch (coding) {
    case ClassCoding::Temporal: return "temporal";
    case ClassCoding::Spatial: return "spatial";
    case ClassCoding::Spectral: return "spectral";
  }
  return "unknown";
}

std::optional<ClassCoding> parse_class_coding(std::string_view text) noexcept {
  for (auto c : {ClassCoding::Temporal, ClassCoding::Spatial, ClassCoding::Spectral}) {
    if (text == to_string(c)) return c;
  }
  return std::nullopt;
}

void ActivationSchedule::validate(double duration_ms) const {
  for (std::size_t c = 0; c < per_channel_intervals.size(); ++c) {
    double previous_end = 0.0;
    for (const auto& iv : per_channel_intervals[c]) {
      if (!(iv.start_ms >= 0.0 && iv.start_ms < iv.end_ms && iv.end_ms <= duration_ms)) {
        fail(ErrorKind::InvalidConfig,
             fmt::format("channel {}: interval [{}, {}) outside [0, {})", c, iv.start_ms,
                         iv.end_ms, duration_ms));
      }
      if (iv.start_ms < previous_end) {
        fail(ErrorKind::InvalidConfig,
             fmt::format("channel {}: intervals overlap or are unsorted at {} ms", c, iv.start_ms));
      }
      previous_end = iv.end_ms;
    }
  }
}

void SynthConfig::validate() const {
  if (n_trials_per_class < 1 || eeg_channels < 4 || emg_channels < 1) {
    fail(ErrorKind::InvalidConfig,
         fmt::format("need >= 1 trial per class, >= 4 EEG and >= 1 EMG channels (got {}, {}, {})",
                     n_trials_per_class, eeg_channels, emg_channels));
  }
  if (!(sample_rate_hz >= 100.0)) {
    fail(ErrorKind::InvalidConfig,
         fmt::format("sample rate must be >= 100 Hz for the 4-40 Hz plan, got {}", sample_rate_hz));
  }
  if (!(duration_ms > 0.0) || !(jitter_ms >= 0.0) || !(emg_burst_ratio > 0.0) ||
      !(coupling_gain >= 0.0) || !(imagery_coupling_factor >= 0.0) || !(class_gain >= 0.0) ||
      !std::isfinite(snr_db)) {
    fail(ErrorKind::InvalidConfig, "synthetic signal parameters out of range");
  }
}

std::array<ActivationSchedule, kNumClasses> default_schedules(std::size_t n_channels) {
  // Three 1000 ms slots; each class assigns every muscle a different slot.
  constexpr std::array<Interval, 3> slots = {
      Interval{300.0, 1300.0}, Interval{1500.0, 2500.0}, Interval{2700.0, 3700.0}};
  constexpr std::array<std::array<int, 6>, kNumClasses> slot_of = {{
      {0, 1, 2, 0, 1, 2},
      {1, 2, 0, 2, 0, 1},
      {2, 0, 1, 1, 2, 0},
  }};
  std::array<ActivationSchedule, kNumClasses> out;
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    out[k].class_label = class_from_index(k);
    out[k].per_channel_intervals.resize(n_channels);
    for (std::size_t c = 0; c < n_channels; ++c) {
      out[k].per_channel_intervals[c] = {slots[static_cast<std::size_t>(slot_of[k][c % 6])]};
    }
  }
  return out;
}

BinaryMatrix overlap_mask(const ActivationSchedule& schedule, const WindowSpec& window,
                          double duration_ms) {
  const auto n_segments = window.segment_count(duration_ms);
  BinaryMatrix mask = BinaryMatrix::Zero(
      static_cast<Eigen::Index>(schedule.per_channel_intervals.size()),
      static_cast<Eigen::Index>(n_segments));
  for (std::size_t c = 0; c < schedule.per_channel_intervals.size(); ++c) {
    for (std::size_t t = 0; t < n_segments; ++t) {
      const double begin = static_cast<double>(t) * window.step_ms;
      const double end = begin + window.window_ms;
      for (const auto& iv : schedule.per_channel_intervals[c]) {
        if (iv.start_ms < end && iv.end_ms > begin) {
          mask(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(t)) = 1;
        }
      }
    }
  }
  return mask;
}

BinaryMatrix expected_pattern(const ActivationSchedule& schedule, const WindowSpec& window,
                              double burst_ratio, double duration_ms) {
  const auto n_segments = window.segment_count(duration_ms);
  BinaryMatrix mask = BinaryMatrix::Zero(
      static_cast<Eigen::Index>(schedule.per_channel_intervals.size()),
      static_cast<Eigen::Index>(n_segments));
  if (n_segments == 0) return mask;
  const double r2 = burst_ratio * burst_ratio;
  std::vector<double> expected(n_segments);
  for (std::size_t c = 0; c < schedule.per_channel_intervals.size(); ++c) {
    double mean = 0.0;
    for (std::size_t t = 0; t < n_segments; ++t) {
      const double begin = static_cast<double>(t) * window.step_ms;
      const double end = begin + window.window_ms;
      double active = 0.0;
      for (const auto& iv : schedule.per_channel_intervals[c]) {
        active += std::max(0.0, std::min(end, iv.end_ms) - std::max(begin, iv.start_ms));
      }
      const double frac = active / window.window_ms;
      expected[t] = std::sqrt(frac * r2 + (1.0 - frac));
      mean += expected[t];
    }
    mean /= static_cast<double>(n_segments);
    for (std::size_t t = 0; t < n_segments; ++t) {
      mask(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(t)) = expected[t] > mean ? 1 : 0;
    }
  }
  return mask;
}

ActivationSchedule jitter_schedule(const ActivationSchedule& schedule, double jitter_ms,
                                   double duration_ms, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> offset(-jitter_ms, jitter_ms);
  ActivationSchedule out = schedule;
  for (auto& channel : out.per_channel_intervals) {
    double previous_end = 0.0;
    for (auto& iv : channel) {
      const double shift = jitter_ms > 0.0 ? offset(rng) : 0.0;
      const double length = iv.end_ms - iv.start_ms;
      iv.start_ms = std::clamp(iv.start_ms + shift, previous_end, duration_ms - length);
      iv.end_ms = iv.start_ms + length;
      previous_end = iv.end_ms;
    }
  }
  return out;
}

std::vector<std::pair<std::size_t, double>> muscle_channel_map(std::size_t muscle,
                                                               std::size_t eeg_channels) {
  std::vector<std::pair<std::size_t, double>> out;
  for (std::size_t j = 0; j < kMixWeights.size(); ++j) {
    out.emplace_back((muscle + 6 * j) % eeg_channels, kMixWeights[j]);
  }
  return out;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  // splitmix64 finalizer over the combined value
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Trial generate_trial(const ActivationSchedule& schedule, const SynthConfig& config,
                     Paradigm paradigm, std::uint64_t trial_seed, std::string trial_id) {
  config.validate();
  schedule.validate(config.duration_ms);
  if (schedule.per_channel_intervals.size() != config.emg_channels) {
    fail(ErrorKind::InvalidConfig,
         fmt::format("schedule has {} channels, config expects {}",
                     schedule.per_channel_intervals.size(), config.emg_channels));
  }
  const double fs = config.sample_rate_hz;
  const auto n = static_cast<std::size_t>(std::llround(config.duration_ms * fs / 1000.0));
  const auto n_eeg = config.eeg_channels;
  std::mt19937_64 rng(trial_seed);

  const bool imagery = paradigm == Paradigm::MotorImagery;
  const double coupling_scale = imagery ? config.imagery_coupling_factor : 1.0;
  const double gain = config.coupling_gain * coupling_scale;
  const double rhythm_amp = std::pow(10.0, config.snr_db / 20.0);

  SampleMatrix eeg(static_cast<Eigen::Index>(n_eeg), static_cast<Eigen::Index>(n));
  // Background: AR(1) drift plus white noise, unit variance before mixing.
  for (std::size_t c = 0; c < n_eeg; ++c) {
    auto w = white_noise(rng, n);
    auto white = white_noise(rng, n);
    double state = 0.0;
    const double drive = std::sqrt(1.0 - kBackgroundPole * kBackgroundPole);
    for (std::size_t i = 0; i < n; ++i) {
      state = kBackgroundPole * state + drive * w[i];
      eeg(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(i)) =
          state + kBackgroundWhite * white[i];
    }
  }

  const auto rhythm_filter = design_bandpass(kRhythmLowHz, kRhythmHighHz, 4, fs);
  for (std::size_t m = 0; m < config.emg_channels; ++m) {
    const auto rhythm = band_noise(rng, n, rhythm_filter);
    const auto active = activity(schedule.per_channel_intervals[m], n, fs);
    for (const auto& [channel, weight] : muscle_channel_map(m, n_eeg)) {
      auto row = eeg.row(static_cast<Eigen::Index>(channel));
      for (std::size_t i = 0; i < n; ++i) {
        row[static_cast<Eigen::Index>(i)] += rhythm_amp * weight * (1.0 + gain * active[i]) * rhythm[i];
      }
    }
  }

  if (config.coding != ClassCoding::Temporal) {
    const auto k = class_index(schedule.class_label);
    const double amp = rhythm_amp * config.class_gain * coupling_scale;
    if (config.coding == ClassCoding::Spatial) {
      const auto rhythm = band_noise(rng, n, rhythm_filter);
      for (std::size_t j : {2 * n_eeg - 1 - k, 2 * n_eeg - 4 - k}) {
        eeg.row(static_cast<Eigen::Index>(j % n_eeg)) +=
            amp * Eigen::Map<const Eigen::RowVectorXd>(rhythm.data(), static_cast<Eigen::Index>(n));
      }
    } else if (config.coding == ClassCoding::Spectral) {
      const double center = kSpectralCentersHz[k];
      const auto filter =
          design_bandpass(center - kSpectralHalfWidthHz, center + kSpectralHalfWidthHz, 4, fs);
      const auto rhythm = band_noise(rng, n, filter);
      for (std::size_t j = 1; j <= 3; ++j) {
        eeg.row(static_cast<Eigen::Index>(n_eeg - j)) +=
            amp * Eigen::Map<const Eigen::RowVectorXd>(rhythm.data(), static_cast<Eigen::Index>(n));
      }
    }
  }
  eeg = eeg.cast<float>().cast<double>();

  Trial trial{
      std::move(trial_id),
      SignalEpoch(std::move(eeg), fs,
                  channel_names_or_generic(default_eeg_channel_names(), n_eeg, "EEG")),
      std::nullopt,
      paradigm,
      schedule.class_label,
  };

  if (!imagery) {
    std::normal_distribution<double> normal(0.0, 1.0);
    SampleMatrix emg(static_cast<Eigen::Index>(config.emg_channels), static_cast<Eigen::Index>(n));
    for (std::size_t m = 0; m < config.emg_channels; ++m) {
      const auto active = activity(schedule.per_channel_intervals[m], n, fs);
      for (std::size_t i = 0; i < n; ++i) {
        const double sd = active[i] > 0.0 ? config.emg_burst_ratio : 1.0;
        emg(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(i)) = sd * normal(rng);
      }
    }
    emg = emg.cast<float>().cast<double>();
    trial.emg = SignalEpoch(std::move(emg), fs,
                            channel_names_or_generic(default_emg_channel_names(),
                                                     config.emg_channels, "EMG"));
  }
  return trial;
}

std::vector<SyntheticTrial> generate_dataset_with_schedules(const SynthConfig& config) {
  config.validate();
  const auto schedules = default_schedules(config.emg_channels);
  std::vector<SyntheticTrial> out;
  out.reserve(2 * kNumClasses * config.n_trials_per_class);
  for (auto paradigm : {Paradigm::ActualMovement, Paradigm::MotorImagery}) {
    const std::uint64_t paradigm_stream = paradigm == Paradigm::ActualMovement ? 0 : 1;
    for (std::size_t i = 0; i < config.n_trials_per_class; ++i) {
      for (auto c : kAllClasses) {
        const std::uint64_t stream =
            (paradigm_stream * config.n_trials_per_class + i) * kNumClasses + class_index(c);
        const auto seed = derive_seed(config.rng_seed, stream);
        auto schedule = jitter_schedule(schedules[class_index(c)], config.jitter_ms,
                                        config.duration_ms, derive_seed(seed, 0));
        auto id = fmt::format("{}-{}-{:03}", paradigm == Paradigm::ActualMovement ? "mov" : "mi",
                              to_string(c), i);
        auto trial = generate_trial(schedule, config, paradigm, derive_seed(seed, 1), std::move(id));
        out.push_back(SyntheticTrial{std::move(trial), std::move(schedule)});
      }
    }
  }
  return out;
}

std::vector<Trial> generate_dataset(const SynthConfig& config) {
  auto with_schedules = generate_dataset_with_schedules(config);
  std::vector<Trial> out;
  out.reserve(with_schedules.size());
  for (auto& s : with_schedules) out.push_back(std::move(s.trial));
  return out;
}

}  // namespace grasp
