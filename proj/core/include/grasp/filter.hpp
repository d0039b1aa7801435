#pragma once

#include "grasp/signal.hpp"

#include <array>
#include <complex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace grasp {

/// One second-order section, a[0] == 1.
struct Biquad {
  std::array<double, 3> b{};
  std::array<double, 3> a{1.0, 0.0, 0.0};

  friend bool operator==(const Biquad&, const Biquad&) = default;
};

/// Cascade of second-order sections. Applied forward-backward for zero phase.
struct FilterCoefficients {
  std::vector<Biquad> sections;

  std::complex<double> response(double freq_hz, double sample_rate_hz) const;
  double magnitude(double freq_hz, double sample_rate_hz) const {
    return std::abs(response(freq_hz, sample_rate_hz));
  }
  /// Roots of every section denominator.
  std::vector<std::complex<double>> poles() const;

  friend bool operator==(const FilterCoefficients&, const FilterCoefficients&) = default;
};

/// Butterworth band-pass; `order` is the low-pass prototype order, so the
/// cascade has `order` sections.
FilterCoefficients design_bandpass(double band_low_hz, double band_high_hz, int order,
                                   double sample_rate_hz);

FilterCoefficients design_highpass(double cutoff_hz, int order, double sample_rate_hz);

/// Second-order IIR notch with quality factor `quality` (center / bandwidth).
FilterCoefficients design_notch(double notch_hz, double quality, double sample_rate_hz);

/// Single causal pass with zero initial state.
std::vector<double> filter_causal(const FilterCoefficients& filter, std::span<const double> x);

/// Forward-backward filtering with odd-reflection padding and steady-state
/// initial conditions. Output has the input's length and zero phase.
std::vector<double> filtfilt(const FilterCoefficients& filter, std::span<const double> x);

/// Padding length used by filtfilt for a signal of `n_samples`.
std::size_t filtfilt_pad_length(const FilterCoefficients& filter, std::size_t n_samples);

/// Row-wise filtfilt over an epoch.
SignalEpoch filtfilt(const FilterCoefficients& filter, const SignalEpoch& epoch);

inline constexpr double kDefaultNotchQuality = 30.0;

SignalEpoch notch_filter(const SignalEpoch& epoch, double notch_hz,
                         double quality = kDefaultNotchQuality);

SignalEpoch highpass_filter(const SignalEpoch& epoch, double cutoff_hz, int order = 4);

struct Band {
  double low_hz = 0.0;
  double high_hz = 0.0;

  double center_hz() const noexcept { return 0.5 * (low_hz + high_hz); }
  friend bool operator==(const Band&, const Band&) = default;
};

struct FilterBankSpec {
  double low_hz = 4.0;
  double high_hz = 40.0;
  double band_width_hz = 4.0;
  double band_step_hz = 2.0;
  int filter_order = 4;
  std::optional<double> notch_hz;

  /// Bands [low + k*step, low + k*step + width] while the upper edge <= high.
  std::vector<Band> bands() const;
  std::size_t band_count() const { return bands().size(); }

  /// Throws InvalidBand when the plan does not fit below Nyquist.
  void validate(double sample_rate_hz) const;

  friend bool operator==(const FilterBankSpec&, const FilterBankSpec&) = default;
};

/// 4-40 Hz, 4 Hz bands stepped by 2 Hz (17 bands).
FilterBankSpec default_filter_bank();
/// 4-40 Hz, 4 Hz bands stepped by 3.2 Hz (11 bands).
FilterBankSpec eleven_band_filter_bank();
/// Single 4-40 Hz band.
FilterBankSpec broadband_filter_bank();

/// Names: "default" or "4-40-w4-s2", "bands=11", "broadband"; also "low,high,width,step".
std::optional<FilterBankSpec> parse_filter_bank(std::string_view text);
std::string describe_filter_bank(const FilterBankSpec& spec);

/// One output epoch per band, each with the input's shape and channel names.
std::vector<SignalEpoch> apply_filter_bank(const SignalEpoch& epoch, const FilterBankSpec& spec);

/// Same as apply_filter_bank but returns raw matrices, skipping epoch
/// revalidation. Used on hot paths.
std::vector<SampleMatrix> filter_bank_matrices(const SampleMatrix& samples, double sample_rate_hz,
                                               const FilterBankSpec& spec);

}  // namespace grasp
