#include "grasp/filter.hpp"

#include "grasp/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>

namespace grasp {
namespace {

using Complex = std::complex<double>;

constexpr double kBandTolerance = 1e-9;

void check_band(double low_hz, double high_hz, double sample_rate_hz) {
  if (!(sample_rate_hz > 0.0) || !(low_hz > 0.0) || !(low_hz < high_hz) ||
      !(high_hz < sample_rate_hz / 2.0)) {
    fail(ErrorKind::InvalidBand,
         fmt::format("band [{}, {}] Hz invalid for sample rate {} Hz (Nyquist {})", low_hz,
                     high_hz, sample_rate_hz, sample_rate_hz / 2.0));
  }
}

std::vector<Complex> butterworth_prototype_poles(int order) {
  std::vector<Complex> poles;
  poles.reserve(static_cast<std::size_t>(order));
  for (int k = 0; k < order; ++k) {
    const double theta = std::numbers::pi * (2.0 * k + order + 1) / (2.0 * order);
    poles.push_back(std::polar(1.0, theta));
  }
  return poles;
}

Complex bilinear(Complex s, double sample_rate_hz) {
  const double k = 2.0 * sample_rate_hz;
  return (k + s) / (k - s);
}

double prewarp(double freq_hz, double sample_rate_hz) {
  return 2.0 * sample_rate_hz * std::tan(std::numbers::pi * freq_hz / sample_rate_hz);
}

/// Groups digital poles into real second-order denominators. Complex poles
/// are matched with their conjugates, real poles with each other. A single
/// leftover real pole becomes a first-order denominator.
std::vector<std::array<double, 3>> pair_poles(std::vector<Complex> poles) {
  constexpr double kImagTol = 1e-12;
  std::vector<Complex> complex_upper;
  std::vector<double> reals;
  for (const auto& p : poles) {
    if (std::abs(p.imag()) <= kImagTol * std::max(1.0, std::abs(p))) {
      reals.push_back(p.real());
    } else if (p.imag() > 0.0) {
      complex_upper.push_back(p);
    }
  }
  // Pair poles closest to the unit circle first; keeps section ordering stable.
  std::sort(complex_upper.begin(), complex_upper.end(),
            [](Complex x, Complex y) { return std::abs(x) < std::abs(y); });
  std::sort(reals.begin(), reals.end());

  std::vector<std::array<double, 3>> denominators;
  for (const auto& p : complex_upper) {
    denominators.push_back({1.0, -2.0 * p.real(), std::norm(p)});
  }
  std::size_t i = 0;
  for (; i + 1 < reals.size(); i += 2) {
    denominators.push_back({1.0, -(reals[i] + reals[i + 1]), reals[i] * reals[i + 1]});
  }
  if (i < reals.size()) {
    denominators.push_back({1.0, -reals[i], 0.0});
  }
  return denominators;
}

void check_stable(const FilterCoefficients& filter) {
  for (const auto& p : filter.poles()) {
    if (!(std::abs(p) < 1.0)) {
      fail(ErrorKind::UnstableDesign, fmt::format("pole {}+{}i on or outside unit circle",
                                                  p.real(), p.imag()));
    }
  }
}

/// Spreads an overall gain evenly across sections.
void apply_gain(FilterCoefficients& filter, double gain) {
  const double per_section = std::pow(gain, 1.0 / static_cast<double>(filter.sections.size()));
  for (auto& s : filter.sections) {
    for (auto& coef : s.b) coef *= per_section;
  }
}

/// Steady-state state vector of each section for a unit step at the input.
std::vector<std::array<double, 2>> steady_state_initial(const FilterCoefficients& filter) {
  std::vector<std::array<double, 2>> zi(filter.sections.size());
  double scale = 1.0;
  for (std::size_t i = 0; i < filter.sections.size(); ++i) {
    const auto& s = filter.sections[i];
    const double dc = (s.b[0] + s.b[1] + s.b[2]) / (s.a[0] + s.a[1] + s.a[2]);
    const double z2 = s.b[2] - s.a[2] * dc;
    const double z1 = s.b[1] - s.a[1] * dc + z2;
    zi[i] = {scale * z1, scale * z2};
    scale *= dc;
  }
  return zi;
}

/// Transposed direct form II over the cascade, in place.
void run_cascade(const FilterCoefficients& filter, std::span<double> x,
                 std::vector<std::array<double, 2>> state) {
  for (std::size_t k = 0; k < filter.sections.size(); ++k) {
    const auto& s = filter.sections[k];
    const double b0 = s.b[0], b1 = s.b[1], b2 = s.b[2];
    const double a1 = s.a[1], a2 = s.a[2];
    double z1 = state[k][0];
    double z2 = state[k][1];
    for (double& v : x) {
      const double in = v;
      const double out = b0 * in + z1;
      z1 = b1 * in - a1 * out + z2;
      z2 = b2 * in - a2 * out;
      v = out;
    }
  }
}

void filtfilt_into(const FilterCoefficients& filter, std::span<const double> x,
                   const std::vector<std::array<double, 2>>& zi, std::vector<double>& work,
                   std::span<double> out) {
  const std::size_t n = x.size();
  const std::size_t pad = filtfilt_pad_length(filter, n);
  work.resize(n + 2 * pad);
  // Odd extension: 2*x[0] - x[pad..1] and 2*x[n-1] - x[n-2..n-1-pad].
  for (std::size_t i = 0; i < pad; ++i) {
    work[i] = 2.0 * x[0] - x[pad - i];
    work[pad + n + i] = 2.0 * x[n - 1] - x[n - 2 - i];
  }
  std::copy(x.begin(), x.end(), work.begin() + static_cast<std::ptrdiff_t>(pad));

  auto scaled = [&zi](double v) {
    auto state = zi;
    for (auto& z : state) {
      z[0] *= v;
      z[1] *= v;
    }
    return state;
  };

  run_cascade(filter, work, scaled(work.front()));
  std::reverse(work.begin(), work.end());
  run_cascade(filter, work, scaled(work.front()));
  std::reverse(work.begin(), work.end());
  std::copy_n(work.begin() + static_cast<std::ptrdiff_t>(pad), n, out.begin());
}

}  // namespace

std::complex<double> FilterCoefficients::response(double freq_hz, double sample_rate_hz) const {
  const Complex z_inv = std::polar(1.0, -2.0 * std::numbers::pi * freq_hz / sample_rate_hz);
  Complex h{1.0, 0.0};
  for (const auto& s : sections) {
    const Complex num = s.b[0] + z_inv * (s.b[1] + z_inv * s.b[2]);
    const Complex den = s.a[0] + z_inv * (s.a[1] + z_inv * s.a[2]);
    h *= num / den;
  }
  return h;
}

std::vector<std::complex<double>> FilterCoefficients::poles() const {
  std::vector<Complex> out;
  for (const auto& s : sections) {
    // z^2 + a1 z + a2 = 0, or z + a1 = 0 for first-order sections.
    if (s.a[2] == 0.0) {
      out.emplace_back(-s.a[1], 0.0);
      continue;
    }
    const Complex disc = std::sqrt(Complex(s.a[1] * s.a[1] - 4.0 * s.a[2], 0.0));
    out.push_back((-s.a[1] + disc) / 2.0);
    out.push_back((-s.a[1] - disc) / 2.0);
  }
  return out;
}

FilterCoefficients design_bandpass(double band_low_hz, double band_high_hz, int order,
                                   double sample_rate_hz) {
  check_band(band_low_hz, band_high_hz, sample_rate_hz);
  if (order < 2) {
    fail(ErrorKind::InvalidBand, fmt::format("band-pass order must be >= 2, got {}", order));
  }
  const double w_low = prewarp(band_low_hz, sample_rate_hz);
  const double w_high = prewarp(band_high_hz, sample_rate_hz);
  const double bandwidth = w_high - w_low;
  const double w0_sq = w_low * w_high;

  std::vector<Complex> digital;
  for (const auto& p : butterworth_prototype_poles(order)) {
    const Complex pb = p * bandwidth;
    const Complex disc = std::sqrt(pb * pb - 4.0 * w0_sq);
    digital.push_back(bilinear((pb + disc) / 2.0, sample_rate_hz));
    digital.push_back(bilinear((pb - disc) / 2.0, sample_rate_hz));
  }

  FilterCoefficients filter;
  for (const auto& den : pair_poles(std::move(digital))) {
    // One zero at z = 1 and one at z = -1 per section.
    filter.sections.push_back(Biquad{{1.0, 0.0, -1.0}, den});
  }
  const double center_hz =
      sample_rate_hz / std::numbers::pi * std::atan(std::sqrt(w0_sq) / (2.0 * sample_rate_hz));
  apply_gain(filter, 1.0 / filter.magnitude(center_hz, sample_rate_hz));
  check_stable(filter);
  return filter;
}

FilterCoefficients design_highpass(double cutoff_hz, int order, double sample_rate_hz) {
  if (!(cutoff_hz > 0.0) || !(cutoff_hz < sample_rate_hz / 2.0)) {
    fail(ErrorKind::InvalidBand, fmt::format("high-pass cutoff {} Hz invalid for sample rate {} Hz",
                                             cutoff_hz, sample_rate_hz));
  }
  if (order < 1) {
    fail(ErrorKind::InvalidBand, fmt::format("high-pass order must be >= 1, got {}", order));
  }
  const double wc = prewarp(cutoff_hz, sample_rate_hz);
  std::vector<Complex> digital;
  for (const auto& p : butterworth_prototype_poles(order)) {
    digital.push_back(bilinear(wc / p, sample_rate_hz));
  }
  FilterCoefficients filter;
  for (const auto& den : pair_poles(std::move(digital))) {
    if (den[2] == 0.0) {
      filter.sections.push_back(Biquad{{1.0, -1.0, 0.0}, den});
    } else {
      filter.sections.push_back(Biquad{{1.0, -2.0, 1.0}, den});
    }
  }
  apply_gain(filter, 1.0 / filter.magnitude(sample_rate_hz / 2.0, sample_rate_hz));
  check_stable(filter);
  return filter;
}

FilterCoefficients design_notch(double notch_hz, double quality, double sample_rate_hz) {
  if (!(notch_hz > 0.0) || !(notch_hz < sample_rate_hz / 2.0)) {
    fail(ErrorKind::InvalidBand,
         fmt::format("notch {} Hz invalid for sample rate {} Hz", notch_hz, sample_rate_hz));
  }
  if (!(quality > 0.0)) {
    fail(ErrorKind::InvalidBand, fmt::format("notch quality must be positive, got {}", quality));
  }
  const double w0 = 2.0 * std::numbers::pi * notch_hz / sample_rate_hz;
  const double beta = std::tan(w0 / quality / 2.0);
  const double gain = 1.0 / (1.0 + beta);
  const double c = std::cos(w0);
  FilterCoefficients filter;
  filter.sections.push_back(
      Biquad{{gain, -2.0 * gain * c, gain}, {1.0, -2.0 * gain * c, 2.0 * gain - 1.0}});
  check_stable(filter);
  return filter;
}

std::vector<double> filter_causal(const FilterCoefficients& filter, std::span<const double> x) {
  std::vector<double> y(x.begin(), x.end());
  run_cascade(filter, y, std::vector<std::array<double, 2>>(filter.sections.size()));
  return y;
}

std::size_t filtfilt_pad_length(const FilterCoefficients& filter, std::size_t n_samples) {
  const std::size_t taps = 2 * filter.sections.size() + 1;
  const std::size_t pad = 3 * taps;
  return n_samples <= 1 ? 0 : std::min(pad, n_samples - 1);
}

std::vector<double> filtfilt(const FilterCoefficients& filter, std::span<const double> x) {
  std::vector<double> out(x.size());
  if (x.empty()) return out;
  std::vector<double> work;
  filtfilt_into(filter, x, steady_state_initial(filter), work, out);
  return out;
}

SignalEpoch filtfilt(const FilterCoefficients& filter, const SignalEpoch& epoch) {
  const auto& in = epoch.samples();
  SampleMatrix out(in.rows(), in.cols());
  const auto zi = steady_state_initial(filter);
  std::vector<double> work;
  for (Eigen::Index r = 0; r < in.rows(); ++r) {
    filtfilt_into(filter, std::span<const double>(in.row(r).data(), static_cast<std::size_t>(in.cols())),
                  zi, work, std::span<double>(out.row(r).data(), static_cast<std::size_t>(in.cols())));
  }
  return epoch.with_samples(std::move(out));
}

SignalEpoch notch_filter(const SignalEpoch& epoch, double notch_hz, double quality) {
  return filtfilt(design_notch(notch_hz, quality, epoch.sample_rate_hz()), epoch);
}

SignalEpoch highpass_filter(const SignalEpoch& epoch, double cutoff_hz, int order) {
  return filtfilt(design_highpass(cutoff_hz, order, epoch.sample_rate_hz()), epoch);
}

std::vector<Band> FilterBankSpec::bands() const {
  std::vector<Band> out;
  if (!(band_width_hz > 0.0) || !(band_step_hz > 0.0) || !(high_hz > low_hz)) return out;
  for (int k = 0;; ++k) {
    const double lo = low_hz + k * band_step_hz;
    const double hi = lo + band_width_hz;
    if (hi > high_hz + kBandTolerance) break;
    out.push_back(Band{lo, std::min(hi, high_hz)});
  }
  return out;
}

void FilterBankSpec::validate(double sample_rate_hz) const {
  check_band(low_hz, high_hz, sample_rate_hz);
  if (!(band_width_hz > 0.0) || !(band_step_hz > 0.0)) {
    fail(ErrorKind::InvalidBand,
         fmt::format("band width {} and step {} must be positive", band_width_hz, band_step_hz));
  }
  if (filter_order < 2) {
    fail(ErrorKind::InvalidBand, fmt::format("filter order must be >= 2, got {}", filter_order));
  }
  if (bands().empty()) {
    fail(ErrorKind::InvalidBand, fmt::format("band width {} Hz does not fit in [{}, {}] Hz",
                                             band_width_hz, low_hz, high_hz));
  }
  if (notch_hz && !(*notch_hz > 0.0 && *notch_hz < sample_rate_hz / 2.0)) {
    fail(ErrorKind::InvalidBand, fmt::format("notch {} Hz invalid for sample rate {} Hz",
                                             *notch_hz, sample_rate_hz));
  }
}

FilterBankSpec default_filter_bank() { return FilterBankSpec{4.0, 40.0, 4.0, 2.0, 4, std::nullopt}; }

FilterBankSpec eleven_band_filter_bank() {
  return FilterBankSpec{4.0, 40.0, 4.0, 3.2, 4, std::nullopt};
}

FilterBankSpec broadband_filter_bank() {
  return FilterBankSpec{4.0, 40.0, 36.0, 1.0, 4, std::nullopt};
}

std::optional<FilterBankSpec> parse_filter_bank(std::string_view text) {
  if (text == "4-40-w4-s2" || text == "default") return default_filter_bank();
  if (text == "bands=11") return eleven_band_filter_bank();
  if (text == "broadband") return broadband_filter_bank();

  std::array<double, 4> values{};
  std::size_t count = 0;
  while (count < values.size()) {
    const auto comma = text.find(',');
    const auto token = text.substr(0, comma);
    const auto* begin = token.data();
    const auto* end = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(begin, end, values[count]);
    if (ec != std::errc() || ptr != end) return std::nullopt;
    ++count;
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  if (count != values.size()) return std::nullopt;
  return FilterBankSpec{values[0], values[1], values[2], values[3], 4, std::nullopt};
}

std::string describe_filter_bank(const FilterBankSpec& spec) {
  return fmt::format("{},{},{},{}", spec.low_hz, spec.high_hz, spec.band_width_hz,
                     spec.band_step_hz);
}

std::vector<SampleMatrix> filter_bank_matrices(const SampleMatrix& samples, double sample_rate_hz,
                                               const FilterBankSpec& spec) {
  spec.validate(sample_rate_hz);
  SampleMatrix source = samples;
  std::vector<double> work;
  const auto n = static_cast<std::size_t>(samples.cols());
  if (spec.notch_hz) {
    const auto notch = design_notch(*spec.notch_hz, kDefaultNotchQuality, sample_rate_hz);
    const auto zi = steady_state_initial(notch);
    for (Eigen::Index r = 0; r < source.rows(); ++r) {
      std::vector<double> row(samples.row(r).data(), samples.row(r).data() + n);
      filtfilt_into(notch, row, zi, work, std::span<double>(source.row(r).data(), n));
    }
  }

  std::vector<SampleMatrix> out;
  for (const auto& band : spec.bands()) {
    const auto filter = design_bandpass(band.low_hz, band.high_hz, spec.filter_order, sample_rate_hz);
    const auto zi = steady_state_initial(filter);
    SampleMatrix filtered(source.rows(), source.cols());
    for (Eigen::Index r = 0; r < source.rows(); ++r) {
      filtfilt_into(filter, std::span<const double>(source.row(r).data(), n), zi, work,
                    std::span<double>(filtered.row(r).data(), n));
    }
    out.push_back(std::move(filtered));
  }
  return out;
}

std::vector<SignalEpoch> apply_filter_bank(const SignalEpoch& epoch, const FilterBankSpec& spec) {
  auto matrices = filter_bank_matrices(epoch.samples(), epoch.sample_rate_hz(), spec);
  std::vector<SignalEpoch> out;
  out.reserve(matrices.size());
  for (auto& m : matrices) out.push_back(epoch.with_samples(std::move(m)));
  return out;
}

}  // namespace grasp
