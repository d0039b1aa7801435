#include "grasp/segment_scatter.hpp"

#include <numeric>

namespace grasp {

BandSegmentScatter segment_scatters(const std::vector<SampleMatrix>& band_signals,
                                    const SegmentLayout& layout) {
  BandSegmentScatter out;
  out.reserve(band_signals.size());
  if (layout.count == 0) {
    out.resize(band_signals.size());
    return out;
  }
  const Eigen::Index block = std::gcd(layout.window_samples, layout.step_samples);
  const Eigen::Index blocks_per_window = layout.window_samples / block;
  const Eigen::Index blocks_per_step = layout.step_samples / block;
  const Eigen::Index n_blocks =
      (layout.start(layout.count - 1) + layout.window_samples) / block;

  for (const auto& signal : band_signals) {
    const auto n_ch = signal.rows();
    std::vector<Eigen::MatrixXd> block_scatter(static_cast<std::size_t>(n_blocks));
    for (Eigen::Index k = 0; k < n_blocks; ++k) {
      Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n_ch, n_ch);
      s.selfadjointView<Eigen::Lower>().rankUpdate(signal.middleCols(k * block, block));
      block_scatter[static_cast<std::size_t>(k)] = s;
    }
    std::vector<Eigen::MatrixXd> segments(layout.count);
    for (std::size_t i = 0; i < layout.count; ++i) {
      const Eigen::Index first = static_cast<Eigen::Index>(i) * blocks_per_step;
      Eigen::MatrixXd sum = block_scatter[static_cast<std::size_t>(first)];
      for (Eigen::Index k = 1; k < blocks_per_window; ++k) {
        sum += block_scatter[static_cast<std::size_t>(first + k)];
      }
      segments[i] = sum.selfadjointView<Eigen::Lower>();
    }
    out.push_back(std::move(segments));
  }
  return out;
}

BandSegmentScatter eeg_segment_scatters(const SignalEpoch& eeg, const FilterBankSpec& filter_bank,
                                        const WindowSpec& window) {
  const auto layout = segment_layout(window, eeg.sample_rate_hz(), eeg.n_samples());
  return segment_scatters(filter_bank_matrices(eeg.samples(), eeg.sample_rate_hz(), filter_bank),
                          layout);
}

}  // namespace grasp
