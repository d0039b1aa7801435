#pragma once

#include "grasp/filter.hpp"
#include "grasp/window.hpp"

#include <Eigen/Core>

#include <vector>

namespace grasp {

/// Spatial scatter X_t X_t^T of every window position, per band:
/// scatter[band][segment]. Built from block sums over gcd(window, step)
/// sample blocks so overlapping windows share work.
using BandSegmentScatter = std::vector<std::vector<Eigen::MatrixXd>>;

BandSegmentScatter segment_scatters(const std::vector<SampleMatrix>& band_signals,
                                    const SegmentLayout& layout);

/// Filter bank followed by segment_scatters.
BandSegmentScatter eeg_segment_scatters(const SignalEpoch& eeg, const FilterBankSpec& filter_bank,
                                        const WindowSpec& window);

}  // namespace grasp
