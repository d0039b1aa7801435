#pragma once

#include "grasp/csp.hpp"
#include "grasp/emg_activation.hpp"
#include "grasp/filter.hpp"
#include "grasp/lda.hpp"
#include "grasp/window.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace grasp {

struct PipelineConfig {
  WindowSpec window;
  FilterBankSpec filter_bank = default_filter_bank();
  ThresholdPolicy threshold;
  EmgPreprocessing emg;
  int csp_pairs = kDefaultCspPairs;
  double gamma = 0.0;
  double shrinkage = kDefaultLdaShrinkage;
  PriorMode priors = PriorMode::Equal;
  std::size_t n_muscle_channels = kDefaultMuscleChannels;

  void validate(double sample_rate_hz) const;

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

/// Predicts segment-level activation of one muscle from EEG.
struct ChannelClassifier {
  std::size_t emg_channel_index = 0;
  LdaModel lda;
  SpatialFilterModel spatial;

  friend bool operator==(const ChannelClassifier&, const ChannelClassifier&) = default;
};

struct PipelineModel {
  std::vector<ChannelClassifier> channel_classifiers;
  PipelineConfig config;
  PatternLibrary library;
  Paradigm trained_on = Paradigm::ActualMovement;
  double sample_rate_hz = 0.0;
  Eigen::Index n_eeg_channels = 0;
  /// Every trial id that contributed to the classifiers or the library.
  std::vector<std::string> training_trial_ids;

  friend bool operator==(const PipelineModel&, const PipelineModel&) = default;
};

/// Segment labels for a set of trials: labels[trial][segment].
using SegmentLabels = std::vector<std::vector<std::uint8_t>>;

/// Fits CSP per band on active-vs-inactive segment groups and an LDA on the
/// concatenated log-variance features, one classifier per entry of
/// `labels_by_channel` (indexed like `channels`).
std::vector<ChannelClassifier> fit_channel_classifiers(
    std::span<const Trial> trials, std::span<const std::size_t> channels,
    std::span<const SegmentLabels> labels_by_channel, const PipelineConfig& config);

/// Labels every EEG segment from the EMG binarization of `channel`.
ChannelClassifier train_channel_classifier(std::span<const Trial> trials, std::size_t channel,
                                           const PipelineConfig& config);

/// EMG pattern library plus one classifier per muscle channel.
PipelineModel train_pipeline(std::span<const Trial> trials, const PipelineConfig& config);

std::uint8_t predict_segment(const ChannelClassifier& classifier,
                             std::span<const SampleMatrix> eeg_segment_per_band);

/// LDA scores per muscle channel and segment. Reads only trial.eeg.
Eigen::MatrixXd segment_scores(const PipelineModel& model, const Trial& trial);

/// Binary muscles x segments estimate from EEG alone.
ActivationPattern estimate_pattern(const PipelineModel& model, const Trial& trial);

/// Fraction of segments where the classifier agrees with the EMG labels.
double segment_accuracy(const ChannelClassifier& classifier, std::span<const Trial> trials,
                        std::span<const SegmentLabels::value_type> labels,
                        const PipelineConfig& config);

/// EMG-derived labels of one channel for every trial.
SegmentLabels emg_segment_labels(std::span<const Trial> trials, std::size_t channel,
                                 const PipelineConfig& config);

}  // namespace grasp
