#include "grasp/pipeline.hpp"

#include "grasp/errors.hpp"
#include "grasp/segment_scatter.hpp"

#include <fmt/format.h>

#include <array>

namespace grasp {

void PipelineConfig::validate(double sample_rate_hz) const {
  window.validate_for_pipeline();
  filter_bank.validate(sample_rate_hz);
  threshold.validate();
  if (csp_pairs < 1) {
    fail(ErrorKind::InvalidConfig, fmt::format("csp_pairs must be >= 1, got {}", csp_pairs));
  }
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    fail(ErrorKind::InvalidConfig, fmt::format("gamma must lie in [0, 1], got {}", gamma));
  }
  if (!(shrinkage >= 0.0 && shrinkage <= 1.0)) {
    fail(ErrorKind::InvalidConfig, fmt::format("shrinkage must lie in [0, 1], got {}", shrinkage));
  }
  if (n_muscle_channels < 1) fail(ErrorKind::InvalidConfig, "need at least one muscle channel");
}

namespace {

void check_eeg_layout(const Trial& trial, double sample_rate_hz, Eigen::Index n_channels) {
  if (trial.eeg.sample_rate_hz() != sample_rate_hz || trial.eeg.n_channels() != n_channels) {
    fail(ErrorKind::DimensionMismatch,
         fmt::format("trial {}: EEG {} ch @ {} Hz, expected {} ch @ {} Hz", trial.id,
                     trial.eeg.n_channels(), trial.eeg.sample_rate_hz(), n_channels,
                     sample_rate_hz));
  }
}

/// Features of every segment for one classifier, computed from scatters.
Eigen::MatrixXd features_from_scatters(const SpatialFilterModel& spatial,
                                       const BandSegmentScatter& scatters) {
  const auto n_segments = scatters.empty() ? 0 : scatters.front().size();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(n_segments),
                      static_cast<Eigen::Index>(spatial.n_features()));
  Eigen::Index offset = 0;
  for (std::size_t b = 0; b < spatial.per_band.size(); ++b) {
    const auto& csp = spatial.per_band[b];
    for (std::size_t t = 0; t < n_segments; ++t) {
      out.row(static_cast<Eigen::Index>(t)).segment(offset, csp.n_filters()) =
          log_variance_features_from_scatter(csp, scatters[b][t]).transpose();
    }
    offset += csp.n_filters();
  }
  return out;
}

}  // namespace

std::vector<ChannelClassifier> fit_channel_classifiers(
    std::span<const Trial> trials, std::span<const std::size_t> channels,
    std::span<const SegmentLabels> labels_by_channel, const PipelineConfig& config) {
  if (trials.empty()) fail(ErrorKind::EmptyInput, "no training trials");
  if (channels.size() != labels_by_channel.size()) {
    fail(ErrorKind::DimensionMismatch, "one label set per channel required");
  }
  const double fs = trials.front().eeg.sample_rate_hz();
  const auto n_eeg = trials.front().eeg.n_channels();
  config.validate(fs);
  for (const auto& labels : labels_by_channel) {
    if (labels.size() != trials.size()) {
      fail(ErrorKind::DimensionMismatch,
           fmt::format("{} label rows for {} trials", labels.size(), trials.size()));
    }
  }

  const auto bands = config.filter_bank.bands();
  const std::size_t n_bands = bands.size();
  const std::size_t n_clf = channels.size();

  // Pass 1: per-class trace-normalized covariance sums.
  std::vector<std::vector<std::array<Eigen::MatrixXd, 2>>> sums(
      n_clf, std::vector<std::array<Eigen::MatrixXd, 2>>(
                 n_bands, {Eigen::MatrixXd::Zero(n_eeg, n_eeg), Eigen::MatrixXd::Zero(n_eeg, n_eeg)}));
  std::vector<std::array<std::size_t, 2>> counts(n_clf, {0, 0});
  std::size_t total_segments = 0;

  for (std::size_t i = 0; i < trials.size(); ++i) {
    check_eeg_layout(trials[i], fs, n_eeg);
    auto scatters = eeg_segment_scatters(trials[i].eeg, config.filter_bank, config.window);
    const std::size_t n_segments = scatters.front().size();
    for (auto& band : scatters) {
      for (auto& s : band) {
        const double trace = s.trace();
        if (!(trace > 0.0)) {
          fail(ErrorKind::DegenerateSegment,
               fmt::format("trial {} has a zero-power EEG segment", trials[i].id));
        }
        s /= trace;
      }
    }
    for (std::size_t j = 0; j < n_clf; ++j) {
      const auto& labels = labels_by_channel[j][i];
      if (labels.size() != n_segments) {
        fail(ErrorKind::DimensionMismatch,
             fmt::format("trial {}: {} labels for {} segments", trials[i].id, labels.size(),
                         n_segments));
      }
      for (std::size_t t = 0; t < n_segments; ++t) {
        const std::uint8_t y = labels[t] ? 1 : 0;
        ++counts[j][y];
        for (std::size_t b = 0; b < n_bands; ++b) sums[j][b][y] += scatters[b][t];
      }
    }
    total_segments += n_segments;
  }

  std::vector<ChannelClassifier> out(n_clf);
  for (std::size_t j = 0; j < n_clf; ++j) {
    if (counts[j][0] == 0 || counts[j][1] == 0) {
      fail(ErrorKind::SingleClassInput,
           fmt::format("EMG channel {} is {} active across the training set", channels[j],
                       counts[j][1] == 0 ? "never" : "always"));
    }
    auto& clf = out[j];
    clf.emg_channel_index = channels[j];
    clf.spatial.filter_bank = config.filter_bank;
    clf.spatial.regularization_gamma = config.gamma;
    for (std::size_t b = 0; b < n_bands; ++b) {
      const Eigen::MatrixXd active = sums[j][b][1] / static_cast<double>(counts[j][1]);
      const Eigen::MatrixXd rest = sums[j][b][0] / static_cast<double>(counts[j][0]);
      clf.spatial.per_band.push_back(
          fit_csp(active, rest, config.csp_pairs, config.gamma, static_cast<int>(b)));
    }
  }

  // Pass 2: features and LDA.
  std::vector<Eigen::MatrixXd> features(n_clf);
  std::vector<std::vector<std::uint8_t>> targets(n_clf);
  for (std::size_t j = 0; j < n_clf; ++j) {
    features[j].resize(static_cast<Eigen::Index>(total_segments),
                       static_cast<Eigen::Index>(out[j].spatial.n_features()));
    targets[j].reserve(total_segments);
  }
  Eigen::Index row = 0;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const auto scatters = eeg_segment_scatters(trials[i].eeg, config.filter_bank, config.window);
    const auto n_segments = static_cast<Eigen::Index>(scatters.front().size());
    for (std::size_t j = 0; j < n_clf; ++j) {
      features[j].middleRows(row, n_segments) = features_from_scatters(out[j].spatial, scatters);
      for (auto y : labels_by_channel[j][i]) targets[j].push_back(y ? 1 : 0);
    }
    row += n_segments;
  }
  for (std::size_t j = 0; j < n_clf; ++j) {
    out[j].lda = fit_lda(features[j], targets[j], config.shrinkage, config.priors);
  }
  return out;
}

SegmentLabels emg_segment_labels(std::span<const Trial> trials, std::size_t channel,
                                 const PipelineConfig& config) {
  SegmentLabels labels;
  labels.reserve(trials.size());
  for (const auto& trial : trials) {
    if (trial.paradigm != Paradigm::ActualMovement) {
      fail(ErrorKind::WrongParadigm,
           fmt::format("trial {} is not an actual-movement trial", trial.id));
    }
    const auto pattern =
        build_pattern(trial, config.window, config.threshold, config.emg, config.n_muscle_channels);
    if (channel >= static_cast<std::size_t>(pattern.n_channels())) {
      fail(ErrorKind::ChannelCountMismatch,
           fmt::format("EMG channel {} out of range ({} channels)", channel, pattern.n_channels()));
    }
    const auto r = pattern.values.row(static_cast<Eigen::Index>(channel));
    labels.emplace_back(r.data(), r.data() + r.size());
  }
  return labels;
}

ChannelClassifier train_channel_classifier(std::span<const Trial> trials, std::size_t channel,
                                           const PipelineConfig& config) {
  const std::array<std::size_t, 1> channels{channel};
  const std::array<SegmentLabels, 1> labels{emg_segment_labels(trials, channel, config)};
  return fit_channel_classifiers(trials, channels, labels, config).front();
}

PipelineModel train_pipeline(std::span<const Trial> trials, const PipelineConfig& config) {
  if (trials.empty()) fail(ErrorKind::EmptyInput, "no training trials");
  const double fs = trials.front().eeg.sample_rate_hz();
  config.validate(fs);

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
    validate_trial(trial);
    patterns.push_back(
        build_pattern(trial, config.window, config.threshold, config.emg, config.n_muscle_channels));
  }

  std::vector<std::size_t> channels(config.n_muscle_channels);
  std::vector<SegmentLabels> labels(config.n_muscle_channels);
  for (std::size_t c = 0; c < config.n_muscle_channels; ++c) {
    channels[c] = c;
    labels[c].reserve(trials.size());
    for (const auto& p : patterns) {
      const auto r = p.values.row(static_cast<Eigen::Index>(c));
      labels[c].emplace_back(r.data(), r.data() + r.size());
    }
  }

  PipelineModel model;
  model.channel_classifiers = fit_channel_classifiers(trials, channels, labels, config);
  model.config = config;
  model.trained_on = Paradigm::ActualMovement;
  model.sample_rate_hz = fs;
  model.n_eeg_channels = trials.front().eeg.n_channels();
  model.library = PatternLibrary(config.window, config.n_muscle_channels,
                                 static_cast<std::size_t>(patterns.front().n_segments()));
  for (auto& p : patterns) model.library.add(std::move(p));
  model.training_trial_ids.reserve(trials.size());
  for (const auto& trial : trials) model.training_trial_ids.push_back(trial.id);
  return model;
}

std::uint8_t predict_segment(const ChannelClassifier& classifier,
                             std::span<const SampleMatrix> eeg_segment_per_band) {
  const auto features = extract_features(classifier.spatial, eeg_segment_per_band);
  if (features.values.size() != classifier.lda.weights.size()) {
    fail(ErrorKind::DimensionMismatch, "feature length does not match the LDA weights");
  }
  return classifier.lda.predict(features.values);
}

Eigen::MatrixXd segment_scores(const PipelineModel& model, const Trial& trial) {
  check_eeg_layout(trial, model.sample_rate_hz, model.n_eeg_channels);
  const auto scatters =
      eeg_segment_scatters(trial.eeg, model.config.filter_bank, model.config.window);
  const auto n_segments = static_cast<Eigen::Index>(scatters.front().size());
  Eigen::MatrixXd scores(static_cast<Eigen::Index>(model.channel_classifiers.size()), n_segments);
  for (std::size_t c = 0; c < model.channel_classifiers.size(); ++c) {
    const auto& clf = model.channel_classifiers[c];
    const Eigen::MatrixXd features = features_from_scatters(clf.spatial, scatters);
    scores.row(static_cast<Eigen::Index>(c)) =
        ((features * clf.lda.weights).array() + clf.lda.bias).transpose();
  }
  return scores;
}

ActivationPattern estimate_pattern(const PipelineModel& model, const Trial& trial) {
  const Eigen::MatrixXd scores = segment_scores(model, trial);
  ActivationPattern pattern;
  pattern.trial_id = trial.id;
  pattern.values = (scores.array() > 0.0).cast<std::uint8_t>();
  return pattern;
}

double segment_accuracy(const ChannelClassifier& classifier, std::span<const Trial> trials,
                        std::span<const SegmentLabels::value_type> labels,
                        const PipelineConfig& config) {
  if (labels.size() != trials.size()) {
    fail(ErrorKind::DimensionMismatch, "one label row per trial required");
  }
  std::size_t correct = 0;
  std::size_t total = 0;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const auto scatters = eeg_segment_scatters(trials[i].eeg, config.filter_bank, config.window);
    const Eigen::MatrixXd features = features_from_scatters(classifier.spatial, scatters);
    const Eigen::VectorXd scores = (features * classifier.lda.weights).array() + classifier.lda.bias;
    if (static_cast<std::size_t>(scores.size()) != labels[i].size()) {
      fail(ErrorKind::DimensionMismatch, "label row length differs from the segment count");
    }
    for (Eigen::Index t = 0; t < scores.size(); ++t) {
      const std::uint8_t predicted = scores[t] > 0.0 ? 1 : 0;
      correct += predicted == (labels[i][static_cast<std::size_t>(t)] ? 1 : 0);
      ++total;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

}  // namespace grasp
