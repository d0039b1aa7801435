#include "grasp/baselines.hpp"

#include "grasp/errors.hpp"

#include <fmt/format.h>

namespace grasp {
namespace {

constexpr std::array<std::array<std::size_t, 2>, 3> kPairs = {{{0, 1}, {0, 2}, {1, 2}}};

/// Trace-normalized whole-trial covariance per band.
std::vector<Eigen::MatrixXd> trial_band_covariances(const Trial& trial, const FilterBankSpec& bank) {
  const auto bands = filter_bank_matrices(trial.eeg.samples(), trial.eeg.sample_rate_hz(), bank);
  std::vector<Eigen::MatrixXd> out;
  out.reserve(bands.size());
  for (const auto& x : bands) out.push_back(normalized_covariance(x));
  return out;
}

SpatialFilterModel fit_spatial(const std::vector<std::vector<Eigen::MatrixXd>>& covs,
                               const std::vector<std::size_t>& active,
                               const std::vector<std::size_t>& rest, const BaselineConfig& config) {
  SpatialFilterModel model;
  model.filter_bank = config.filter_bank;
  model.regularization_gamma = config.gamma;
  const std::size_t n_bands = covs.front().size();
  for (std::size_t b = 0; b < n_bands; ++b) {
    auto mean_of = [&](const std::vector<std::size_t>& idx) {
      Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(covs.front()[b].rows(), covs.front()[b].cols());
      for (auto i : idx) sum += covs[i][b];
      return Eigen::MatrixXd(sum / static_cast<double>(idx.size()));
    };
    model.per_band.push_back(
        fit_csp(mean_of(active), mean_of(rest), config.csp_pairs, config.gamma, static_cast<int>(b)));
  }
  return model;
}

Eigen::VectorXd spatial_features(const SpatialFilterModel& model,
                                 const std::vector<Eigen::MatrixXd>& band_covs) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(model.n_features()));
  Eigen::Index offset = 0;
  for (std::size_t b = 0; b < model.per_band.size(); ++b) {
    const auto f = log_variance_features_from_scatter(model.per_band[b], band_covs[b]);
    out.segment(offset, f.size()) = f;
    offset += f.size();
  }
  return out;
}

Eigen::VectorXd concatenated_features(const std::vector<SpatialFilterModel>& spatial,
                                      const std::vector<Eigen::MatrixXd>& band_covs) {
  Eigen::Index total = 0;
  for (const auto& s : spatial) total += static_cast<Eigen::Index>(s.n_features());
  Eigen::VectorXd out(total);
  Eigen::Index offset = 0;
  for (const auto& s : spatial) {
    const auto f = spatial_features(s, band_covs);
    out.segment(offset, f.size()) = f;
    offset += f.size();
  }
  return out;
}

}  // namespace

std::string_view to_string(BaselineKind kind) noexcept {
  return kind == BaselineKind::ModelI ? "model1" : "model2";
}

BaselineConfig BaselineConfig::defaults(BaselineKind kind) {
  BaselineConfig config;
  if (kind == BaselineKind::ModelII) {
    config.filter_bank = default_filter_bank();
    config.gamma = kDefaultModelIIGamma;
  }
  return config;
}

void BaselineConfig::validate(BaselineKind kind, double sample_rate_hz) const {
  filter_bank.validate(sample_rate_hz);
  if (csp_pairs < 1) {
    fail(ErrorKind::InvalidConfig, fmt::format("csp_pairs must be >= 1, got {}", csp_pairs));
  }
  if (!(shrinkage >= 0.0 && shrinkage <= 1.0)) {
    fail(ErrorKind::InvalidConfig, fmt::format("shrinkage must lie in [0, 1], got {}", shrinkage));
  }
  if (kind == BaselineKind::ModelI) {
    if (filter_bank.band_count() != 1 || gamma != 0.0) {
      fail(ErrorKind::InvalidConfig, "Model I uses a single broadband filter and gamma = 0");
    }
  } else if (!(gamma > 0.0 && gamma <= 1.0)) {
    fail(ErrorKind::InvalidConfig, fmt::format("Model II needs gamma in (0, 1], got {}", gamma));
  }
}

BaselineModel train_baseline(BaselineKind kind, std::span<const Trial> trials,
                             const BaselineConfig& config) {
  if (trials.empty()) fail(ErrorKind::EmptyInput, "no training trials");
  const double fs = trials.front().eeg.sample_rate_hz();
  const auto n_eeg = trials.front().eeg.n_channels();
  config.validate(kind, fs);

  std::vector<std::vector<Eigen::MatrixXd>> covs;
  std::vector<GraspClass> labels;
  std::array<std::vector<std::size_t>, kNumClasses> members;
  covs.reserve(trials.size());
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const auto& t = trials[i];
    if (!t.class_label) fail(ErrorKind::UnlabeledTrial, fmt::format("trial {} has no label", t.id));
    if (t.eeg.sample_rate_hz() != fs || t.eeg.n_channels() != n_eeg) {
      fail(ErrorKind::DimensionMismatch, fmt::format("trial {} EEG layout differs", t.id));
    }
    covs.push_back(trial_band_covariances(t, config.filter_bank));
    labels.push_back(*t.class_label);
    members[class_index(*t.class_label)].push_back(i);
  }
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    if (members[k].empty()) {
      fail(ErrorKind::SingleClassInput,
           fmt::format("class {} absent from training trials", to_string(class_from_index(k))));
    }
  }

  BaselineModel model;
  model.kind = kind;
  model.config = config;
  model.sample_rate_hz = fs;
  model.n_eeg_channels = n_eeg;
  for (const auto& t : trials) model.training_trial_ids.push_back(t.id);

  if (config.scheme == MulticlassScheme::OneVsRest) {
    for (std::size_t k = 0; k < kNumClasses; ++k) {
      std::vector<std::size_t> rest;
      for (std::size_t j = 0; j < kNumClasses; ++j) {
        if (j != k) rest.insert(rest.end(), members[j].begin(), members[j].end());
      }
      model.spatial.push_back(fit_spatial(covs, members[k], rest, config));
    }
    Eigen::MatrixXd features;
    for (std::size_t i = 0; i < trials.size(); ++i) {
      const auto f = concatenated_features(model.spatial, covs[i]);
      if (i == 0) features.resize(static_cast<Eigen::Index>(trials.size()), f.size());
      features.row(static_cast<Eigen::Index>(i)) = f.transpose();
    }
    model.head = fit_multiclass_lda(features, labels, config.shrinkage);
    return model;
  }

  for (std::size_t p = 0; p < kPairs.size(); ++p) {
    const auto [a, b] = kPairs[p];
    model.spatial.push_back(fit_spatial(covs, members[b], members[a], config));
    std::vector<std::size_t> idx = members[a];
    idx.insert(idx.end(), members[b].begin(), members[b].end());
    Eigen::MatrixXd features;
    std::vector<std::uint8_t> y;
    for (std::size_t r = 0; r < idx.size(); ++r) {
      const auto f = spatial_features(model.spatial.back(), covs[idx[r]]);
      if (r == 0) features.resize(static_cast<Eigen::Index>(idx.size()), f.size());
      features.row(static_cast<Eigen::Index>(r)) = f.transpose();
      y.push_back(class_index(labels[idx[r]]) == b ? 1 : 0);
    }
    model.pair_heads[p] = fit_lda(features, y, config.shrinkage);
  }
  return model;
}

GraspClass predict_baseline(const BaselineModel& model, const Trial& trial) {
  if (trial.eeg.sample_rate_hz() != model.sample_rate_hz ||
      trial.eeg.n_channels() != model.n_eeg_channels) {
    fail(ErrorKind::DimensionMismatch,
         fmt::format("trial {}: EEG {} ch @ {} Hz, model expects {} ch @ {} Hz", trial.id,
                     trial.eeg.n_channels(), trial.eeg.sample_rate_hz(), model.n_eeg_channels,
                     model.sample_rate_hz));
  }
  const auto covs = trial_band_covariances(trial, model.config.filter_bank);
  if (model.config.scheme == MulticlassScheme::OneVsRest) {
    return model.head.predict(concatenated_features(model.spatial, covs));
  }
  std::array<int, kNumClasses> votes{};
  for (std::size_t p = 0; p < kPairs.size(); ++p) {
    const auto f = spatial_features(model.spatial[p], covs);
    ++votes[model.pair_heads[p].predict(f) ? kPairs[p][1] : kPairs[p][0]];
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < kNumClasses; ++k) {
    if (votes[k] > votes[best]) best = k;
  }
  return class_from_index(best);
}

}  // namespace grasp
