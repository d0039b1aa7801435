#include "grasp/lda.hpp"

#include "grasp/errors.hpp"

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include <cmath>

namespace grasp {
namespace {

constexpr double kSingularRatio = 1e-12;

Eigen::MatrixXd stack_rows(std::span<const FeatureVector> features) {
  if (features.empty()) return {};
  const auto d = features.front().values.size();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(features.size()), d);
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i].values.size() != d) {
      fail(ErrorKind::DimensionMismatch,
           fmt::format("feature {} has length {}, expected {}", i, features[i].values.size(), d));
    }
    out.row(static_cast<Eigen::Index>(i)) = features[i].values.transpose();
  }
  return out;
}

}  // namespace

LdaModel fit_lda(const Eigen::MatrixXd& features, std::span<const std::uint8_t> labels,
                 double shrinkage, PriorMode priors) {
  if (static_cast<std::size_t>(features.rows()) != labels.size()) {
    fail(ErrorKind::DimensionMismatch,
         fmt::format("{} feature rows for {} labels", features.rows(), labels.size()));
  }
  if (!(shrinkage >= 0.0 && shrinkage <= 1.0)) {
    fail(ErrorKind::InvalidConfig, fmt::format("shrinkage must lie in [0, 1], got {}", shrinkage));
  }
  const auto d = features.cols();
  std::array<Eigen::Index, 2> counts{0, 0};
  std::array<Eigen::VectorXd, 2> means{Eigen::VectorXd::Zero(d), Eigen::VectorXd::Zero(d)};
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] > 1) fail(ErrorKind::InvalidConfig, "binary labels must be 0 or 1");
    ++counts[labels[i]];
    means[labels[i]] += features.row(static_cast<Eigen::Index>(i)).transpose();
  }
  if (counts[0] == 0 || counts[1] == 0) {
    fail(ErrorKind::SingleClassInput,
         fmt::format("labels contain a single class ({} zeros, {} ones)", counts[0], counts[1]));
  }
  if (counts[0] < 2 || counts[1] < 2) {
    fail(ErrorKind::InsufficientData,
         fmt::format("need two samples per class, have {} and {}", counts[0], counts[1]));
  }
  means[0] /= static_cast<double>(counts[0]);
  means[1] /= static_cast<double>(counts[1]);

  Eigen::MatrixXd centered(features.rows(), d);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    centered.row(r) = features.row(r) - means[labels[i]].transpose();
  }
  Eigen::MatrixXd pooled = Eigen::MatrixXd::Zero(d, d);
  pooled.selfadjointView<Eigen::Lower>().rankUpdate(centered.transpose());
  pooled = pooled.selfadjointView<Eigen::Lower>();
  pooled /= static_cast<double>(features.rows() - 2);
  pooled = shrink_covariance(pooled, shrinkage);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(pooled);
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  const double largest = lambda.maxCoeff();
  if (eig.info() != Eigen::Success || !(largest > 0.0) ||
      !(lambda.minCoeff() > kSingularRatio * largest)) {
    fail(ErrorKind::SingularCovariance,
         fmt::format("pooled covariance is rank-deficient (shrinkage {})", shrinkage));
  }
  const Eigen::VectorXd diff = means[1] - means[0];
  LdaModel model;
  model.weights = eig.eigenvectors() *
                  (lambda.cwiseInverse().asDiagonal() * (eig.eigenvectors().transpose() * diff));
  model.bias = -0.5 * model.weights.dot(means[0] + means[1]);
  if (priors == PriorMode::Empirical) {
    model.bias += std::log(static_cast<double>(counts[1]) / static_cast<double>(counts[0]));
  }
  model.class_means = std::move(means);
  model.shrinkage = shrinkage;
  return model;
}

LdaModel fit_lda(std::span<const FeatureVector> features, std::span<const std::uint8_t> labels,
                 double shrinkage, PriorMode priors) {
  return fit_lda(stack_rows(features), labels, shrinkage, priors);
}

Eigen::Vector3d MulticlassLdaModel::scores(const Eigen::VectorXd& x) const {
  Eigen::Vector3d s;
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    s[static_cast<Eigen::Index>(k)] = one_vs_rest[k].score(x);
  }
  return s;
}

GraspClass MulticlassLdaModel::predict(const Eigen::VectorXd& x) const {
  const auto s = scores(x);
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < s.size(); ++k) {
    if (s[k] > s[best]) best = k;
  }
  return class_from_index(static_cast<std::size_t>(best));
}

MulticlassLdaModel fit_multiclass_lda(const Eigen::MatrixXd& features,
                                      std::span<const GraspClass> labels, double shrinkage) {
  if (static_cast<std::size_t>(features.rows()) != labels.size()) {
    fail(ErrorKind::DimensionMismatch,
         fmt::format("{} feature rows for {} labels", features.rows(), labels.size()));
  }
  std::array<std::size_t, kNumClasses> counts{};
  for (auto c : labels) ++counts[class_index(c)];
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    if (counts[k] == 0) {
      fail(ErrorKind::SingleClassInput,
           fmt::format("class {} absent from training labels", to_string(class_from_index(k))));
    }
  }
  MulticlassLdaModel model;
  std::vector<std::uint8_t> binary(labels.size());
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    for (std::size_t i = 0; i < labels.size(); ++i) binary[i] = class_index(labels[i]) == k ? 1 : 0;
    model.one_vs_rest[k] = fit_lda(features, binary, shrinkage, PriorMode::Equal);
  }
  return model;
}

MulticlassLdaModel fit_multiclass_lda(std::span<const FeatureVector> features,
                                      std::span<const GraspClass> labels, double shrinkage) {
  return fit_multiclass_lda(stack_rows(features), labels, shrinkage);
}

}  // namespace grasp
