#pragma once

#include "grasp/csp.hpp"
#include "grasp/types.hpp"

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <span>

namespace grasp {

enum class PriorMode { Equal, Empirical };

/// Two-class Fisher discriminant. Predicts 1 iff weights . x + bias > 0.
struct LdaModel {
  Eigen::VectorXd weights;
  double bias = 0.0;
  std::array<Eigen::VectorXd, 2> class_means;
  double shrinkage = 0.0;

  double score(const Eigen::VectorXd& x) const { return weights.dot(x) + bias; }
  std::uint8_t predict(const Eigen::VectorXd& x) const { return score(x) > 0.0 ? 1 : 0; }

  friend bool operator==(const LdaModel&, const LdaModel&) = default;
};

inline constexpr double kDefaultLdaShrinkage = 0.05;

/// `features` holds one sample per row. Labels are 0/1.
LdaModel fit_lda(const Eigen::MatrixXd& features, std::span<const std::uint8_t> labels,
                 double shrinkage, PriorMode priors = PriorMode::Equal);

LdaModel fit_lda(std::span<const FeatureVector> features, std::span<const std::uint8_t> labels,
                 double shrinkage, PriorMode priors = PriorMode::Equal);

/// One-vs-rest assembly of binary discriminants.
struct MulticlassLdaModel {
  std::array<LdaModel, kNumClasses> one_vs_rest;

  Eigen::Vector3d scores(const Eigen::VectorXd& x) const;
  /// argmax of scores; ties go to the lowest class index.
  GraspClass predict(const Eigen::VectorXd& x) const;

  friend bool operator==(const MulticlassLdaModel&, const MulticlassLdaModel&) = default;
};

MulticlassLdaModel fit_multiclass_lda(const Eigen::MatrixXd& features,
                                      std::span<const GraspClass> labels, double shrinkage);

MulticlassLdaModel fit_multiclass_lda(std::span<const FeatureVector> features,
                                      std::span<const GraspClass> labels, double shrinkage);

}  // namespace grasp
