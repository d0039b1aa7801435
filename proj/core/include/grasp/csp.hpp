#pragma once

#include "grasp/filter.hpp"
#include "grasp/signal.hpp"

#include <Eigen/Core>

#include <span>
#include <string>
#include <vector>

namespace grasp {

/// Trace-normalized spatial covariance X X^T / trace(X X^T). Throws
/// DegenerateSegment when the segment has zero power.
Eigen::MatrixXd normalized_covariance(const SampleMatrix& segment);

/// Mean of the trace-normalized covariances; unit trace, symmetric PSD.
Eigen::MatrixXd class_covariance(std::span<const SampleMatrix> segments);

/// C <- (1 - gamma) C + gamma * trace(C)/n * I.
Eigen::MatrixXd shrink_covariance(const Eigen::MatrixXd& cov, double gamma);

/// Full solution of C_a w = lambda (C_a + C_r) w, rows of `filters` sorted
/// by descending eigenvalue and scaled so w^T (C_a + C_r) w = 1.
struct GeneralizedEigen {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd filters;
};

/// Solved by whitening the composite covariance. Covariances are shrunk by
/// gamma first.
GeneralizedEigen solve_csp(const Eigen::MatrixXd& cov_active, const Eigen::MatrixXd& cov_rest,
                           double gamma);

/// Spatial filters for one sub-band: the m filters with the largest
/// eigenvalues followed by the m with the smallest.
struct CspModel {
  Eigen::MatrixXd projection;  // 2m x n_channels
  Eigen::VectorXd eigenvalues; // 2m, matching projection rows
  int m_pairs = 2;
  int band_index = 0;

  Eigen::Index n_channels() const noexcept { return projection.cols(); }
  Eigen::Index n_filters() const noexcept { return projection.rows(); }

  friend bool operator==(const CspModel&, const CspModel&) = default;
};

inline constexpr int kDefaultCspPairs = 2;

CspModel fit_csp(const Eigen::MatrixXd& cov_active, const Eigen::MatrixXd& cov_rest, int m_pairs,
                 double gamma, int band_index = 0);

/// Per-band CSP over a filter bank.
struct SpatialFilterModel {
  std::vector<CspModel> per_band;
  FilterBankSpec filter_bank;
  double regularization_gamma = 0.0;

  std::size_t n_features() const;

  friend bool operator==(const SpatialFilterModel&, const SpatialFilterModel&) = default;
};

struct FeatureVector {
  Eigen::VectorXd values;
  std::size_t segment_index = 0;
  std::string trial_id;
};

/// log(var_i / sum var) of the projected rows for one band. The variance is
/// the mean square of each projected row.
Eigen::VectorXd log_variance_features(const CspModel& model, const SampleMatrix& segment);

/// Same features computed from any positive multiple of X X^T.
Eigen::VectorXd log_variance_features_from_scatter(const CspModel& model,
                                                   const Eigen::MatrixXd& scatter);

/// Concatenated per-band features, n_bands * 2m values.
FeatureVector extract_features(const SpatialFilterModel& model,
                               std::span<const SampleMatrix> segment_per_band);

}  // namespace grasp
