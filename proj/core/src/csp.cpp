#include "grasp/csp.hpp"

#include "grasp/errors.hpp"

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include <cmath>

namespace grasp {
namespace {

constexpr double kSingularRatio = 1e-12;

void make_largest_entry_positive(Eigen::MatrixXd& rows) {
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    Eigen::Index arg = 0;
    rows.row(r).cwiseAbs().maxCoeff(&arg);
    if (rows(r, arg) < 0.0) rows.row(r) *= -1.0;
  }
}

}  // namespace

Eigen::MatrixXd normalized_covariance(const SampleMatrix& segment) {
  Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(segment.rows(), segment.rows());
  scatter.selfadjointView<Eigen::Lower>().rankUpdate(segment);
  scatter = scatter.selfadjointView<Eigen::Lower>();
  const double trace = scatter.trace();
  if (!(trace > 0.0)) fail(ErrorKind::DegenerateSegment, "segment has zero total power");
  return scatter / trace;
}

Eigen::MatrixXd class_covariance(std::span<const SampleMatrix> segments) {
  if (segments.empty()) fail(ErrorKind::EmptyInput, "no segments for class covariance");
  const auto n = segments.front().rows();
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n, n);
  for (const auto& s : segments) {
    if (s.rows() != n) {
      fail(ErrorKind::DimensionMismatch,
           fmt::format("segment has {} channels, expected {}", s.rows(), n));
    }
    sum += normalized_covariance(s);
  }
  return sum / static_cast<double>(segments.size());
}

Eigen::MatrixXd shrink_covariance(const Eigen::MatrixXd& cov, double gamma) {
  const auto n = cov.rows();
  const double target = cov.trace() / static_cast<double>(n);
  Eigen::MatrixXd out = (1.0 - gamma) * cov;
  out.diagonal().array() += gamma * target;
  return out;
}

GeneralizedEigen solve_csp(const Eigen::MatrixXd& cov_active, const Eigen::MatrixXd& cov_rest,
                           double gamma) {
  if (cov_active.rows() != cov_active.cols() || cov_rest.rows() != cov_rest.cols() ||
      cov_active.rows() != cov_rest.rows()) {
    fail(ErrorKind::DimensionMismatch,
         fmt::format("covariances {}x{} and {}x{} must be square and equal size",
                     cov_active.rows(), cov_active.cols(), cov_rest.rows(), cov_rest.cols()));
  }
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    fail(ErrorKind::InvalidConfig, fmt::format("gamma must lie in [0, 1], got {}", gamma));
  }
  const Eigen::MatrixXd active = shrink_covariance(cov_active, gamma);
  const Eigen::MatrixXd composite = active + shrink_covariance(cov_rest, gamma);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> composite_eig(composite);
  if (composite_eig.info() != Eigen::Success) {
    fail(ErrorKind::SingularComposite, "eigendecomposition of the composite covariance failed");
  }
  const Eigen::VectorXd& lambda = composite_eig.eigenvalues();
  const double largest = lambda.maxCoeff();
  if (!(largest > 0.0) || !(lambda.minCoeff() > kSingularRatio * largest)) {
    fail(ErrorKind::SingularComposite,
         fmt::format("composite covariance is singular (eigenvalues {:.3e} .. {:.3e})",
                     lambda.minCoeff(), largest));
  }
  const Eigen::MatrixXd whitening =
      lambda.cwiseSqrt().cwiseInverse().asDiagonal() * composite_eig.eigenvectors().transpose();
  Eigen::MatrixXd whitened = whitening * active * whitening.transpose();
  whitened = 0.5 * (whitened + whitened.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(whitened);
  if (eig.info() != Eigen::Success) {
    fail(ErrorKind::SingularComposite, "eigendecomposition of the whitened covariance failed");
  }
  // Eigen sorts ascending; flip to descending.
  GeneralizedEigen out;
  out.eigenvalues = eig.eigenvalues().reverse();
  out.filters = eig.eigenvectors().rowwise().reverse().transpose() * whitening;
  make_largest_entry_positive(out.filters);
  return out;
}

CspModel fit_csp(const Eigen::MatrixXd& cov_active, const Eigen::MatrixXd& cov_rest, int m_pairs,
                 double gamma, int band_index) {
  if (m_pairs < 1 || 2 * m_pairs > cov_active.rows()) {
    fail(ErrorKind::DimensionMismatch,
         fmt::format("{} CSP pairs need at least {} channels, have {}", m_pairs, 2 * m_pairs,
                     cov_active.rows()));
  }
  const auto full = solve_csp(cov_active, cov_rest, gamma);
  const auto n = full.filters.rows();
  const auto m = static_cast<Eigen::Index>(m_pairs);

  CspModel model;
  model.m_pairs = m_pairs;
  model.band_index = band_index;
  model.projection.resize(2 * m, n);
  model.eigenvalues.resize(2 * m);
  model.projection.topRows(m) = full.filters.topRows(m);
  model.projection.bottomRows(m) = full.filters.bottomRows(m);
  model.eigenvalues.head(m) = full.eigenvalues.head(m);
  model.eigenvalues.tail(m) = full.eigenvalues.tail(m);
  return model;
}

std::size_t SpatialFilterModel::n_features() const {
  std::size_t total = 0;
  for (const auto& band : per_band) total += static_cast<std::size_t>(band.n_filters());
  return total;
}

namespace {

Eigen::VectorXd normalize_log(const Eigen::VectorXd& variances) {
  const double total = variances.sum();
  if (!(total > 0.0)) {
    fail(ErrorKind::DegenerateSegment, "projected segment has zero variance in every filter");
  }
  // Guard against log(0) for a single silent component.
  const double floor = total * 1e-300;
  return (variances.array().max(floor) / total).log().matrix();
}

}  // namespace

Eigen::VectorXd log_variance_features(const CspModel& model, const SampleMatrix& segment) {
  if (segment.rows() != model.n_channels()) {
    fail(ErrorKind::DimensionMismatch,
         fmt::format("segment has {} channels, CSP expects {}", segment.rows(), model.n_channels()));
  }
  const Eigen::MatrixXd projected = model.projection * segment;
  const Eigen::VectorXd variances =
      projected.rowwise().squaredNorm() / static_cast<double>(segment.cols());
  return normalize_log(variances);
}

Eigen::VectorXd log_variance_features_from_scatter(const CspModel& model,
                                                   const Eigen::MatrixXd& scatter) {
  if (scatter.rows() != model.n_channels()) {
    fail(ErrorKind::DimensionMismatch,
         fmt::format("scatter has {} channels, CSP expects {}", scatter.rows(), model.n_channels()));
  }
  const Eigen::MatrixXd tmp = model.projection * scatter;
  const Eigen::VectorXd variances = tmp.cwiseProduct(model.projection).rowwise().sum();
  return normalize_log(variances);
}

FeatureVector extract_features(const SpatialFilterModel& model,
                               std::span<const SampleMatrix> segment_per_band) {
  if (segment_per_band.size() != model.per_band.size()) {
    fail(ErrorKind::DimensionMismatch,
         fmt::format("{} band segments for {} CSP bands", segment_per_band.size(),
                     model.per_band.size()));
  }
  FeatureVector out;
  out.values.resize(static_cast<Eigen::Index>(model.n_features()));
  Eigen::Index offset = 0;
  for (std::size_t b = 0; b < model.per_band.size(); ++b) {
    const auto features = log_variance_features(model.per_band[b], segment_per_band[b]);
    out.values.segment(offset, features.size()) = features;
    offset += features.size();
  }
  return out;
}

}  // namespace grasp
