#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "gseg3d/plane_model.hpp"
#include "gseg3d/point_cloud.hpp"
#include "gseg3d/voxel_grid.hpp"

namespace gseg3d {

/// Thresholds used to characterize a single cell.
struct GeometryParams {
  /// Line cell when lambda1 / sum >= this.
  double line_ratio_min = 0.9;
  /// Planar cell when lambda3 / sum <= this (and the cell is not a line).
  double planar_flatness_max = 0.05;
  /// Maximum ground slope, degrees.
  double slope_threshold_deg = 30.0;
  /// RANSAC inlier distance, meters.
  double inlier_threshold = 0.125;
  int ransac_iterations = 50;
  std::uint64_t ransac_seed = 0;
  std::size_t min_points_for_eigen = 3;
  /// Bounding-box volume per point (m^3) separating Low / Medium / High sparsity.
  double sparsity_low_max = 0.01;
  double sparsity_medium_max = 0.1;

  void validate() const;
};

/// Welford-style single pass accumulator for the population covariance.
class CovarianceAccumulator {
 public:
  void add(const Point3& p) {
    ++n_;
    const Eigen::Vector3d delta = p - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (p - mean_).transpose();
  }

  [[nodiscard]] std::size_t count() const noexcept { return n_; }
  [[nodiscard]] const Eigen::Vector3d& mean() const noexcept { return mean_; }

  /// (1/N) sum (p - mean)(p - mean)^T, symmetrized.
  [[nodiscard]] Eigen::Matrix3d covariance() const;

 private:
  std::size_t n_ = 0;
  Eigen::Vector3d mean_ = Eigen::Vector3d::Zero();
  Eigen::Matrix3d m2_ = Eigen::Matrix3d::Zero();
};

/// Population covariance of `points`. Throws ContractViolation on empty input.
Eigen::Matrix3d covariance(std::span<const Point3> points);

struct EigenSummary {
  /// lambda1 >= lambda2 >= lambda3 >= 0.
  Eigen::Vector3d eigenvalues = Eigen::Vector3d::Zero();
  /// Column k is the unit eigenvector of eigenvalues[k].
  Eigen::Matrix3d eigenvectors = Eigen::Matrix3d::Identity();
  /// lambda1 / (lambda1 + lambda2 + lambda3); 0 when the sum is 0.
  double ratio = 0.0;
  /// lambda3 / (lambda1 + lambda2 + lambda3); 0 when the sum is 0.
  double flatness = 0.0;

  [[nodiscard]] Eigen::Vector3d principal() const { return eigenvectors.col(0); }
  [[nodiscard]] Eigen::Vector3d normal() const { return eigenvectors.col(2); }
};

struct EigenClassification {
  EigenSummary summary;
  CellKind kind = CellKind::NonPlanar;
};

/// Decomposes a symmetric PSD matrix and applies the Line / Planar / NonPlanar rules.
/// A zero matrix is NonPlanar. Throws ContractViolation if `c` is not symmetric.
EigenClassification eigen_classify(const Eigen::Matrix3d& c, const GeometryParams& params);

/// Line cells: TentativeGround when the principal direction lies within
/// `slope_threshold_deg` of horizontal, Obstacle otherwise.
GroundState classify_line_cell(const Eigen::Vector3d& e1, double slope_threshold_deg);

struct PlaneFit {
  PlaneModel plane;
  /// Ascending indices into the fitted point span.
  std::vector<std::size_t> inliers;
  std::vector<std::size_t> outliers;
};

/// Optional diagnostics from ransac_plane.
struct RansacTrace {
  std::vector<std::size_t> candidate_inlier_counts;
  std::size_t degenerate_samples = 0;
  bool refit_adopted = false;
};

/// Seeded RANSAC plane fit with a least-squares refit on the winning inliers.
/// Throws FitFailure for fewer than 3 points or when every sample was collinear.
PlaneFit ransac_plane(std::span<const Point3> points, double inlier_threshold, int iterations,
                      std::uint64_t seed, RansacTrace* trace = nullptr);

/// Planar cells: TentativeGround iff slope_deg <= threshold, else NonGround.
GroundState classify_planar_cell(const PlaneModel& plane, double slope_threshold_deg);

enum class SparsityClass : std::uint8_t { Low, Medium, High };

/// Axis-aligned bounding-box volume per point, every extent floored at 0.01 m.
double bbox_sparsity_score(std::span<const Point3> points);
SparsityClass bbox_sparsity(std::span<const Point3> points, const GeometryParams& params);

const char* to_string(SparsityClass s);

}  // namespace gseg3d
