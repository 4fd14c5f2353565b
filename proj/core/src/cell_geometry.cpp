#include "gseg3d/cell_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>

#include <Eigen/Eigenvalues>

namespace gseg3d {
namespace {

constexpr double kEarlyExitInlierFraction = 0.99;
constexpr double kMinBoxExtent = 0.01;

double rad_to_deg(double r) { return r * 180.0 / std::numbers::pi; }

// SplitMix64 as a UniformRandomBitGenerator; one generator is seeded per cell,
// so seeding has to be cheap (mt19937_64 fills 312 words).
class SplitMix64 {
 public:
  using result_type = std::uint64_t;
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

std::vector<std::size_t> collect_inliers(std::span<const Point3> points, const PlaneModel& plane,
                                         double threshold) {
  std::vector<std::size_t> inliers;
  inliers.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (plane.distance(points[i]) <= threshold) inliers.push_back(i);
  }
  return inliers;
}

std::vector<std::size_t> complement(const std::vector<std::size_t>& sorted_subset,
                                    std::size_t n) {
  std::vector<std::size_t> out;
  out.reserve(n - sorted_subset.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (k < sorted_subset.size() && sorted_subset[k] == i) {
      ++k;
    } else {
      out.push_back(i);
    }
  }
  return out;
}

}  // namespace

void GeometryParams::validate() const {
  if (!(line_ratio_min > 2.0 / 3.0) || !(line_ratio_min <= 1.0)) {
    throw ConfigError("lineRatioMin must lie in (2/3, 1]");
  }
  if (!(planar_flatness_max > 0.0)) throw ConfigError("planarFlatnessMax must be positive");
  if (!(slope_threshold_deg > 0.0) || slope_threshold_deg > 90.0) {
    throw ConfigError("slopeThresholdDegrees must lie in (0, 90]");
  }
  if (!(inlier_threshold > 0.0)) throw ConfigError("groundInlierThreshold must be positive");
  if (ransac_iterations <= 0) throw ConfigError("ransacIterations must be positive");
  if (min_points_for_eigen < 3) throw ConfigError("at least 3 points are needed for eigen analysis");
  if (!(sparsity_low_max > 0.0) || !(sparsity_medium_max > sparsity_low_max)) {
    throw ConfigError("sparsity cutoffs must satisfy 0 < sparsityLowMax < sparsityMediumMax");
  }
}

Eigen::Matrix3d CovarianceAccumulator::covariance() const {
  if (n_ == 0) throw ContractViolation("covariance of an empty point set");
  const Eigen::Matrix3d c = m2_ / static_cast<double>(n_);
  return 0.5 * (c + c.transpose());
}

Eigen::Matrix3d covariance(std::span<const Point3> points) {
  CovarianceAccumulator acc;
  for (const Point3& p : points) acc.add(p);
  return acc.covariance();
}

EigenClassification eigen_classify(const Eigen::Matrix3d& c, const GeometryParams& params) {
  const double scale = std::max(1.0, c.cwiseAbs().maxCoeff());
  if ((c - c.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw ContractViolation("eigen_classify expects a symmetric matrix");
  }

  EigenClassification out;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(c);
  if (solver.info() != Eigen::Success) {
    throw ContractViolation("eigen decomposition did not converge");
  }
  // Eigen returns ascending order.
  for (int k = 0; k < 3; ++k) {
    out.summary.eigenvalues[k] = std::max(0.0, solver.eigenvalues()[2 - k]);
    out.summary.eigenvectors.col(k) = solver.eigenvectors().col(2 - k).normalized();
  }

  const double sum = out.summary.eigenvalues.sum();
  if (!(sum > 0.0)) {
    out.kind = CellKind::NonPlanar;
    return out;
  }
  out.summary.ratio = out.summary.eigenvalues[0] / sum;
  out.summary.flatness = out.summary.eigenvalues[2] / sum;
  if (out.summary.ratio >= params.line_ratio_min) {
    out.kind = CellKind::Line;
  } else if (out.summary.flatness <= params.planar_flatness_max) {
    out.kind = CellKind::Planar;
  } else {
    out.kind = CellKind::NonPlanar;
  }
  return out;
}

GroundState classify_line_cell(const Eigen::Vector3d& e1, double slope_threshold_deg) {
  if (!(e1.norm() > 1e-12)) throw ContractViolation("line direction must be non-zero");
  // Sign-normalizing e1 to z >= 0 is the same as using |z|.
  const double angle_to_z = rad_to_deg(std::atan2(std::hypot(e1.x(), e1.y()), std::abs(e1.z())));
  return angle_to_z >= 90.0 - slope_threshold_deg ? GroundState::TentativeGround
                                                   : GroundState::Obstacle;
}

PlaneFit ransac_plane(std::span<const Point3> points, double inlier_threshold, int iterations,
                      std::uint64_t seed, RansacTrace* trace) {
  const std::size_t n = points.size();
  if (n < 3) throw FitFailure("RANSAC needs at least 3 points");
  if (!(inlier_threshold > 0.0) || iterations <= 0) {
    throw ContractViolation("RANSAC threshold and iteration count must be positive");
  }

  double extent = 0.0;
  for (const Point3& p : points) extent = std::max(extent, (p - points[0]).cwiseAbs().maxCoeff());
  const double degenerate_area = 1e-12 * std::max(extent * extent, 1e-12);

  SplitMix64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);

  std::optional<PlaneModel> best;
  std::size_t best_count = 0;
  for (int it = 0; it < iterations; ++it) {
    const std::size_t a = pick(rng);
    std::size_t b = pick(rng);
    while (b == a) b = pick(rng);
    std::size_t c = pick(rng);
    while (c == a || c == b) c = pick(rng);

    const Eigen::Vector3d normal = (points[b] - points[a]).cross(points[c] - points[a]);
    if (normal.norm() <= degenerate_area) {
      if (trace) ++trace->degenerate_samples;
      continue;
    }
    const PlaneModel candidate = PlaneModel::through(normal, points[a]);
    std::size_t count = 0;
    for (const Point3& p : points) count += candidate.distance(p) <= inlier_threshold ? 1 : 0;
    if (trace) trace->candidate_inlier_counts.push_back(count);
    if (!best || count > best_count) {
      best = candidate;
      best_count = count;
    }
    if (static_cast<double>(best_count) >= kEarlyExitInlierFraction * static_cast<double>(n)) {
      break;
    }
  }
  if (!best) throw FitFailure("all RANSAC samples were collinear");

  PlaneFit fit;
  fit.plane = *best;
  fit.inliers = collect_inliers(points, fit.plane, inlier_threshold);

  // Least-squares refit: plane through the inlier centroid, normal along the
  // smallest principal axis. Kept only if it does not lose inliers.
  if (fit.inliers.size() >= 3) {
    CovarianceAccumulator acc;
    for (const std::size_t i : fit.inliers) acc.add(points[i]);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(acc.covariance());
    if (solver.info() == Eigen::Success) {
      const PlaneModel refit = PlaneModel::through(solver.eigenvectors().col(0), acc.mean());
      auto refit_inliers = collect_inliers(points, refit, inlier_threshold);
      if (refit_inliers.size() >= fit.inliers.size()) {
        fit.plane = refit;
        fit.inliers = std::move(refit_inliers);
        if (trace) trace->refit_adopted = true;
      }
    }
  }
  fit.outliers = complement(fit.inliers, n);
  return fit;
}

GroundState classify_planar_cell(const PlaneModel& plane, double slope_threshold_deg) {
  return plane.slope_deg <= slope_threshold_deg ? GroundState::TentativeGround
                                                : GroundState::NonGround;
}

double bbox_sparsity_score(std::span<const Point3> points) {
  if (points.empty()) throw ContractViolation("sparsity of an empty point set");
  Eigen::Vector3d lo = points[0];
  Eigen::Vector3d hi = points[0];
  for (const Point3& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const Eigen::Vector3d extent = (hi - lo).cwiseMax(kMinBoxExtent);
  return extent.prod() / static_cast<double>(points.size());
}

SparsityClass bbox_sparsity(std::span<const Point3> points, const GeometryParams& params) {
  const double score = bbox_sparsity_score(points);
  if (score <= params.sparsity_low_max) return SparsityClass::Low;
  if (score <= params.sparsity_medium_max) return SparsityClass::Medium;
  return SparsityClass::High;
}

const char* to_string(SparsityClass s) {
  switch (s) {
    case SparsityClass::Low: return "low";
    case SparsityClass::Medium: return "medium";
    case SparsityClass::High: return "high";
  }
  return "?";
}

}  // namespace gseg3d
