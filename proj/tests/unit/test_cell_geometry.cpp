#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "gseg3d/cell_geometry.hpp"
#include "gseg3d/errors.hpp"
#include "oracles.hpp"

namespace gseg3d {
namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;

std::vector<Point3> line_set() {
  std::vector<Point3> p;
  for (int i = 0; i < 20; ++i) p.emplace_back(0.1 * i, 0.05 * i, 0.0);
  return p;
}

std::vector<Point3> plane_set() {
  std::vector<Point3> p;
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) p.emplace_back(0.1 * i, 0.1 * j, 0.02 * i);
  }
  return p;
}

std::vector<Point3> cube_set() {
  std::vector<Point3> p;
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      for (int k = 0; k < 5; ++k) p.emplace_back(0.1 * i, 0.1 * j, 0.1 * k);
    }
  }
  return p;
}

TEST(Covariance, SinglePointIsZero) {
  const std::vector<Point3> p{Point3(3, -2, 7)};
  EXPECT_EQ(covariance(p), Eigen::Matrix3d::Zero());
}

TEST(Covariance, ThreeCollinearPoints) {
  const std::vector<Point3> p{Point3(0, 0, 0), Point3(1, 0, 0), Point3(2, 0, 0)};
  Eigen::Matrix3d expected = Eigen::Matrix3d::Zero();
  expected(0, 0) = 2.0 / 3.0;
  EXPECT_TRUE(covariance(p).isApprox(expected, 1e-15));
}

TEST(Covariance, EmptyIsContractViolation) {
  EXPECT_THROW(covariance(std::span<const Point3>{}), ContractViolation);
}

TEST(Covariance, StreamingMatchesTwoPass) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto p = testing::random_points(100, seed, 3.0, -1.0, 2.0);
    const Eigen::Matrix3d oracle = testing::two_pass_covariance(p);
    EXPECT_LE((covariance(p) - oracle).norm(), 1e-9 * oracle.norm());
  }
}

TEST(Covariance, TranslationInvariant) {
  const auto p = testing::random_points(200, 5, 2.0, -1.0, 1.0);
  auto shifted = p;
  for (auto& q : shifted) q += Point3(1000.0, -500.0, 20.0);
  EXPECT_LE((covariance(p) - covariance(shifted)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(EigenClassify, DiagonalExamples) {
  const GeometryParams params;
  EXPECT_EQ(eigen_classify(Eigen::Vector3d(1, 0, 0).asDiagonal().toDenseMatrix(), params).kind,
            CellKind::Line);
  const auto planar = eigen_classify(Eigen::Vector3d(1, 1, 0).asDiagonal().toDenseMatrix(), params);
  EXPECT_EQ(planar.kind, CellKind::Planar);
  EXPECT_DOUBLE_EQ(planar.summary.ratio, 0.5);
  EXPECT_DOUBLE_EQ(planar.summary.flatness, 0.0);
  const auto iso = eigen_classify(Eigen::Matrix3d::Identity(), params);
  EXPECT_EQ(iso.kind, CellKind::NonPlanar);
  EXPECT_NEAR(iso.summary.ratio, 1.0 / 3.0, 1e-15);
}

TEST(EigenClassify, ZeroMatrixIsNonPlanar) {
  EXPECT_EQ(eigen_classify(Eigen::Matrix3d::Zero(), GeometryParams{}).kind, CellKind::NonPlanar);
}

TEST(EigenClassify, NonSymmetricIsContractViolation) {
  Eigen::Matrix3d c = Eigen::Matrix3d::Identity();
  c(0, 1) = 0.5;
  EXPECT_THROW(eigen_classify(c, GeometryParams{}), ContractViolation);
}

TEST(EigenClassify, ConstructedPointSets) {
  const GeometryParams params;
  EXPECT_EQ(eigen_classify(covariance(line_set()), params).kind, CellKind::Line);
  EXPECT_EQ(eigen_classify(covariance(plane_set()), params).kind, CellKind::Planar);
  EXPECT_EQ(eigen_classify(covariance(cube_set()), params).kind, CellKind::NonPlanar);
}

TEST(EigenClassify, SummaryInvariantsOnRandomSets) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> scale(0.01, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    auto p = testing::random_points(3 + trial % 50, rng(), 1.0, -1.0, 1.0);
    const Point3 s(scale(rng), scale(rng), scale(rng));
    for (auto& q : p) q = q.cwiseProduct(s);
    const Eigen::Matrix3d c = covariance(p);
    const auto e = eigen_classify(c, GeometryParams{}).summary;
    EXPECT_GE(e.eigenvalues(0), e.eigenvalues(1));
    EXPECT_GE(e.eigenvalues(1), e.eigenvalues(2));
    EXPECT_GE(e.eigenvalues(2), 0.0);
    EXPECT_NEAR(e.eigenvalues.sum(), c.trace(), 1e-9 * c.trace());
    EXPECT_GE(e.ratio, 1.0 / 3.0 - 1e-12);
    EXPECT_LE(e.ratio, 1.0);
    EXPECT_TRUE((e.eigenvectors.transpose() * e.eigenvectors)
                    .isApprox(Eigen::Matrix3d::Identity(), 1e-6));
  }
}

TEST(GeometryParams, Validation) {
  GeometryParams p;
  EXPECT_NO_THROW(p.validate());
  p.line_ratio_min = 0.6;  // must exceed 2/3 to keep Line and Planar exclusive
  EXPECT_THROW(p.validate(), ConfigError);
  p = GeometryParams{};
  p.inlier_threshold = 0.0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = GeometryParams{};
  p.sparsity_medium_max = p.sparsity_low_max / 2;
  EXPECT_THROW(p.validate(), ConfigError);
}

TEST(LineCell, Examples) {
  EXPECT_EQ(classify_line_cell(Eigen::Vector3d(1, 0, 0), 30.0), GroundState::TentativeGround);
  EXPECT_EQ(classify_line_cell(Eigen::Vector3d(0, 0, 1), 30.0), GroundState::Obstacle);
  EXPECT_EQ(classify_line_cell(Eigen::Vector3d(1, 0, 1).normalized(), 30.0),
            GroundState::Obstacle);
  // sign of the direction does not matter
  EXPECT_EQ(classify_line_cell(Eigen::Vector3d(-1, 0, -0.1).normalized(), 30.0),
            GroundState::TentativeGround);
  EXPECT_THROW(classify_line_cell(Eigen::Vector3d::Zero(), 30.0), ContractViolation);
}

TEST(Ransac, NoiselessPlaneIsFixedPoint) {
  std::vector<Point3> p;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 50; ++i) p.emplace_back(u(rng), u(rng), 0.0);
  const PlaneFit fit = ransac_plane(p, 0.125, 50, 42);
  EXPECT_EQ(fit.inliers.size(), 50u);
  EXPECT_TRUE(fit.outliers.empty());
  EXPECT_NEAR(fit.plane.normal.z(), 1.0, 1e-12);
  EXPECT_NEAR(fit.plane.offset, 0.0, 1e-12);
  EXPECT_NEAR(fit.plane.slope_deg, 0.0, 1e-6);
}

TEST(Ransac, ElevatedPointIsOnlyOutlier) {
  std::vector<Point3> p;
  for (int i = 0; i < 50; ++i) p.emplace_back(0.1 * (i % 10) - 0.45, 0.2 * (i / 10) - 0.4, 0.0);
  p.emplace_back(0.0, 0.0, 1.0);
  const PlaneFit fit = ransac_plane(p, 0.125, 50, 3);
  EXPECT_EQ(fit.outliers, (std::vector<std::size_t>{50}));
  EXPECT_EQ(fit.inliers.size(), 50u);
}

TEST(Ransac, NoisyRampSlopeMatchesLeastSquares) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> xy(-0.7, 0.7);
  std::uniform_real_distribution<double> noise(-0.01, 0.01);
  std::vector<Point3> p;
  for (int i = 0; i < 200; ++i) {
    const double x = xy(rng);
    p.emplace_back(x, xy(rng), 0.05 * x + noise(rng));
  }
  const double oracle = testing::least_squares_slope_deg(p);
  EXPECT_NEAR(oracle, std::atan(0.05) * kDeg, 0.2);
  const PlaneFit fit = ransac_plane(p, 0.125, 50, 99);
  EXPECT_NEAR(fit.plane.slope_deg, oracle, 1.0);
}

TEST(Ransac, DeterministicForFixedSeed) {
  const auto p = testing::random_points(300, 12, 1.0, -0.3, 0.3);
  const PlaneFit a = ransac_plane(p, 0.1, 30, 5);
  const PlaneFit b = ransac_plane(p, 0.1, 30, 5);
  EXPECT_EQ(a.inliers, b.inliers);
  EXPECT_EQ(a.plane.normal, b.plane.normal);
  EXPECT_EQ(a.plane.offset, b.plane.offset);
}

TEST(Ransac, FinalInliersNotFewerThanAnyCandidate) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto p = testing::random_points(120, seed, 1.0, -0.5, 0.5);
    RansacTrace trace;
    const PlaneFit fit = ransac_plane(p, 0.1, 50, seed, &trace);
    ASSERT_FALSE(trace.candidate_inlier_counts.empty());
    for (const std::size_t c : trace.candidate_inlier_counts) EXPECT_GE(fit.inliers.size(), c);
    EXPECT_EQ(fit.inliers.size() + fit.outliers.size(), p.size());
  }
}

TEST(Ransac, SlopeInvariantUnderRotationAboutZ) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> xy(-1.0, 1.0);
  std::vector<Point3> p;
  for (int i = 0; i < 80; ++i) {
    const double x = xy(rng);
    const double y = xy(rng);
    p.emplace_back(x, y, 0.3 * x - 0.1 * y);
  }
  const double base = ransac_plane(p, 0.05, 50, 1).plane.slope_deg;
  for (double angle : {0.3, 1.1, 2.5, -2.0}) {
    const Eigen::Matrix3d r = Eigen::AngleAxisd(angle, Eigen::Vector3d::UnitZ()).toRotationMatrix();
    std::vector<Point3> q;
    for (const auto& v : p) q.push_back(r * v);
    EXPECT_NEAR(ransac_plane(q, 0.05, 50, 1).plane.slope_deg, base, 1e-6);
  }
}

TEST(Ransac, FailureCases) {
  const std::vector<Point3> two{Point3(0, 0, 0), Point3(1, 0, 0)};
  EXPECT_THROW(ransac_plane(two, 0.1, 10, 0), FitFailure);
  EXPECT_THROW(ransac_plane(line_set(), 0.1, 10, 0), FitFailure);
}

TEST(PlanarCell, Examples) {
  EXPECT_EQ(classify_planar_cell(PlaneModel::from_normal(Eigen::Vector3d(0, 0, 1), 0.0), 30.0),
            GroundState::TentativeGround);
  const PlaneModel steep = PlaneModel::from_normal(Eigen::Vector3d(1, 0, 1), 0.0);
  EXPECT_NEAR(steep.slope_deg, 45.0, 1e-12);
  EXPECT_EQ(classify_planar_cell(steep, 30.0), GroundState::NonGround);
  PlaneModel boundary;
  boundary.slope_deg = 30.0;
  EXPECT_EQ(classify_planar_cell(boundary, 30.0), GroundState::TentativeGround);
}

TEST(PlanarCell, AgreesWithBruteForceThreshold) {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> g;
  for (int i = 0; i < 1000; ++i) {
    const Eigen::Vector3d n(g(rng), g(rng), g(rng));
    const PlaneModel plane = PlaneModel::from_normal(n, 0.0);
    const double angle = std::acos(std::abs(n.z()) / n.norm()) * kDeg;
    const bool expected = angle <= 30.0;
    EXPECT_EQ(classify_planar_cell(plane, 30.0) == GroundState::TentativeGround, expected);
    EXPECT_GE(plane.normal.z(), 0.0);
    EXPECT_NEAR(plane.normal.norm(), 1.0, 1e-9);
  }
}

TEST(Sparsity, Examples) {
  const GeometryParams params;
  std::vector<Point3> box;
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      for (int k = 0; k < 10; ++k) box.emplace_back(i / 9.0, j / 9.0, 0.1 * k / 9.0);
    }
  }
  EXPECT_NEAR(bbox_sparsity_score(box), 1e-4, 1e-15);
  EXPECT_EQ(bbox_sparsity(box, params), SparsityClass::Low);

  const std::vector<Point3> spread{Point3(0, 0, 0), Point3(2, 2, 2), Point3(1, 0, 1),
                                   Point3(0, 2, 0), Point3(2, 0, 2)};
  EXPECT_NEAR(bbox_sparsity_score(spread), 1.6, 1e-12);
  EXPECT_EQ(bbox_sparsity(spread, params), SparsityClass::High);

  const std::vector<Point3> single{Point3(5, 5, 5)};
  EXPECT_NEAR(bbox_sparsity_score(single), 1e-6, 1e-18);
  EXPECT_EQ(bbox_sparsity(single, params), SparsityClass::Low);

  EXPECT_THROW(bbox_sparsity_score(std::span<const Point3>{}), ContractViolation);
  EXPECT_LT(SparsityClass::Low, SparsityClass::Medium);
  EXPECT_LT(SparsityClass::Medium, SparsityClass::High);
}

}  // namespace
}  // namespace gseg3d
