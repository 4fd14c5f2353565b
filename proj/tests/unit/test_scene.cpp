#include <gtest/gtest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "gseg3d/scene.hpp"

namespace gseg3d {
namespace {

TEST(Scene, FlatNoiselessPlaneIsAllRoad) {
  SceneSpec spec;
  spec.points = 5000;
  const Scene s = generate_scene(spec);
  ASSERT_EQ(s.cloud.size(), 5000u);
  ASSERT_EQ(s.labels.size(), s.cloud.size());
  for (std::size_t i = 0; i < s.cloud.size(); ++i) {
    EXPECT_EQ(s.labels[i], kSceneGroundLabel);
    EXPECT_EQ(s.cloud[i].z(), -spec.dist_to_ground);
  }
}

TEST(Scene, DeterministicUnderSeed) {
  SceneSpec spec;
  spec.points = 3000;
  spec.noise_sigma = 0.05;
  spec.boxes = {{3, 3, 1, 1, 1, 0}};
  const Scene a = generate_scene(spec);
  const Scene b = generate_scene(spec);
  EXPECT_EQ(a.labels, b.labels);
  for (std::size_t i = 0; i < a.cloud.size(); ++i) ASSERT_EQ(a.cloud[i], b.cloud[i]);
  spec.seed = 2;
  const Scene c = generate_scene(spec);
  bool differs = false;
  for (std::size_t i = 0; i < a.cloud.size() && !differs; ++i) differs = a.cloud[i] != c.cloud[i];
  EXPECT_TRUE(differs);
}

TEST(Scene, TiltedPlaneFollowsSurface) {
  SceneSpec spec;
  spec.slope_deg = 20.0;
  spec.points = 2000;
  const Scene s = generate_scene(spec);
  for (const auto& p : s.cloud.points()) {
    EXPECT_NEAR(p.z(), scene_ground_z(spec, p.x(), p.y()), 1e-9);
    EXPECT_NEAR(p.z(), -spec.dist_to_ground + std::tan(20.0 * M_PI / 180.0) * p.x(), 1e-9);
    EXPECT_LE(std::abs(p.x()), spec.extent / 2);
    EXPECT_LE(std::abs(p.y()), spec.extent / 2);
  }
}

TEST(Scene, BoxPointsLieOnBoxSurfaces) {
  SceneSpec spec;
  spec.points = 10000;
  const BoxObstacle box{5, -2, 2, 1, 1.5, 0.5};
  spec.boxes = {box};
  const Scene s = generate_scene(spec);
  std::size_t obstacles = 0;
  for (std::size_t i = 0; i < s.cloud.size(); ++i) {
    if (s.labels[i] != kSceneObstacleLabel) continue;
    ++obstacles;
    const auto& p = s.cloud[i];
    EXPECT_LE(std::abs(p.x() - box.cx), box.size_x / 2 + 1e-9);
    EXPECT_LE(std::abs(p.y() - box.cy), box.size_y / 2 + 1e-9);
    const double bottom = -spec.dist_to_ground + box.base;
    EXPECT_GE(p.z(), bottom - 1e-9);
    EXPECT_LE(p.z(), bottom + box.height + 1e-9);
  }
  EXPECT_GT(obstacles, 0u);
}

TEST(Scene, ManifestCarriesParameters) {
  SceneSpec spec;
  spec.slope_deg = 12.5;
  spec.seed = 42;
  spec.boxes = {{1, 2, 3, 4, 5, 6}};
  const auto j = nlohmann::json::parse(scene_manifest(spec));
  EXPECT_EQ(j.at("slope_deg").get<double>(), 12.5);
  EXPECT_EQ(j.at("seed").get<std::uint64_t>(), 42u);
  EXPECT_EQ(j.at("boxes").size(), 1u);
}

}  // namespace
}  // namespace gseg3d
