#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "gseg3d/point_cloud.hpp"

namespace gseg3d {

inline constexpr std::uint16_t kSceneGroundLabel = 40;    // SemanticKITTI "road"
inline constexpr std::uint16_t kSceneObstacleLabel = 1;   // SemanticKITTI "outlier"

/// Axis-aligned box. `base` lifts the bottom face above the ground surface,
/// which turns a thin box into a floating slab.
struct BoxObstacle {
  double cx = 0.0;
  double cy = 0.0;
  double size_x = 1.0;
  double size_y = 1.0;
  double height = 1.0;
  double base = 0.0;
};

/// Synthetic scene: a square ground plane of side `extent` centered on the
/// sensor, tilted by `slope_deg` about the y axis, z = -dist_to_ground + tan(slope) x,
/// plus box obstacles. Points are spread uniformly over all visible surfaces.
struct SceneSpec {
  double slope_deg = 0.0;
  double extent = 30.0;
  std::size_t points = 20000;
  std::vector<BoxObstacle> boxes;
  double noise_sigma = 0.0;
  std::uint64_t seed = 1;
  double dist_to_ground = 1.723;
};

struct Scene {
  PointCloud cloud;
  LabelArray labels;
};

/// Deterministic for a given spec (including seed).
Scene generate_scene(const SceneSpec& spec);

/// Ground surface height below (x, y).
double scene_ground_z(const SceneSpec& spec, double x, double y);

/// JSON manifest of the generation parameters.
std::string scene_manifest(const SceneSpec& spec);

}  // namespace gseg3d
