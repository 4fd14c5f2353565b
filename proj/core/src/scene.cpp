#include "gseg3d/scene.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <nlohmann/json.hpp>

#include "gseg3d/errors.hpp"

namespace gseg3d {
namespace {

struct Face {
  Point3 origin;
  Point3 u;  // edge vectors spanning the rectangle
  Point3 v;
  double area() const { return u.cross(v).norm(); }
};

bool inside_footprint(const BoxObstacle& b, double x, double y) {
  return std::abs(x - b.cx) <= 0.5 * b.size_x && std::abs(y - b.cy) <= 0.5 * b.size_y;
}

std::vector<Face> box_faces(const SceneSpec& spec, const BoxObstacle& b) {
  const double z0 = scene_ground_z(spec, b.cx, b.cy) + b.base;
  const double x0 = b.cx - 0.5 * b.size_x;
  const double y0 = b.cy - 0.5 * b.size_y;
  const Point3 ex(b.size_x, 0, 0), ey(0, b.size_y, 0), ez(0, 0, b.height);
  const Point3 o(x0, y0, z0);
  std::vector<Face> faces = {
      {o + ez, ex, ey},       // top
      {o, ex, ez},            // y-min wall
      {o + ey, ex, ez},       // y-max wall
      {o, ey, ez},            // x-min wall
      {o + ex, ey, ez},       // x-max wall
  };
  if (b.base > 0.0) faces.push_back({o, ex, ey});  // underside is visible when lifted
  return faces;
}

}  // namespace

double scene_ground_z(const SceneSpec& spec, double x, double /*y*/) {
  return -spec.dist_to_ground + std::tan(spec.slope_deg * std::numbers::pi / 180.0) * x;
}

Scene generate_scene(const SceneSpec& spec) {
  if (!(spec.extent > 0.0) || !(spec.noise_sigma >= 0.0) || spec.slope_deg < 0.0 ||
      spec.slope_deg >= 90.0) {
    throw ContractViolation("scene needs extent > 0, noise >= 0 and slope in [0, 90)");
  }
  const double half = 0.5 * spec.extent;
  const double cos_slope = std::cos(spec.slope_deg * std::numbers::pi / 180.0);

  double ground_area = spec.extent * spec.extent / cos_slope;
  std::vector<std::vector<Face>> faces;
  double obstacle_area = 0.0;
  for (const BoxObstacle& b : spec.boxes) {
    if (b.base == 0.0) ground_area -= b.size_x * b.size_y / cos_slope;
    faces.push_back(box_faces(spec, b));
    for (const Face& f : faces.back()) obstacle_area += f.area();
  }
  ground_area = std::max(ground_area, 0.0);
  const double total_area = ground_area + obstacle_area;

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, spec.noise_sigma > 0.0 ? spec.noise_sigma : 1.0);
  auto jitter = [&] { return spec.noise_sigma > 0.0 ? noise(rng) : 0.0; };

  std::vector<Point3> points;
  LabelArray labels;
  points.reserve(spec.points);
  labels.reserve(spec.points);

  std::size_t obstacle_points = 0;
  for (const auto& box : faces) {
    for (const Face& f : box) {
      const auto n = static_cast<std::size_t>(
          std::llround(static_cast<double>(spec.points) * f.area() / total_area));
      for (std::size_t k = 0; k < n; ++k) {
        const double a = unit(rng);
        const double b = unit(rng);
        Point3 p = f.origin + a * f.u + b * f.v;
        p.x() += jitter();
        p.y() += jitter();
        p.z() += jitter();
        points.push_back(p);
        labels.push_back(kSceneObstacleLabel);
      }
      obstacle_points += n;
    }
  }

  const std::size_t ground_points =
      spec.points > obstacle_points ? spec.points - obstacle_points : 0;
  std::size_t placed = 0;
  while (placed < ground_points) {
    const double x = -half + spec.extent * unit(rng);
    const double y = -half + spec.extent * unit(rng);
    bool covered = false;
    for (const BoxObstacle& b : spec.boxes) {
      if (b.base == 0.0 && inside_footprint(b, x, y)) {
        covered = true;
        break;
      }
    }
    if (covered) continue;
    points.emplace_back(x, y, scene_ground_z(spec, x, y) + jitter());
    labels.push_back(kSceneGroundLabel);
    ++placed;
  }

  return Scene{PointCloud(std::move(points), std::vector<float>(labels.size(), 0.0f)),
               std::move(labels)};
}

std::string scene_manifest(const SceneSpec& spec) {
  nlohmann::json boxes = nlohmann::json::array();
  for (const BoxObstacle& b : spec.boxes) {
    boxes.push_back({{"cx", b.cx},
                     {"cy", b.cy},
                     {"size_x", b.size_x},
                     {"size_y", b.size_y},
                     {"height", b.height},
                     {"base", b.base}});
  }
  const nlohmann::json doc{{"slope_deg", spec.slope_deg},
                           {"extent", spec.extent},
                           {"points", spec.points},
                           {"noise_sigma", spec.noise_sigma},
                           {"seed", spec.seed},
                           {"dist_to_ground", spec.dist_to_ground},
                           {"boxes", boxes},
                           {"labels", {{"ground", kSceneGroundLabel}, {"obstacle", kSceneObstacleLabel}}}};
  return doc.dump(2) + "\n";
}

}  // namespace gseg3d
