#pragma once

#include <cmath>
#include <numbers>

#include <Eigen/Core>

namespace gseg3d {

/// Plane n.p + offset = 0 with n a unit vector oriented so that n.z >= 0.
struct PlaneModel {
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
  double offset = 0.0;
  /// Angle between the normal and +z, degrees in [0, 90].
  double slope_deg = 0.0;

  /// Normalizes and orients `n`; slope is computed with atan2, which stays
  /// accurate for near-vertical normals where acos(n.z) loses precision.
  static PlaneModel from_normal(Eigen::Vector3d n, double offset) {
    const double len = n.norm();
    n /= len;
    offset /= len;
    if (n.z() < 0.0) {
      n = -n;
      offset = -offset;
    }
    const double horiz = std::hypot(n.x(), n.y());
    return PlaneModel{n, offset, std::atan2(horiz, n.z()) * 180.0 / std::numbers::pi};
  }

  /// Plane through `point` with normal `n`.
  static PlaneModel through(const Eigen::Vector3d& n, const Eigen::Vector3d& point) {
    return from_normal(n, -n.dot(point));
  }

  [[nodiscard]] double signed_distance(const Eigen::Vector3d& p) const {
    return normal.dot(p) + offset;
  }
  [[nodiscard]] double distance(const Eigen::Vector3d& p) const {
    return std::abs(signed_distance(p));
  }
};

}  // namespace gseg3d
