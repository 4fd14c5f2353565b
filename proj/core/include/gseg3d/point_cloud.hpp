#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "gseg3d/errors.hpp"

namespace gseg3d {

using Point3 = Eigen::Vector3d;
using PointId = std::uint32_t;

/// Sensor-frame scan. Coordinates are meters, the sensor sits at the origin.
///
/// Intensity is optional; when present it is aligned with the points. The cloud
/// also remembers which raw records were dropped at parse time so that label
/// files (which are aligned with the raw records) can be re-aligned.
class PointCloud {
 public:
  PointCloud() = default;
  explicit PointCloud(std::vector<Point3> points) : points_(std::move(points)) {}
  PointCloud(std::vector<Point3> points, std::vector<float> intensity)
      : points_(std::move(points)), intensity_(std::move(intensity)) {
    if (!intensity_.empty() && intensity_.size() != points_.size()) {
      throw ContractViolation("intensity length does not match point count");
    }
  }

  [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
  [[nodiscard]] bool empty() const noexcept { return points_.empty(); }

  [[nodiscard]] std::span<const Point3> points() const noexcept { return points_; }
  [[nodiscard]] const Point3& operator[](std::size_t i) const { return points_[i]; }

  [[nodiscard]] bool has_intensity() const noexcept { return !intensity_.empty(); }
  [[nodiscard]] std::span<const float> intensity() const noexcept { return intensity_; }

  /// Raw record indices (0-based, in file order) that were dropped as non-finite.
  [[nodiscard]] std::span<const std::size_t> dropped_records() const noexcept {
    return dropped_records_;
  }
  void set_dropped_records(std::vector<std::size_t> dropped) {
    dropped_records_ = std::move(dropped);
  }

  /// Appends points; if the cloud carries intensity, the new points get 0.
  void append(std::span<const Point3> extra) {
    points_.insert(points_.end(), extra.begin(), extra.end());
    if (!intensity_.empty()) intensity_.resize(points_.size(), 0.0f);
  }

 private:
  std::vector<Point3> points_;
  std::vector<float> intensity_;
  std::vector<std::size_t> dropped_records_;
};

/// Per-point semantic class ids (lower 16 bits of a SemanticKITTI label word).
using LabelArray = std::vector<std::uint16_t>;

/// Sorts a list of distinct ids ascending. Dense lists are ordered by a
/// linear bitmap scan instead of a comparison sort.
void sort_distinct_ids(std::vector<PointId>& ids);

}  // namespace gseg3d
