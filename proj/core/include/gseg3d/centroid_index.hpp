#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gseg3d/point_cloud.hpp"
#include "gseg3d/voxel_grid.hpp"

namespace gseg3d {

/// Fixed-radius neighbor search over cell centroids.
class RadiusSearch {
 public:
  virtual ~RadiusSearch() = default;
  /// Ids of every entry whose centroid lies within `radius` (inclusive) of
  /// `center`, in ascending order.
  [[nodiscard]] virtual std::vector<CellId> radius_query(const Point3& center,
                                                         double radius) const = 0;
};

struct CentroidEntry {
  CellId cell = 0;
  Point3 centroid = Point3::Zero();
};

/// Static 3D kd-tree with exact radius queries.
class CentroidIndex final : public RadiusSearch {
 public:
  CentroidIndex() = default;
  explicit CentroidIndex(std::vector<CentroidEntry> entries, std::size_t leaf_size = 8);

  [[nodiscard]] std::vector<CellId> radius_query(const Point3& center,
                                                 double radius) const override;

  [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
  [[nodiscard]] bool empty() const noexcept { return entries_.empty(); }

 private:
  struct Node {
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    int axis = -1;  // -1 marks a leaf
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    // bounding box of the node's centroids
    Point3 lo = Point3::Zero();
    Point3 hi = Point3::Zero();
  };

  std::uint32_t build(std::uint32_t begin, std::uint32_t end);
  void query(std::uint32_t node, const Point3& center, double r2, std::vector<CellId>& out) const;

  std::size_t leaf_size_ = 8;
  std::vector<CentroidEntry> entries_;
  std::vector<Node> nodes_;
};

/// Indexes the centroids of every TentativeGround cell of `grid`.
CentroidIndex build_centroid_index(const VoxelGrid& grid);

}  // namespace gseg3d
