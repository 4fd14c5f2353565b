#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "gseg3d/errors.hpp"
#include "gseg3d/plane_model.hpp"
#include "gseg3d/point_cloud.hpp"

namespace gseg3d {

struct CellIndex {
  std::int64_t ix = 0;
  std::int64_t iy = 0;
  std::int64_t iz = 0;

  friend auto operator<=>(const CellIndex&, const CellIndex&) = default;
};

struct CellIndexHash {
  std::size_t operator()(const CellIndex& c) const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ull;
    for (std::int64_t v : {c.ix, c.iy, c.iz}) {
      h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

/// Cell edge lengths in meters.
struct CellSize {
  double sx = 1.0;
  double sy = 1.0;
  double sz = 1.0;

  void validate() const {
    if (!(sx > 0.0) || !(sy > 0.0) || !(sz > 0.0)) {
      throw ContractViolation("cell size components must be strictly positive");
    }
  }
};

enum class CellKind : std::uint8_t { Unclassified, Line, Planar, NonPlanar };

enum class GroundState : std::uint8_t { None, TentativeGround, Obstacle, Ground, NonGround };

using CellId = std::uint32_t;

struct GridCell {
  CellIndex index;
  /// Ascending source-cloud ids.
  std::vector<PointId> point_ids;
  /// The same ids ordered by coordinates (x, y, z); see canonical_order().
  std::vector<PointId> canonical_ids;
  Point3 centroid = Point3::Zero();
  CellKind kind = CellKind::Unclassified;
  GroundState ground_state = GroundState::None;
  std::optional<PlaneModel> plane;
  /// Set together with `plane`; both are ascending and partition point_ids.
  std::vector<PointId> inlier_ids;
  std::vector<PointId> outlier_ids;
};

/// floor(p / cellsize) per axis (toward -infinity).
CellIndex cell_index(const Point3& p, const CellSize& cellsize);

/// Sparse 3D grid over a set of cloud points.
///
/// Cells are stored in lexicographic CellIndex order, so a CellId depends only on
/// the occupied cells and never on the order in which points were supplied.
class VoxelGrid {
 public:
  VoxelGrid() = default;

  [[nodiscard]] const CellSize& cellsize() const noexcept { return cellsize_; }
  [[nodiscard]] std::size_t size() const noexcept { return cells_.size(); }
  [[nodiscard]] bool empty() const noexcept { return cells_.empty(); }

  [[nodiscard]] std::span<const GridCell> cells() const noexcept { return cells_; }
  [[nodiscard]] std::span<GridCell> cells() noexcept { return cells_; }
  [[nodiscard]] const GridCell& cell(CellId id) const { return cells_.at(id); }
  [[nodiscard]] GridCell& cell(CellId id) { return cells_.at(id); }

  [[nodiscard]] std::optional<CellId> find(const CellIndex& index) const;

  /// Occupied cell with the largest iz' < index.iz in column (ix, iy).
  [[nodiscard]] const GridCell* occupied_below(const CellIndex& index) const;
  [[nodiscard]] std::optional<CellId> occupied_below_id(const CellIndex& index) const;

  /// Ascending occupied iz values of a column; empty if the column is unoccupied.
  [[nodiscard]] std::span<const std::int64_t> column(std::int64_t ix, std::int64_t iy) const;

  friend VoxelGrid build_grid(std::span<const Point3> points, std::span<const PointId> ids,
                              const CellSize& cellsize);

 private:
  struct ColumnKey {
    std::int64_t ix;
    std::int64_t iy;
    bool operator==(const ColumnKey&) const = default;
  };
  struct ColumnHash {
    std::size_t operator()(const ColumnKey& k) const noexcept {
      return CellIndexHash{}(CellIndex{k.ix, k.iy, 0});
    }
  };

  CellSize cellsize_;
  std::vector<GridCell> cells_;
  std::unordered_map<CellIndex, CellId, CellIndexHash> lookup_;
  std::unordered_map<ColumnKey, std::vector<std::int64_t>, ColumnHash> columns_;
};

/// Grids the points named by `ids` (indices into `points`). Centroids are
/// accumulated in coordinate order, so they do not depend on input order either.
VoxelGrid build_grid(std::span<const Point3> points, std::span<const PointId> ids,
                     const CellSize& cellsize);

/// Grids every point of the cloud.
VoxelGrid build_grid(const PointCloud& cloud, const CellSize& cellsize);

/// Member ids of a cell ordered lexicographically by (x, y, z), ties by id.
/// Geometry computed in this order does not depend on how ids were assigned.
std::vector<PointId> canonical_order(const GridCell& cell, std::span<const Point3> points);

/// Member coordinates in canonical order.
std::vector<Point3> canonical_points(const GridCell& cell, std::span<const Point3> points);

}  // namespace gseg3d
