#include "gseg3d/voxel_grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

namespace gseg3d {
namespace {

bool lex_less(const Point3& a, const Point3& b) {
  if (a.x() != b.x()) return a.x() < b.x();
  if (a.y() != b.y()) return a.y() < b.y();
  return a.z() < b.z();
}

}  // namespace

CellIndex cell_index(const Point3& p, const CellSize& cellsize) {
  return CellIndex{static_cast<std::int64_t>(std::floor(p.x() / cellsize.sx)),
                   static_cast<std::int64_t>(std::floor(p.y() / cellsize.sy)),
                   static_cast<std::int64_t>(std::floor(p.z() / cellsize.sz))};
}

std::optional<CellId> VoxelGrid::find(const CellIndex& index) const {
  const auto it = lookup_.find(index);
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

std::span<const std::int64_t> VoxelGrid::column(std::int64_t ix, std::int64_t iy) const {
  const auto it = columns_.find(ColumnKey{ix, iy});
  if (it == columns_.end()) return {};
  return it->second;
}

std::optional<CellId> VoxelGrid::occupied_below_id(const CellIndex& index) const {
  const auto levels = column(index.ix, index.iy);
  const auto it = std::lower_bound(levels.begin(), levels.end(), index.iz);
  if (it == levels.begin()) return std::nullopt;
  return find(CellIndex{index.ix, index.iy, *std::prev(it)});
}

const GridCell* VoxelGrid::occupied_below(const CellIndex& index) const {
  const auto id = occupied_below_id(index);
  return id ? &cells_[*id] : nullptr;
}

VoxelGrid build_grid(std::span<const Point3> points, std::span<const PointId> ids,
                     const CellSize& cellsize) {
  cellsize.validate();
  VoxelGrid grid;
  grid.cellsize_ = cellsize;

  // Bucket points by cell with a counting sort over the ranks of the
  // (sorted) distinct cell indices.
  std::vector<std::uint32_t> slot_of(ids.size());
  std::vector<CellIndex> slot_keys;
  std::unordered_map<CellIndex, std::uint32_t, CellIndexHash> slots;
  slots.reserve(ids.size() / 4 + 16);
  for (std::size_t k = 0; k < ids.size(); ++k) {
    if (ids[k] >= points.size()) throw ContractViolation("point id out of range in build_grid");
    const CellIndex key = cell_index(points[ids[k]], cellsize);
    const auto [it, inserted] = slots.try_emplace(key, static_cast<std::uint32_t>(slot_keys.size()));
    if (inserted) slot_keys.push_back(key);
    slot_of[k] = it->second;
  }

  const std::size_t n_cells = slot_keys.size();
  std::vector<std::uint32_t> by_rank(n_cells);
  std::iota(by_rank.begin(), by_rank.end(), 0u);
  std::sort(by_rank.begin(), by_rank.end(),
            [&](std::uint32_t a, std::uint32_t b) { return slot_keys[a] < slot_keys[b]; });
  std::vector<std::uint32_t> rank_of(n_cells);
  for (std::uint32_t r = 0; r < n_cells; ++r) rank_of[by_rank[r]] = r;

  std::vector<std::size_t> offset(n_cells + 1, 0);
  for (const std::uint32_t s : slot_of) ++offset[rank_of[s] + 1];
  std::partial_sum(offset.begin(), offset.end(), offset.begin());
  std::vector<PointId> bucketed(ids.size());
  {
    std::vector<std::size_t> cursor(offset.begin(), offset.end() - 1);
    for (std::size_t k = 0; k < ids.size(); ++k) bucketed[cursor[rank_of[slot_of[k]]]++] = ids[k];
  }

  grid.cells_.reserve(n_cells);
  grid.lookup_.reserve(n_cells);
  for (std::uint32_t r = 0; r < n_cells; ++r) {
    GridCell cell;
    cell.index = slot_keys[by_rank[r]];
    cell.point_ids.assign(bucketed.begin() + static_cast<std::ptrdiff_t>(offset[r]),
                          bucketed.begin() + static_cast<std::ptrdiff_t>(offset[r + 1]));
    std::sort(cell.point_ids.begin(), cell.point_ids.end());
    if (std::adjacent_find(cell.point_ids.begin(), cell.point_ids.end()) !=
        cell.point_ids.end()) {
      throw ContractViolation("duplicate point id in build_grid");
    }
    cell.canonical_ids = canonical_order(cell, points);
    Point3 sum = Point3::Zero();
    for (const PointId id : cell.canonical_ids) sum += points[id];
    cell.centroid = sum / static_cast<double>(cell.canonical_ids.size());

    const auto id = static_cast<CellId>(grid.cells_.size());
    grid.lookup_.emplace(cell.index, id);
    // cells arrive sorted, so each column's iz list comes out ascending
    grid.columns_[VoxelGrid::ColumnKey{cell.index.ix, cell.index.iy}].push_back(cell.index.iz);
    grid.cells_.push_back(std::move(cell));
  }
  return grid;
}

VoxelGrid build_grid(const PointCloud& cloud, const CellSize& cellsize) {
  std::vector<PointId> ids(cloud.size());
  std::iota(ids.begin(), ids.end(), PointId{0});
  return build_grid(cloud.points(), ids, cellsize);
}

std::vector<PointId> canonical_order(const GridCell& cell, std::span<const Point3> points) {
  std::vector<PointId> order = cell.point_ids;
  std::sort(order.begin(), order.end(), [&](PointId a, PointId b) {
    if (lex_less(points[a], points[b])) return true;
    if (lex_less(points[b], points[a])) return false;
    return a < b;
  });
  return order;
}

std::vector<Point3> canonical_points(const GridCell& cell, std::span<const Point3> points) {
  const std::vector<PointId> order =
      cell.canonical_ids.size() == cell.point_ids.size() ? cell.canonical_ids
                                                         : canonical_order(cell, points);
  std::vector<Point3> out;
  out.reserve(order.size());
  for (const PointId id : order) out.push_back(points[id]);
  return out;
}

}  // namespace gseg3d
