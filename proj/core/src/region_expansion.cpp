#include "gseg3d/region_expansion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <ostream>
#include <string>

namespace gseg3d {
namespace {

std::vector<Point3> gather(std::span<const PointId> ids, std::span<const Point3> points) {
  std::vector<Point3> out;
  out.reserve(ids.size());
  for (const PointId id : ids) out.push_back(points[id]);
  return out;
}

// Summed in sorted order so the result does not depend on id assignment.
double mean_z(std::span<const PointId> ids, std::span<const Point3> points) {
  std::vector<double> z;
  z.reserve(ids.size());
  for (const PointId id : ids) z.push_back(points[id].z());
  std::sort(z.begin(), z.end());
  double sum = 0.0;
  for (const double v : z) sum += v;
  return sum / static_cast<double>(z.size());
}

bool is_non_ground(GroundState s) {
  return s == GroundState::Obstacle || s == GroundState::NonGround;
}

void append_ids(std::vector<PointId>& dst, std::span<const PointId> src) {
  dst.insert(dst.end(), src.begin(), src.end());
}

}  // namespace

void ExpansionParams::validate() const {
  if (!(search_radius > 0.0)) throw ConfigError("centroidSearchRadius must be positive");
  if (!(height_threshold > 0.0)) throw ConfigError("height threshold must be positive");
  if (!(ambiguity_elevation_threshold > 0.0)) {
    throw ConfigError("ambiguityElevationThreshold must be positive");
  }
  if (phase != 1 && phase != 2) throw ConfigError("phase must be 1 or 2");
}

const char* to_string(RouteReason r) {
  switch (r) {
    case RouteReason::Ground: return "ground";
    case RouteReason::NoPlane: return "no-plane";
    case RouteReason::NoInliers: return "no-inliers";
    case RouteReason::NoGroundNeighbors: return "no-ground-neighbors";
    case RouteReason::Elevated: return "elevated";
    case RouteReason::FloatingCell: return "floating";
  }
  return "?";
}

CellId select_seed(const VoxelGrid& grid, const SyntheticSeedInfo& seed_info) {
  if (seed_info.count == 0) {
    throw ConfigError("no synthetic seed points were injected; cannot select a seed cell");
  }
  const CellIndex idx = cell_index(Point3(0.0, 0.0, -seed_info.depth), grid.cellsize());
  const auto id = grid.find(idx);
  if (!id) throw ConfigError("synthetic seed cell is not present in the grid");
  return *id;
}

double cell_height(const GridCell& cell, std::span<const Point3> points) {
  if (cell.plane && !cell.inlier_ids.empty()) return mean_z(cell.inlier_ids, points);
  return cell.centroid.z();
}

RouteDecision refine_cell(const GridCell& cell, const VoxelGrid& grid,
                          std::span<const Point3> points,
                          std::span<const double> neighbor_ground_heights,
                          const ExpansionParams& params, const GeometryParams& geometry) {
  RouteDecision d;
  // 1. inlier / outlier split from the stored plane fit
  if (!cell.plane) {
    d.reason = RouteReason::NoPlane;
    return d;
  }
  if (cell.inlier_ids.empty()) {
    d.reason = RouteReason::NoInliers;
    return d;
  }

  // 2. bounding-box sparsity of both subsets; an empty outlier set is unambiguous
  d.inlier_sparsity = bbox_sparsity(gather(cell.inlier_ids, points), geometry);
  if (!cell.outlier_ids.empty()) {
    d.outlier_sparsity = bbox_sparsity(gather(cell.outlier_ids, points), geometry);
  }
  d.ambiguous = d.outlier_sparsity && *d.outlier_sparsity == *d.inlier_sparsity;

  if (d.ambiguous) {
    // 3. compare against the lowest neighboring ground cell
    d.height = mean_z(cell.inlier_ids, points);
    if (neighbor_ground_heights.empty()) {
      d.reason = RouteReason::NoGroundNeighbors;
      return d;
    }
    const double lowest =
        *std::min_element(neighbor_ground_heights.begin(), neighbor_ground_heights.end());
    if (*d.height - lowest > params.ambiguity_elevation_threshold) {
      d.reason = RouteReason::Elevated;
      return d;
    }
    // 4. floating cell: non-ground structure underneath in the same column
    if (const GridCell* below = grid.occupied_below(cell.index);
        below != nullptr && is_non_ground(below->ground_state)) {
      d.reason = RouteReason::FloatingCell;
      return d;
    }
  }

  // 5. accepted
  d.ground = true;
  d.reason = RouteReason::Ground;
  return d;
}

ExpansionResult expand(VoxelGrid& grid, std::span<const Point3> points, const RadiusSearch& index,
                       CellId seed, const ExpansionParams& params,
                       const GeometryParams& geometry) {
  params.validate();
  if (seed >= grid.size()) throw ContractViolation("seed cell id out of range");
  if (grid.cell(seed).ground_state != GroundState::TentativeGround) {
    throw ContractViolation("expansion seed must be a tentative ground cell");
  }

  const std::size_t n_cells = grid.size();
  // Compact per-cell state so the neighbor scan does not touch GridCell.
  enum : std::uint8_t { kFresh = 0, kEnqueued = 1, kExpanded = 2 };
  std::vector<std::uint8_t> visit(n_cells, kFresh);
  std::vector<std::uint8_t> is_ground(n_cells, 0);
  std::vector<double> centroid_z(n_cells);
  for (CellId c = 0; c < n_cells; ++c) centroid_z[c] = grid.cell(c).centroid.z();
  std::vector<double> heights(n_cells, std::numeric_limits<double>::quiet_NaN());
  auto height_of = [&](CellId id) {
    if (std::isnan(heights[id])) heights[id] = cell_height(grid.cell(id), points);
    return heights[id];
  };

  ExpansionResult result;
  std::deque<CellId> queue{seed};
  visit[seed] = kEnqueued;
  grid.cell(seed).ground_state = GroundState::Ground;
  is_ground[seed] = 1;

  std::vector<double> neighbor_heights;
  while (!queue.empty()) {
    const CellId i = queue.front();
    queue.pop_front();
    visit[i] = kExpanded;
    ++result.expanded_cells;
    GridCell& cell = grid.cell(i);
    if (cell.point_ids.empty()) continue;

    const std::vector<CellId> neighbors = index.radius_query(cell.centroid, params.search_radius);
    neighbor_heights.clear();
    for (const CellId j : neighbors) {
      if (j == i) continue;
      if (visit[j] != kFresh) {
        if (is_ground[j]) neighbor_heights.push_back(height_of(j));
        continue;
      }
      const double dz = centroid_z[i] - centroid_z[j];
      if (params.phase == 2 && std::abs(dz) > params.height_threshold) continue;
      grid.cell(j).ground_state = GroundState::Ground;
      is_ground[j] = 1;
      visit[j] = kEnqueued;
      queue.push_back(j);
      result.trace.edges.push_back(ExpansionEdge{i, j, dz});
      neighbor_heights.push_back(height_of(j));
    }

    CellRouting routing;
    routing.cell = i;
    routing.decision = refine_cell(cell, grid, points, neighbor_heights, params, geometry);
    if (const auto below = grid.occupied_below_id(cell.index)) {
      routing.below = below;
      routing.below_state = grid.cell(*below).ground_state;
    }
    if (routing.decision.ground) {
      cell.ground_state = GroundState::Ground;
      append_ids(result.ground, cell.inlier_ids);
      append_ids(result.nonground, cell.outlier_ids);
      result.ground_cells.push_back(i);
    } else {
      cell.ground_state = GroundState::NonGround;
      is_ground[i] = 0;
      append_ids(result.nonground, cell.point_ids);
    }
    result.trace.routings.push_back(routing);
  }

  for (CellId c = 0; c < n_cells; ++c) {
    if (visit[c] != kExpanded) append_ids(result.unreached, grid.cell(c).point_ids);
  }
  sort_distinct_ids(result.ground);
  sort_distinct_ids(result.nonground);
  sort_distinct_ids(result.unreached);
  std::sort(result.ground_cells.begin(), result.ground_cells.end());
  return result;
}

void write_expansion_trace(std::ostream& out, const ExpansionTrace& trace,
                           const VoxelGrid& grid) {
  for (const auto& e : trace.edges) {
    out << "edge " << e.from << ' ' << e.to << ' ' << e.dz << '\n';
  }
  for (const auto& r : trace.routings) {
    const CellIndex& idx = grid.cell(r.cell).index;
    out << "route " << r.cell << ' ' << idx.ix << ' ' << idx.iy << ' ' << idx.iz << ' '
        << (r.decision.ground ? "ground" : "nonground") << ' ' << to_string(r.decision.reason)
        << ' ' << (r.decision.ambiguous ? 1 : 0) << ' '
        << (r.below ? std::to_string(*r.below) : std::string("-")) << '\n';
  }
}

}  // namespace gseg3d
