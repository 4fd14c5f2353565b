#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "gseg3d/cell_geometry.hpp"
#include "gseg3d/centroid_index.hpp"
#include "gseg3d/cloud_io.hpp"
#include "gseg3d/voxel_grid.hpp"

namespace gseg3d {

struct ExpansionParams {
  /// Centroid search radius r, meters.
  double search_radius = 5.0;
  /// Phase-2 admission gate on centroid height difference (tau), meters.
  double height_threshold = 0.125;
  /// How far an ambiguous cell may sit above its lowest ground neighbor, meters.
  double ambiguity_elevation_threshold = 0.3;
  int phase = 1;

  void validate() const;
};

/// Cell holding the synthetic point (0, 0, -depth). Throws ConfigError when the
/// seed was not injected or its cell is absent from the grid.
CellId select_seed(const VoxelGrid& grid, const SyntheticSeedInfo& seed_info);

enum class RouteReason {
  Ground,
  NoPlane,
  NoInliers,
  NoGroundNeighbors,
  Elevated,
  FloatingCell,
};

const char* to_string(RouteReason r);

struct RouteDecision {
  bool ground = false;
  RouteReason reason = RouteReason::NoPlane;
  /// Inlier and outlier sparsity classes matched (only meaningful once the
  /// cell had a plane and inliers).
  bool ambiguous = false;
  std::optional<SparsityClass> inlier_sparsity;
  std::optional<SparsityClass> outlier_sparsity;
  /// Ground inlier mean height, when computed.
  std::optional<double> height;
};

/// Five-step refinement of one dequeued cell. `neighbor_ground_heights` are the
/// heights of ground cells found by the same radius query.
RouteDecision refine_cell(const GridCell& cell, const VoxelGrid& grid,
                          std::span<const Point3> points,
                          std::span<const double> neighbor_ground_heights,
                          const ExpansionParams& params, const GeometryParams& geometry);

/// Mean z of a cell's ground inliers, or its centroid z when it has no plane.
double cell_height(const GridCell& cell, std::span<const Point3> points);

struct ExpansionEdge {
  CellId from = 0;
  CellId to = 0;
  double dz = 0.0;
};

struct CellRouting {
  CellId cell = 0;
  RouteDecision decision;
  /// Nearest occupied cell below and its state when the decision was taken.
  std::optional<CellId> below;
  GroundState below_state = GroundState::None;
};

struct ExpansionTrace {
  std::vector<ExpansionEdge> edges;
  std::vector<CellRouting> routings;
};

struct ExpansionResult {
  /// Ascending point ids.
  std::vector<PointId> ground;
  std::vector<PointId> nonground;
  /// Points of cells the expansion never dequeued.
  std::vector<PointId> unreached;
  /// Cells routed Ground, ascending.
  std::vector<CellId> ground_cells;
  std::size_t expanded_cells = 0;
  ExpansionTrace trace;
};

/// Breadth-first ground region expansion from `seed` over the centroids in
/// `index`. Updates each visited cell's ground_state (Ground or NonGround).
/// Throws ContractViolation if the seed is not TentativeGround.
ExpansionResult expand(VoxelGrid& grid, std::span<const Point3> points, const RadiusSearch& index,
                       CellId seed, const ExpansionParams& params,
                       const GeometryParams& geometry);

/// Line-oriented dump: "edge <from> <to> <dz>" and
/// "route <cell> <ix> <iy> <iz> <ground|nonground> <reason> <ambiguous> <below>".
void write_expansion_trace(std::ostream& out, const ExpansionTrace& trace,
                           const VoxelGrid& grid);

}  // namespace gseg3d
