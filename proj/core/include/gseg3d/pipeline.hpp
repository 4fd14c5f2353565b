#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "gseg3d/cell_geometry.hpp"
#include "gseg3d/cloud_io.hpp"
#include "gseg3d/point_cloud.hpp"
#include "gseg3d/region_expansion.hpp"
#include "gseg3d/segmentation_result.hpp"
#include "gseg3d/voxel_grid.hpp"

namespace gseg3d {

struct PhaseConfig {
  CellSize cellsize;
  GeometryParams geometry;
  ExpansionParams expansion;
};

struct PipelineConfig {
  PhaseConfig phase1;
  PhaseConfig phase2;
  /// Sensor height above ground; synthetic seed points sit at z = -dist_to_ground.
  double dist_to_ground = 1.723;
  double robot_radius = 2.7;
  double seed_spacing = 0.3;
  std::uint64_t global_seed = 0;

  /// Throws ConfigError on inconsistent values.
  void validate() const;
};

/// Parameters used for the SemanticKITTI experiments: cells (1.5, 1.0, 1.5) and
/// (1.5, 1.0, 0.2), 30 degree slope, 0.125 m inliers, 5 m search radius.
PipelineConfig make_default_config();

struct PhaseOutput {
  /// Ascending, disjoint, together covering the phase input.
  std::vector<PointId> ground;
  std::vector<PointId> nonground;
  /// Points of every cell routed Ground (inliers and outliers), ascending.
  std::vector<PointId> ground_cell_points;
  PhaseStats stats;
  VoxelGrid grid;
  ExpansionTrace trace;
};

/// Runs grid -> eigen classification -> plane/slope gating -> expansion on the
/// points named by `ids`. `seed_info` locates the synthetic seed cell.
PhaseOutput run_phase(std::span<const Point3> points, std::span<const PointId> ids,
                      const PhaseConfig& cfg, int phase, const SyntheticSeedInfo& seed_info,
                      std::uint64_t global_seed);

/// Per-cell classification of a freshly built grid (kind, plane, tentative state).
void classify_cells(VoxelGrid& grid, std::span<const Point3> points, const GeometryParams& params,
                    int phase, std::uint64_t global_seed);

/// Deterministic RANSAC seed for one cell.
std::uint64_t cell_seed(std::uint64_t global_seed, int phase, const CellIndex& index);

/// Optional per-phase diagnostics of a segment() call.
struct SegmentationTrace {
  PhaseOutput phase1;
  PhaseOutput phase2;
};

/// Two-phase segmentation. The mask is aligned with `cloud`.
SegmentationResult segment(const PointCloud& cloud, const PipelineConfig& cfg,
                           SegmentationTrace* trace = nullptr);

}  // namespace gseg3d
