#include "gseg3d/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>

namespace gseg3d {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since)
      .count();
}

std::vector<PointId> map_ids(const std::vector<std::size_t>& local,
                             const std::vector<PointId>& order) {
  std::vector<PointId> out;
  out.reserve(local.size());
  for (const std::size_t k : local) out.push_back(order[k]);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

void PipelineConfig::validate() const {
  phase1.cellsize.validate();
  phase2.cellsize.validate();
  phase1.geometry.validate();
  phase2.geometry.validate();
  phase1.expansion.validate();
  phase2.expansion.validate();
  if (!(phase1.cellsize.sz > phase2.cellsize.sz)) {
    throw ConfigError("phase 1 cell height must exceed phase 2 cell height");
  }
  if (!(dist_to_ground > 0.0)) throw ConfigError("distToGround must be positive");
  if (!(robot_radius >= 0.0)) throw ConfigError("robotRadius must be non-negative");
  if (!(seed_spacing > 0.0)) throw ConfigError("seedSpacing must be positive");
}

PipelineConfig make_default_config() {
  PipelineConfig cfg;
  cfg.phase1.cellsize = CellSize{1.5, 1.0, 1.5};
  cfg.phase2.cellsize = CellSize{1.5, 1.0, 0.2};
  for (PhaseConfig* p : {&cfg.phase1, &cfg.phase2}) {
    p->geometry = GeometryParams{};
    p->geometry.slope_threshold_deg = 30.0;
    p->geometry.inlier_threshold = 0.125;
    p->expansion.search_radius = 5.0;
    p->expansion.height_threshold = 0.125;
    p->expansion.ambiguity_elevation_threshold = 0.3;
  }
  cfg.phase1.expansion.phase = 1;
  cfg.phase2.expansion.phase = 2;
  cfg.dist_to_ground = 1.723;
  cfg.robot_radius = 2.7;
  cfg.seed_spacing = 0.3;
  cfg.global_seed = 0;
  return cfg;
}

std::uint64_t cell_seed(std::uint64_t global_seed, int phase, const CellIndex& index) {
  std::uint64_t h = splitmix64(global_seed ^ (static_cast<std::uint64_t>(phase) << 56));
  h = splitmix64(h ^ static_cast<std::uint64_t>(index.ix));
  h = splitmix64(h ^ static_cast<std::uint64_t>(index.iy));
  return splitmix64(h ^ static_cast<std::uint64_t>(index.iz));
}

void classify_cells(VoxelGrid& grid, std::span<const Point3> points, const GeometryParams& params,
                    int phase, std::uint64_t global_seed) {
  for (GridCell& cell : grid.cells()) {
    cell.plane.reset();
    cell.inlier_ids.clear();
    cell.outlier_ids.clear();
    if (cell.point_ids.size() < params.min_points_for_eigen) {
      cell.kind = CellKind::NonPlanar;
      cell.ground_state = GroundState::NonGround;
      continue;
    }
    const std::vector<PointId>& order = cell.canonical_ids;
    std::vector<Point3> coords;
    coords.reserve(order.size());
    for (const PointId id : order) coords.push_back(points[id]);

    const EigenClassification ec = eigen_classify(covariance(coords), params);
    cell.kind = ec.kind;
    switch (ec.kind) {
      case CellKind::Line:
        cell.ground_state = classify_line_cell(ec.summary.principal(), params.slope_threshold_deg);
        break;
      case CellKind::Planar: {
        try {
          const PlaneFit fit = ransac_plane(coords, params.inlier_threshold,
                                            params.ransac_iterations,
                                            cell_seed(global_seed, phase, cell.index));
          cell.plane = fit.plane;
          cell.inlier_ids = map_ids(fit.inliers, order);
          cell.outlier_ids = map_ids(fit.outliers, order);
          cell.ground_state = classify_planar_cell(fit.plane, params.slope_threshold_deg);
        } catch (const FitFailure&) {
          cell.kind = CellKind::NonPlanar;
          cell.ground_state = GroundState::NonGround;
        }
        break;
      }
      default:
        cell.ground_state = GroundState::NonGround;
        break;
    }
  }
}

PhaseOutput run_phase(std::span<const Point3> points, std::span<const PointId> ids,
                      const PhaseConfig& cfg, int phase, const SyntheticSeedInfo& seed_info,
                      std::uint64_t global_seed) {
  const auto start = std::chrono::steady_clock::now();
  PhaseOutput out;
  out.stats.input_points = ids.size();
  if (ids.empty()) return out;

  ExpansionParams expansion = cfg.expansion;
  expansion.phase = phase;

  out.grid = build_grid(points, ids, cfg.cellsize);
  classify_cells(out.grid, points, cfg.geometry, phase, global_seed);

  const CellId seed = select_seed(out.grid, seed_info);
  // The seed cell always starts the expansion, whatever its local geometry says.
  out.grid.cell(seed).ground_state = GroundState::TentativeGround;

  for (const GridCell& c : out.grid.cells()) {
    ++out.stats.cells;
    out.stats.line_cells += c.kind == CellKind::Line;
    out.stats.planar_cells += c.kind == CellKind::Planar;
    out.stats.nonplanar_cells += c.kind == CellKind::NonPlanar;
    out.stats.tentative_cells += c.ground_state == GroundState::TentativeGround;
  }

  const CentroidIndex index = build_centroid_index(out.grid);
  ExpansionResult ex = expand(out.grid, points, index, seed, expansion, cfg.geometry);

  out.ground = std::move(ex.ground);
  out.nonground = std::move(ex.nonground);
  out.nonground.insert(out.nonground.end(), ex.unreached.begin(), ex.unreached.end());
  sort_distinct_ids(out.nonground);
  for (const CellId c : ex.ground_cells) {
    const auto& pts = out.grid.cell(c).point_ids;
    out.ground_cell_points.insert(out.ground_cell_points.end(), pts.begin(), pts.end());
  }
  sort_distinct_ids(out.ground_cell_points);
  out.trace = std::move(ex.trace);

  out.stats.expanded_cells = ex.expanded_cells;
  out.stats.ground_cells = ex.ground_cells.size();
  out.stats.ground_points = out.ground.size();
  out.stats.nonground_points = out.nonground.size();
  out.stats.runtime_ms = elapsed_ms(start);
  return out;
}

SegmentationResult segment(const PointCloud& cloud, const PipelineConfig& cfg,
                           SegmentationTrace* trace) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  SegmentationResult result;
  if (cloud.empty()) return result;

  auto [augmented, seed_info] =
      inject_synthetic_seed(cloud, cfg.robot_radius, cfg.dist_to_ground, cfg.seed_spacing);
  const auto points = augmented.points();
  const std::size_t n_real = cloud.size();

  std::vector<PointId> all(augmented.size());
  std::iota(all.begin(), all.end(), PointId{0});
  PhaseOutput p1 = run_phase(points, all, cfg.phase1, 1, seed_info, cfg.global_seed);

  // Phase 2 sees every point of the cells phase 1 accepted, plus a fresh copy of
  // the synthetic seed (the synthetic tail is always re-included).
  std::vector<PointId> phase2_ids;
  phase2_ids.reserve(p1.ground_cell_points.size() + seed_info.count);
  for (const PointId id : p1.ground_cell_points) {
    if (id < n_real) phase2_ids.push_back(id);
  }
  for (std::size_t k = n_real; k < augmented.size(); ++k) {
    phase2_ids.push_back(static_cast<PointId>(k));
  }
  PhaseOutput p2 = run_phase(points, phase2_ids, cfg.phase2, 2, seed_info, cfg.global_seed);

  result.mask.assign(augmented.size(), 0);
  for (const PointId id : p2.ground) result.mask[id] = 1;
  result.stats.phase1 = p1.stats;
  result.stats.phase2 = p2.stats;
  result.stats.synthetic_points = seed_info.count;
  result = strip_synthetic(std::move(result), seed_info);
  result.stats.runtime_ms = elapsed_ms(start);

  if (trace != nullptr) {
    trace->phase1 = std::move(p1);
    trace->phase2 = std::move(p2);
  }
  return result;
}

}  // namespace gseg3d
