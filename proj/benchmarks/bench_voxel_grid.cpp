#include <benchmark/benchmark.h>

#include "gseg3d/pipeline.hpp"
#include "gseg3d/scene.hpp"
#include "gseg3d/voxel_grid.hpp"

namespace {

gseg3d::Scene scan_sized_scene(std::size_t points) {
  gseg3d::SceneSpec spec;
  spec.points = points;
  spec.extent = 100.0;
  spec.noise_sigma = 0.03;
  spec.boxes = {{10, 5, 3, 3, 1.5, 0}, {-20, 12, 5, 2, 2.5, 0}, {30, -25, 4, 4, 1.0, 0}};
  return gseg3d::generate_scene(spec);
}

void BM_BuildGrid(benchmark::State& state) {
  const auto scene = scan_sized_scene(static_cast<std::size_t>(state.range(0)));
  const auto cfg = gseg3d::make_default_config();
  const auto& cellsize = state.range(1) == 1 ? cfg.phase1.cellsize : cfg.phase2.cellsize;
  for (auto _ : state) {
    auto grid = gseg3d::build_grid(scene.cloud, cellsize);
    benchmark::DoNotOptimize(grid);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BuildGrid)->Args({20000, 1})->Args({120000, 1})->Args({120000, 2})
    ->Unit(benchmark::kMillisecond);

void BM_ClassifyCells(benchmark::State& state) {
  const auto scene = scan_sized_scene(120000);
  const auto cfg = gseg3d::make_default_config();
  const auto grid = gseg3d::build_grid(scene.cloud, cfg.phase1.cellsize);
  for (auto _ : state) {
    auto g = grid;
    gseg3d::classify_cells(g, scene.cloud.points(), cfg.phase1.geometry, 1, 0);
    benchmark::DoNotOptimize(g);
  }
}
BENCHMARK(BM_ClassifyCells)->Unit(benchmark::kMillisecond);

}  // namespace
