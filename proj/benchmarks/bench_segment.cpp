#include <benchmark/benchmark.h>

#include "gseg3d/pipeline.hpp"
#include "gseg3d/scene.hpp"

namespace {

void BM_Segment(benchmark::State& state) {
  gseg3d::SceneSpec spec;
  spec.points = static_cast<std::size_t>(state.range(0));
  spec.extent = 100.0;
  spec.noise_sigma = 0.03;
  spec.slope_deg = 2.0;
  spec.boxes = {{10, 5, 3, 3, 1.5, 0}, {-20, 12, 5, 2, 2.5, 0}, {30, -25, 4, 4, 1.0, 0},
                {-35, -30, 2, 6, 0.8, 0}, {5, -15, 6, 6, 0.1, 2.2}};
  const auto scene = gseg3d::generate_scene(spec);
  const auto cfg = gseg3d::make_default_config();
  for (auto _ : state) {
    auto result = gseg3d::segment(scene.cloud, cfg);
    benchmark::DoNotOptimize(result);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Segment)->Arg(20000)->Arg(60000)->Arg(120000)->Unit(benchmark::kMillisecond);

}  // namespace
