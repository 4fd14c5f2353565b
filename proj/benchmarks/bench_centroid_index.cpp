#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "gseg3d/centroid_index.hpp"

namespace {

using gseg3d::CentroidEntry;
using gseg3d::CentroidIndex;
using gseg3d::Point3;

std::vector<CentroidEntry> random_entries(std::size_t n) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> xy(-50.0, 50.0);
  std::uniform_real_distribution<double> z(-2.0, 1.0);
  std::vector<CentroidEntry> entries(n);
  for (std::size_t i = 0; i < n; ++i) entries[i] = {static_cast<gseg3d::CellId>(i), Point3(xy(rng), xy(rng), z(rng))};
  return entries;
}

void BM_CentroidIndexBuild(benchmark::State& state) {
  const auto entries = random_entries(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    CentroidIndex index(entries);
    benchmark::DoNotOptimize(index);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CentroidIndexBuild)->Arg(1000)->Arg(10000)->Arg(50000);

void BM_CentroidIndexRadiusQuery(benchmark::State& state) {
  const auto entries = random_entries(static_cast<std::size_t>(state.range(0)));
  const CentroidIndex index(entries);
  std::size_t k = 0;
  for (auto _ : state) {
    auto hits = index.radius_query(entries[k++ % entries.size()].centroid, 5.0);
    benchmark::DoNotOptimize(hits);
  }
}
BENCHMARK(BM_CentroidIndexRadiusQuery)->Arg(1000)->Arg(10000)->Arg(50000);

}  // namespace
