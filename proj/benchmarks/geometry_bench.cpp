#include <benchmark/benchmark.h>

#include "twinsim/geometry.hpp"
#include "twinsim/manifest.hpp"
#include "twinsim/selection.hpp"

using namespace twinsim;

static void BM_ComposeCameraMatrix(benchmark::State& state) {
  CameraPose pose;
  pose.orientation = Quaternion(0.3, -0.2, 0.9, 0.1);
  pose.translation = {1.0, -2.0, 3.0};
  pose.scale = {1.0, 2.0, 0.5};
  for (auto _ : state) {
    benchmark::DoNotOptimize(compose_camera_matrix(pose));
  }
}
BENCHMARK(BM_ComposeCameraMatrix);

static void BM_SampleIdeal(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_viewpoints(Scenario::Ideal, n, {}, 7));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleIdeal)->Arg(25)->Arg(100)->Arg(1000);

static void BM_CoverageMetrics(benchmark::State& state) {
  const auto vs = sample_viewpoints(Scenario::Disperse, static_cast<std::size_t>(state.range(0)), {}, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(coverage_metrics(vs));
  }
}
BENCHMARK(BM_CoverageMetrics)->Arg(25)->Arg(1000);

static void BM_ManifestJson(benchmark::State& state) {
  const auto vs = sample_viewpoints(Scenario::Ideal, 100, {}, 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(to_json(make_manifest(vs, 0.6911112070083618)));
  }
}
BENCHMARK(BM_ManifestJson);

static void BM_GreedySelection(benchmark::State& state) {
  std::vector<Candidate> cands;
  const auto topo = TopologyScenario::preset(RoadTopology::Intersection);
  for (std::uint32_t id = 0; id < static_cast<std::uint32_t>(state.range(0)); ++id) {
    Candidate c;
    c.contributor_id = id;
    c.planned = generate_topology_viewpoints(topo, 6, id);
    cands.push_back(std::move(c));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(select_contributors(cands, cands.size() / 2, SelectionPolicy::GreedyCoverage, 0));
  }
}
BENCHMARK(BM_GreedySelection)->Arg(12)->Arg(64);
