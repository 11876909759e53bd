#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "mdh/dataset.hpp"
#include "mdh/geometry.hpp"
#include "mdh/kde1d.hpp"
#include "mdh/objective.hpp"
#include "mdh/optimizer.hpp"

namespace {

std::vector<double> normal_points(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> p(n);
  for (auto& x : p) x = noise(rng);
  return p;
}

// Two separated Gaussian clouds in d dimensions, centred.
mdh::Dataset two_clouds(std::size_t n, Eigen::Index d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  mdh::Matrix rows(static_cast<Eigen::Index>(n), d);
  for (Eigen::Index i = 0; i < rows.rows(); ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      rows(i, j) = noise(rng) + (j == 0 && i % 2 == 0 ? 5.0 : 0.0);
  rows.rowwise() -= rows.colwise().mean();
  return mdh::Dataset(rows);
}

void BM_DensityIntegral(benchmark::State& state) {
  const mdh::ProjectedKde kde(normal_points(static_cast<std::size_t>(state.range(0)), 1), 0.3);
  double b = -0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mdh::density_integral(kde, b));
    b = b > 0.5 ? -0.5 : b + 1e-3;
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_DensityIntegral)->RangeMultiplier(4)->Range(64, 16384)->Complexity(benchmark::oN);

void BM_GridEvaluate(benchmark::State& state) {
  const auto mode = state.range(1) == 0 ? mdh::GridMode::kDirect : mdh::GridMode::kBinned;
  const mdh::ProjectedKde kde(normal_points(static_cast<std::size_t>(state.range(0)), 2), 0.3);
  for (auto _ : state)
    benchmark::DoNotOptimize(mdh::grid_evaluate(kde, -4.0, 4.0, 256, mode));
  state.SetLabel(state.range(1) == 0 ? "direct" : "binned");
}
BENCHMARK(BM_GridEvaluate)->ArgsProduct({{256, 4096, 65536}, {0, 1}});

void BM_ProjectionIndex(benchmark::State& state) {
  const auto d = static_cast<Eigen::Index>(state.range(1));
  const mdh::Dataset ds = two_clouds(static_cast<std::size_t>(state.range(0)), d, 3);
  const double h = mdh::default_bandwidth(ds);
  const auto pp = mdh::PenaltyParams::for_bandwidth(h, 0.9);
  mdh::ProjectionAngle angle{mdh::Vector::Constant(d - 1, 0.7)};
  for (auto _ : state)
    benchmark::DoNotOptimize(mdh::phi_value_and_gradient(angle, ds, h, pp).value);
}
BENCHMARK(BM_ProjectionIndex)->ArgsProduct({{200, 2000}, {2, 10}});

void BM_Clustering(benchmark::State& state) {
  const mdh::Dataset ds = two_clouds(static_cast<std::size_t>(state.range(0)), 5, 4);
  mdh::MdhConfig cfg;
  cfg.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(mdh::mdp2_cluster(ds, cfg).density_integral);
}
BENCHMARK(BM_Clustering)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
