#include <benchmark/benchmark.h>

#include <numbers>
#include <random>

#include "caloric/diagnostics/envelope.hpp"
#include "caloric/gauge/gauge.hpp"
#include "caloric/pipeline/initial_data.hpp"
#include "caloric/slflow/slflow.hpp"
#include "caloric/spectral/spectral.hpp"

namespace {

using namespace caloric;

spectral::Grid2 grid_for(const benchmark::State& state) {
  return spectral::Grid2(static_cast<int>(state.range(0)), 2.0 * std::numbers::pi);
}

heatflow::MapField bump(const spectral::Grid2& grid, target::TargetKind kind = target::TargetKind::Sphere2) {
  pipeline::InitialDataSpec spec;
  spec.grad_norm = 0.03;
  spec.width = 0.5;
  return pipeline::initial_data(spec, grid, target::make_target(kind)).u;
}

void BM_FftRoundTrip(benchmark::State& state) {
  const auto grid = grid_for(state);
  spectral::ScalarField f(grid);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  for (auto& v : f.values()) v = normal(rng);
  for (auto _ : state) benchmark::DoNotOptimize(spectral::dft_inverse(spectral::dft_forward(f)));
}
BENCHMARK(BM_FftRoundTrip)->Arg(64)->Arg(128)->Arg(256);

void BM_HeatStep(benchmark::State& state) {
  const auto grid = grid_for(state);
  const auto u = bump(grid);
  const double ds = 0.8 * heatflow::heat_stability_bound(u);
  for (auto _ : state) benchmark::DoNotOptimize(heatflow::heat_step(u, ds));
}
BENCHMARK(BM_HeatStep)->Arg(64)->Arg(128);

void BM_SLStep(benchmark::State& state) {
  const auto grid = grid_for(state);
  const auto u = bump(grid);
  const double dt = slflow::sl_stability_bound(grid);
  for (auto _ : state) benchmark::DoNotOptimize(slflow::sl_step(u, dt));
}
BENCHMARK(BM_SLStep)->Arg(64)->Arg(128);

void BM_FrameTransport(benchmark::State& state) {
  const auto grid = grid_for(state);
  const auto kind = state.range(1) == 0 ? target::TargetKind::Sphere2 : target::TargetKind::SphereProduct;
  const auto u = bump(grid, kind);
  const double ds = 0.5 * heatflow::heat_stability_bound(u);
  const auto v = heatflow::heat_step(u, ds);
  const auto frame = gauge::seed_frame(u, u.target().reference_frame());
  const auto tu = heatflow::tension(u), tv = heatflow::tension(v);
  for (auto _ : state) benchmark::DoNotOptimize(gauge::transport_frame(u, tu, frame, v, tv, ds));
}
BENCHMARK(BM_FrameTransport)->Args({64, 0})->Args({128, 0})->Args({64, 1});

void BM_EnvelopeFamily(benchmark::State& state) {
  const auto grid = grid_for(state);
  const auto u = bump(grid);
  for (auto _ : state) {
    const auto base = diagnostics::envelope_family(u.values());
    benchmark::DoNotOptimize(diagnostics::envelope_iterate(base, 4));
  }
}
BENCHMARK(BM_EnvelopeFamily)->Arg(64)->Arg(128);

}  // namespace
BENCHMARK_MAIN();
