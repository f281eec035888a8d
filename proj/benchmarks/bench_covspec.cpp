#include <benchmark/benchmark.h>

#include "covspec/lss_moments.hpp"
#include "covspec/montecarlo.hpp"
#include "covspec/stieltjes.hpp"

using namespace covspec;

namespace {

void BM_SolveSinglePoint(benchmark::State& state) {
  const auto r = make_ratios(100, 400);
  const SpectralMeasure H({0.5, 1.0}, {0.5, 0.5});
  const cplx z(0.5, 1.0 / static_cast<double>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve(z, r, H).m);
  }
}
BENCHMARK(BM_SolveSinglePoint)->Arg(10)->Arg(1000)->Arg(100000);

void BM_DensityCurve(benchmark::State& state) {
  const auto r = make_ratios(200, 800);
  const auto H = identity_measure();
  const auto grid = uniform_grid(0.0, 1.05, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(density_curve(r, H, grid).density.size());
  }
}
BENCHMARK(BM_DensityCurve)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_LssMeanContour(benchmark::State& state) {
  const auto r = make_ratios(100, 400);
  const KernelContext ctx(r, identity_measure(), make_moment_profile(1.0, 0.0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(lss_mean(tf_square(), ctx, Contour::circle(1.05)));
  }
}
BENCHMARK(BM_LssMeanContour)->Unit(benchmark::kMillisecond);

void BM_LssCovDoubleContour(benchmark::State& state) {
  const auto r = make_ratios(100, 400);
  const KernelContext ctx(r, identity_measure(), make_moment_profile(1.0, 0.0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(lss_cov(tf_identity(), tf_square(), ctx,
                                     Contour::circle(1.10),
                                     Contour::circle(1.05)));
  }
}
BENCHMARK(BM_LssCovDoubleContour)->Unit(benchmark::kMillisecond);

void BM_RenormalizedSpectrum(benchmark::State& state) {
  const auto n = state.range(0);
  EntryDistribution dist;
  auto rng = replicate_rng(1, 0);
  const auto X = generate(4 * n, n, dist, SigmaSpec::identity(), rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(renormalized_spectrum(X).size());
  }
}
BENCHMARK(BM_RenormalizedSpectrum)->Arg(50)->Arg(200)
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
