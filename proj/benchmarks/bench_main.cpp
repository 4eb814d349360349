#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "roughfilter/filter.hpp"
#include "roughfilter/rde.hpp"

using namespace rf;

namespace {

Mat walk(Eigen::Index n, Eigen::Index d, std::uint64_t seed = 1) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> g;
  Mat v = Mat::Zero(n, d);
  for (Eigen::Index i = 1; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) v(i, j) = v(i - 1, j) + g(gen) / std::sqrt(static_cast<double>(n));
  return v;
}

std::vector<double> grid(std::size_t n) {
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = static_cast<double>(i) / static_cast<double>(n - 1);
  return t;
}

void BM_PVariation(benchmark::State& state) {
  const Mat pts = walk(state.range(0), 2);
  for (auto _ : state) benchmark::DoNotOptimize(p_variation(pts, 2.5));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PVariation)->RangeMultiplier(2)->Range(64, 1024)->Complexity();

void BM_StratonovichLift(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const CadlagPath x(grid(n), walk(state.range(0), 3));
  for (auto _ : state) benchmark::DoNotOptimize(stratonovich_lift(x));
}
BENCHMARK(BM_StratonovichLift)->Range(256, 16384);

void BM_RhoP(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const RoughPath a = stratonovich_lift(CadlagPath(grid(n), walk(state.range(0), 2, 1)));
  const RoughPath b = stratonovich_lift(CadlagPath(grid(n), walk(state.range(0), 2, 2)));
  for (auto _ : state) benchmark::DoNotOptimize(rho_p(a, b, 2.5));
}
BENCHMARK(BM_RhoP)->RangeMultiplier(2)->Range(64, 512);

void BM_DavieSolve(benchmark::State& state) {
  const RoughPath x = stratonovich_lift(CadlagPath(grid(257), walk(257, 2)));
  VectorField v;
  v.state_dim = 2;
  v.driver_dim = 2;
  v.eval = [](double, const Vec& y) {
    Mat m(2, 2);
    m << std::sin(y(1)), 0.3 * y(0), 0.5 + 0.2 * std::cos(y(0)), -0.4 * y(1);
    return m;
  };
  const Vec y0 = Vec::Constant(2, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(solve_continuous_rde(v, x, y0, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_DavieSolve)->Range(256, 8192);

void BM_ParticleFilter(benchmark::State& state) {
  const ModelSpec m = make_model("scalar_jump_diffusion");
  const ObservationRecord rec = observation_record(m, simulate_pair(m, make_noise_bundle(m, 1, 1.0, 256)));
  const AdmissiblePair driver = observation_driver(m, rec);
  const auto jumps = jump_record(m, rec);
  const TestFunction f = make_test_function("identity");
  EngineOptions opt;
  opt.threads = 1;
  for (auto _ : state)
    benchmark::DoNotOptimize(theta(m, f, driver, jumps, 1.0, static_cast<std::size_t>(state.range(0)), 7, opt));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ParticleFilter)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
