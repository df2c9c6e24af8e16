#include <benchmark/benchmark.h>

#include <map>
#include <memory>
#include <random>

#include "choquard/solver.hpp"

using namespace choquard;

namespace {

const Site origin{0, 0};

std::shared_ptr<const KernelTable> table(int radius) {
  static std::map<int, std::shared_ptr<const KernelTable>> cache;
  auto& t = cache[radius];
  if (!t) t = std::make_shared<const KernelTable>(build_kernel_table(KernelKind::green, 1.0, LatticeWindow(2, radius)));
  return t;
}

ProblemSpec problem(int radius, double lambda = 100.0) {
  return ProblemSpec(Mode::full, LatticeWindow(2, radius), PotentialSpec(ball(origin, 2)), table(radius), 2.0,
                     lambda);
}

Field random_field(const ProblemSpec& prob, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  Field u(prob.window());
  for (std::size_t i : prob.unknowns()) u[i] = d(rng);
  return u;
}

void BM_HeatKernel1d(benchmark::State& state) {
  const double t = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(heat_kernel_1d(t, 3));
}
BENCHMARK(BM_HeatKernel1d)->Arg(1)->Arg(100)->Arg(10000);

void BM_GreenFunction(benchmark::State& state) {
  const Site v{static_cast<int>(state.range(0)), 1};
  for (auto _ : state) benchmark::DoNotOptimize(green_function(1.0, v));
}
BENCHMARK(BM_GreenFunction)->Arg(0)->Arg(10)->Arg(30);

void BM_BuildKernelTable(benchmark::State& state) {
  const LatticeWindow w(2, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_kernel_table(KernelKind::green, 1.0, w));
}
BENCHMARK(BM_BuildKernelTable)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_Convolve(benchmark::State& state) {
  const auto prob = problem(static_cast<int>(state.range(0)));
  const Field u = random_field(prob, 1);
  for (auto _ : state) benchmark::DoNotOptimize(convolve(prob.kernel(), u, true));
  state.SetComplexityN(static_cast<std::int64_t>(u.size()));
}
BENCHMARK(BM_Convolve)->Arg(8)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond)->Complexity();

void BM_ApplyQuadraticOperator(benchmark::State& state) {
  const auto prob = problem(static_cast<int>(state.range(0)));
  const Field u = random_field(prob, 2);
  for (auto _ : state) benchmark::DoNotOptimize(apply_quadratic_operator(u, prob));
}
BENCHMARK(BM_ApplyQuadraticOperator)->Arg(8)->Arg(16)->Unit(benchmark::kMicrosecond);

void BM_ConjugateGradient(benchmark::State& state) {
  const auto prob = problem(16, static_cast<double>(state.range(0)));
  const Field rhs = random_field(prob, 3);
  const SolverConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(cg_solve(rhs, prob, cfg));
}
BENCHMARK(BM_ConjugateGradient)->Arg(1)->Arg(100)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_FractionalLaplacian(benchmark::State& state) {
  const LatticeWindow w(2, static_cast<int>(state.range(0)));
  const Field u = Field::delta(w, origin);
  for (auto _ : state) benchmark::DoNotOptimize(fractional_laplacian(1.0, u));
}
BENCHMARK(BM_FractionalLaplacian)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_Descent(benchmark::State& state) {
  const auto prob = problem(16, static_cast<double>(state.range(0)));
  SolverConfig cfg;
  const Field u0 = initial_field(Initializer::well_bump, prob, cfg.seed);
  for (auto _ : state) benchmark::DoNotOptimize(descend(prob, cfg, u0));
}
BENCHMARK(BM_Descent)->Arg(100)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
