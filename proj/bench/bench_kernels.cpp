// Serial reference against the OpenMP path for the three per-step kernels.
// Arguments: cells, layers. Compare rows of the same size, e.g.
//   OMP_NUM_THREADS=4 msm_bench --benchmark_filter=hyperbolic
#include <benchmark/benchmark.h>

#include <cmath>
#include <cstddef>
#include <numbers>

#include "msm/scenarios.hpp"
#include "msm/solver.hpp"

namespace {

using namespace msm;

// A collapse a few dozen steps in, so that every layer is moving.
struct Fixture {
  LayerPartition partition;
  Environment env;
  RheologyParams rheology;
  SolverConfig config;
  GridState state;

  Fixture(std::size_t cells, std::size_t layers)
      : partition(LayerPartition::uniform(layers)), rheology(find_preset("experiments-2010")->rheology) {
    env.theta = 22.0 * std::numbers::pi / 180.0;
    CollapseSpec spec;
    spec.theta = env.theta;
    spec.h_i = 2e-3;
    state = collapse_initial(spec, cells, partition);
    const Solver solver(partition, env, rheology, config);
    for (int k = 0; k < 40; ++k) state = solver.step(state).first;
  }

  double dt() const { return stable_dt(state, env, config.cfl, 1e9); }
};

Execution mode(const benchmark::State& s) { return s.range(2) == 0 ? Execution::Serial : Execution::Parallel; }

void BM_hyperbolic(benchmark::State& s) {
  const Fixture f(static_cast<std::size_t>(s.range(0)), static_cast<std::size_t>(s.range(1)));
  const double dt = f.dt();
  for (auto _ : s) {
    auto out = hyperbolic_step(f.state, f.env, f.partition, dt, f.config.boundary, mode(s), f.rheology.mu_s);
    benchmark::DoNotOptimize(out);
  }
  s.SetItemsProcessed(s.iterations() * s.range(0));
}

void BM_exchange_coefficients(benchmark::State& s) {
  const Fixture f(static_cast<std::size_t>(s.range(0)), static_cast<std::size_t>(s.range(1)));
  const auto hyp = hyperbolic_step(f.state, f.env, f.partition, f.dt(), f.config.boundary);
  for (auto _ : s) {
    auto out = exchange_coefficients(hyp.state, hyp.mass_transfer, f.partition, f.env, f.rheology,
                                     f.config.closure, mode(s));
    benchmark::DoNotOptimize(out);
  }
  s.SetItemsProcessed(s.iterations() * s.range(0));
}

void BM_exchange_with_friction(benchmark::State& s) {
  const Fixture f(static_cast<std::size_t>(s.range(0)), static_cast<std::size_t>(s.range(1)));
  const double dt = f.dt();
  const auto hyp = hyperbolic_step(f.state, f.env, f.partition, dt, f.config.boundary);
  const auto coeff =
      exchange_coefficients(hyp.state, hyp.mass_transfer, f.partition, f.env, f.rheology, f.config.closure);
  for (auto _ : s) {
    auto out = exchange_with_friction(hyp.state, coeff, f.env, f.partition, f.rheology,
                                      f.config.closure.friction, dt, mode(s));
    benchmark::DoNotOptimize(out);
  }
  s.SetItemsProcessed(s.iterations() * s.range(0));
}

void sizes(benchmark::internal::Benchmark* b) {
  for (long cells : {700, 4000}) {
    for (long layers : {1, 20}) {
      for (long exec : {0, 1}) b->Args({cells, layers, exec});
    }
  }
  b->ArgNames({"cells", "layers", "omp"});
}

}  // namespace

BENCHMARK(BM_hyperbolic)->Apply(sizes);
BENCHMARK(BM_exchange_coefficients)->Apply(sizes);
BENCHMARK(BM_exchange_with_friction)->Apply(sizes);

BENCHMARK_MAIN();
