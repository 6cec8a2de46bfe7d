#include <benchmark/benchmark.h>

#include "selinf/feasibility.hpp"
#include "selinf/model.hpp"
#include "selinf/rng.hpp"

namespace {

using namespace selinf;

// n inputs with m levels, outputs with v values, full factorial design and a
// random latent model with r latent values.
System latent_system(std::size_t n, std::size_t m, std::size_t v, std::size_t r, std::uint64_t seed) {
  Rng rng(seed);
  Design d;
  for (std::size_t k = 0; k < n; ++k) {
    InputSpec in{"x" + std::to_string(k + 1), {}};
    for (std::size_t l = 0; l < m; ++l) in.levels.push_back(std::to_string(l + 1));
    d.inputs.push_back(in);
    OutputSpec out{"A" + std::to_string(k + 1), {}};
    for (std::size_t j = 0; j < v; ++j) out.values.push_back({std::to_string(j), static_cast<double>(j)});
    d.outputs.push_back(out);
  }
  d.treatments = full_factorial(d.inputs);
  LatentModel lm;
  double total = 0;
  for (std::size_t i = 0; i < r; ++i) {
    lm.latent_pmf.push_back(0.1 + rng.uniform());
    total += lm.latent_pmf.back();
  }
  for (auto& w : lm.latent_pmf) w /= total;
  lm.response.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    lm.response[k].resize(m);
    for (auto& level : lm.response[k]) {
      for (std::size_t i = 0; i < r; ++i) level.push_back(rng.below(v));
    }
  }
  return generate_system(d, lm);
}

void BM_BuildMatrix(benchmark::State& state) {
  const auto s = latent_system(state.range(0), state.range(1), 2, 8, 1);
  for (auto _ : state) benchmark::DoNotOptimize(build_feasibility_system(s));
}
BENCHMARK(BM_BuildMatrix)->Args({2, 2})->Args({3, 3})->Args({4, 3});

void BM_SolveFeasible(benchmark::State& state) {
  const auto fs = build_feasibility_system(latent_system(state.range(0), state.range(1), 2, 8, 2));
  for (auto _ : state) benchmark::DoNotOptimize(solve_feasibility(fs));
  state.counters["columns"] = static_cast<double>(fs.cols());
}
BENCHMARK(BM_SolveFeasible)->Args({2, 2})->Args({3, 2})->Args({3, 3})->Args({4, 2});

}  // namespace

BENCHMARK_MAIN();
