#include <benchmark/benchmark.h>

#include "selinf/distance.hpp"
#include "selinf/model.hpp"

namespace {

using namespace selinf;

// Two inputs with m levels each, treatments (i, j) with j in {i, i+1 mod m}.
// The shortest testable chain runs around the whole cycle, 2m nodes.
System cyclic_system(std::size_t m) {
  Design d;
  for (std::size_t k = 0; k < 2; ++k) {
    InputSpec in{"x" + std::to_string(k + 1), {}};
    for (std::size_t l = 0; l < m; ++l) in.levels.push_back(std::to_string(l + 1));
    d.inputs.push_back(in);
    d.outputs.push_back({"A" + std::to_string(k + 1), {{"0", 0.0}, {"1", 1.0}, {"2", 2.0}}});
  }
  for (std::size_t i = 0; i < m; ++i) {
    d.treatments.push_back({i, i});
    d.treatments.push_back({i, (i + 1) % m});
  }
  LatentModel lm;
  lm.latent_pmf = {0.25, 0.25, 0.5};
  lm.response.assign(2, std::vector<std::vector<std::size_t>>(m));
  for (std::size_t l = 0; l < m; ++l) {
    lm.response[0][l] = {l % 3, (l + 1) % 3, 2};
    lm.response[1][l] = {(l + 2) % 3, 1, l % 3};
  }
  return generate_system(d, lm);
}

void BM_EnumerateSequences(benchmark::State& state) {
  const auto s = cyclic_system(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_test_sequences(s.design, 2 * state.range(0)));
}
BENCHMARK(BM_EnumerateSequences)->Arg(3)->Arg(4)->Arg(5);

void BM_DistanceTest(benchmark::State& state) {
  const auto s = cyclic_system(state.range(0));
  const auto seqs = enumerate_test_sequences(s.design, 2 * state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_distance_test(s, PowerMetric{0.5}, seqs));
  state.counters["sequences"] = static_cast<double>(seqs.size());
}
BENCHMARK(BM_DistanceTest)->Arg(3)->Arg(4)->Arg(5);

}  // namespace
