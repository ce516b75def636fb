#include <benchmark/benchmark.h>

#include "hqp/collision.hpp"
#include "hqp/exact_count.hpp"
#include "hqp/flow_algebra.hpp"
#include "hqp/instance.hpp"
#include "hqp/rate.hpp"

namespace hqp {
namespace {

OverlapMatrix cyclic_overlap(int d, std::int64_t entry) {
  OverlapMatrix mu(d, entry);
  for (int r = 0; r < d; ++r) mu(r, r) = 0;
  return mu;
}

void BM_CollisionDp(benchmark::State& state) {
  const CollisionQuery q(cyclic_overlap(static_cast<int>(state.range(0)), state.range(1)), 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(collision_prob_dp(q));
}
BENCHMARK(BM_CollisionDp)->Args({2, 200})->Args({3, 10})->Args({3, 30})->Args({4, 4});

void BM_CollisionDft(benchmark::State& state) {
  const CollisionQuery q(cyclic_overlap(static_cast<int>(state.range(0)), state.range(1)), 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(collision_prob_dft(q));
}
BENCHMARK(BM_CollisionDft)->Args({2, 200})->Args({3, 10})->Args({3, 30});

void BM_CountSolutions(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  InstanceParams p{n, 2, ProportionVector::uniform(2), 0.5, query_count_for_gamma(n, 1.0), 9};
  const Instance inst = generate_instance(p);
  for (auto _ : state) benchmark::DoNotOptimize(count_solutions(inst));
}
BENCHMARK(BM_CountSolutions)->Arg(12)->Arg(16)->Arg(20);

void BM_Kirchhoff(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const FlowGraph g = FlowGraph::complete(d, false);
  WeightMatrix w(d, 0.0);
  for (int r = 0; r < d; ++r)
    for (int s = 0; s < d; ++s) w(r, s) = r == s ? 0.0 : 1.0 + 0.1 * (r + 2 * s);
  for (auto _ : state) benchmark::DoNotOptimize(spanning_tree_polynomial(g, w));
}
BENCHMARK(BM_Kirchhoff)->DenseRange(3, 8);

void BM_SolveRate(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  RateProblem p{WeightMatrix(d, 0.0), {}, WeightMatrix(d, 0.0), 0.4};
  for (int r = 0; r < d; ++r)
    for (int s = 0; s < d; ++s)
      if (r != s) {
        p.large.emplace_back(r, s);
        p.mu(r, s) = 1.0 + 0.3 * ((r * 7 + s * 3) % 5);
      }
  for (auto _ : state) benchmark::DoNotOptimize(solve_rate(p));
}
BENCHMARK(BM_SolveRate)->DenseRange(2, 6);

}  // namespace
}  // namespace hqp

BENCHMARK_MAIN();
