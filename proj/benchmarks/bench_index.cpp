#include <benchmark/benchmark.h>

#include <vector>

#include "rmab/crossing.hpp"
#include "rmab/index.hpp"
#include "rmab/oracle.hpp"
#include "rmab/policy.hpp"

namespace {

// Circulant-plus-noise arm with a complex spectrum, K states.
rmab::Arm bench_arm(std::size_t k) {
    rmab::Matrix p(k, k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) p(i, j) = 0.1 / static_cast<double>(k);
        p(i, (i + 1) % k) += 0.6;
        p(i, i) += 0.3;
    }
    std::vector<double> rewards(k);
    std::vector<double> belief(k, 1.0 / static_cast<double>(k));
    for (std::size_t i = 0; i < k; ++i) rewards[i] = static_cast<double>(i);
    belief[0] += 0.5;
    for (double& b : belief) b /= 1.5;
    return rmab::Arm("bench", std::move(p), std::move(rewards), std::move(belief));
}

void BM_WhittleIndex(benchmark::State& state) {
    const rmab::Arm arm = bench_arm(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(rmab::approximate_whittle_index(arm, arm.initial_belief(), 0.9999));
}
BENCHMARK(BM_WhittleIndex)->DenseRange(2, 6);

void BM_CrossingAnalytic(benchmark::State& state) {
    const rmab::Arm arm = bench_arm(3);
    const double r = arm.expected_reward(rmab::stationary_distribution(arm)) + 1e-3;
    for (auto _ : state) {
        const auto spec = rmab::classify_spectrum(arm, arm.initial_belief());
        benchmark::DoNotOptimize(rmab::first_crossing_analytic_k3(spec, r));
    }
}
BENCHMARK(BM_CrossingAnalytic);

void BM_CrossingScan(benchmark::State& state) {
    const rmab::Arm arm = bench_arm(3);
    const double r = arm.expected_reward(rmab::stationary_distribution(arm)) + 1e-3;
    for (auto _ : state) benchmark::DoNotOptimize(rmab::first_crossing_scan(arm, arm.initial_belief(), r, 500));
}
BENCHMARK(BM_CrossingScan);

void BM_ValueOracle(benchmark::State& state) {
    const rmab::Arm arm = bench_arm(3);
    const double beta = static_cast<double>(state.range(0)) / 10.0;
    for (auto _ : state) benchmark::DoNotOptimize(rmab::value_single_arm(arm, arm.initial_belief(), beta, 1.0));
}
BENCHMARK(BM_ValueOracle)->Arg(5)->Arg(9);

void BM_WhittleSelection(benchmark::State& state) {
    std::vector<rmab::Arm> arms;
    for (int i = 0; i < 7; ++i) arms.push_back(bench_arm(3));
    const rmab::BanditInstance instance(std::move(arms), 2, 0.9999);
    const auto beliefs = instance.initial_beliefs();
    for (auto _ : state) benchmark::DoNotOptimize(rmab::select_whittle(instance, beliefs, 0.9999));
}
BENCHMARK(BM_WhittleSelection);

}  // namespace

BENCHMARK_MAIN();
