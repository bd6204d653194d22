#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rmab/policy.hpp"

namespace rmab {

struct SimulationOptions {
    std::size_t l_max = kDefaultScanHorizon;
    // Worker threads for Monte Carlo runs; 0 picks the hardware concurrency.
    unsigned threads = 0;
};

struct StepRecord {
    std::vector<std::size_t> selected;
    std::vector<std::size_t> observed;  // hidden state of each selected arm
    double reward = 0.0;
    double discounted_cumulative = 0.0;
    double raw_cumulative = 0.0;
    bool matches_myopic = false;   // same set the myopic rule picks on these beliefs
    std::size_t index_evaluations = 0;
    std::size_t fallbacks = 0;

    bool operator==(const StepRecord&) const = default;
};

struct EpisodeTrace {
    std::vector<StepRecord> steps;
    std::uint64_t seed = 0;
    PolicyKind policy;

    bool operator==(const EpisodeTrace&) const = default;
};

// Hidden states: arm n draws from its own stream (seed, n), so the state
// paths do not depend on the policy.
EpisodeTrace run_episode(const BanditInstance& instance, const PolicyKind& policy, std::size_t horizon,
                         std::uint64_t seed, const SimulationOptions& options = {});

struct PolicyCurve {
    PolicyKind policy;
    std::vector<double> mean_discounted;
    std::vector<double> stderr_discounted;
    std::vector<double> mean_raw;
    std::vector<double> stderr_raw;
    std::vector<double> myopic_agreement;  // fraction of runs per step
    std::vector<double> fallback_rate;     // fallbacks per index evaluation per step
    std::vector<double> final_discounted;  // per run, at t = T
    std::size_t index_evaluations = 0;
    std::size_t fallbacks = 0;
};

struct MonteCarloResult {
    std::size_t horizon = 0;
    std::size_t runs = 0;
    std::uint64_t base_seed = 0;
    std::vector<PolicyCurve> curves;

    const PolicyCurve* find(PolicyVariant variant) const;
};

// Run r uses seed base_seed + r for every policy (common random numbers).
MonteCarloResult run_monte_carlo(const BanditInstance& instance, std::span<const PolicyKind> policies,
                                 std::size_t horizon, std::size_t runs, std::uint64_t base_seed,
                                 const SimulationOptions& options = {});

struct PairedDifference {
    double mean = 0.0;
    double standard_error = 0.0;
    std::size_t runs = 0;
};

// Per-run difference a - b of the final discounted reward.
PairedDifference paired_difference(const PolicyCurve& a, const PolicyCurve& b);

}  // namespace rmab
