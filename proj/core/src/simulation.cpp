#include "rmab/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "rmab/random.hpp"

namespace rmab {

namespace {

constexpr std::uint64_t kHiddenStateSalt = 0x6869'6464'656eULL;
constexpr std::uint64_t kPolicySalt = 0x706f'6c69'6379ULL;

std::vector<std::size_t> random_subset(Rng& rng, std::size_t n, std::size_t m) {
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t span = n - i;
        const std::size_t j = i + std::min(span - 1, static_cast<std::size_t>(uniform01(rng) * static_cast<double>(span)));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(m);
    std::sort(pool.begin(), pool.end());
    return pool;
}

EpisodeTrace simulate(const BanditInstance& instance, const PolicyKind& policy, std::size_t horizon,
                      std::uint64_t seed, const SimulationOptions& options, OptimalPlanner* planner) {
    const std::size_t n_arms = instance.size();
    const double beta = instance.discount();

    std::vector<Rng> streams;
    streams.reserve(n_arms);
    for (std::size_t n = 0; n < n_arms; ++n) streams.push_back(make_stream(seed, n, kHiddenStateSalt));
    Rng policy_rng = make_stream(seed, 0, kPolicySalt);

    std::vector<std::size_t> hidden(n_arms);
    for (std::size_t n = 0; n < n_arms; ++n) {
        hidden[n] = sample_categorical(streams[n], instance.arm(n).initial_belief().probs());
    }
    std::vector<Belief> beliefs = instance.initial_beliefs();

    IndexOptions index_options;
    index_options.l_max = options.l_max;

    EpisodeTrace trace;
    trace.seed = seed;
    trace.policy = policy;
    trace.steps.reserve(horizon);
    double weight = 1.0;
    double discounted = 0.0;
    double raw = 0.0;
    for (std::size_t t = 0; t < horizon; ++t) {
        StepRecord rec;
        const std::vector<std::size_t> myopic = select_myopic(instance, beliefs);
        switch (policy.variant) {
            case PolicyVariant::WhittleIndex: {
                const WhittleSelection sel = select_whittle_detailed(instance, beliefs, beta, index_options);
                rec.selected = sel.arms;
                rec.index_evaluations = sel.indices.size();
                rec.fallbacks = static_cast<std::size_t>(
                    std::count_if(sel.indices.begin(), sel.indices.end(), [](const IndexResult& r) { return r.fallback_used; }));
                break;
            }
            case PolicyVariant::Myopic:
                rec.selected = myopic;
                break;
            case PolicyVariant::Random:
                rec.selected = random_subset(policy_rng, n_arms, instance.select_count());
                break;
            case PolicyVariant::OptimalDP: {
                const std::size_t remaining = horizon - t;
                const std::size_t lookahead = policy.dp_horizon > 0 ? std::min(policy.dp_horizon, remaining) : remaining;
                rec.selected = planner->solve(beliefs, lookahead).first_action;
                break;
            }
        }
        rec.matches_myopic = rec.selected == myopic;

        for (std::size_t n : rec.selected) {
            rec.observed.push_back(hidden[n]);
            rec.reward += instance.arm(n).rewards()[hidden[n]];
        }
        discounted += weight * rec.reward;
        raw += rec.reward;
        weight *= beta;
        rec.discounted_cumulative = discounted;
        rec.raw_cumulative = raw;

        std::size_t next_selected = 0;
        for (std::size_t n = 0; n < n_arms; ++n) {
            const Arm& arm = instance.arm(n);
            if (next_selected < rec.selected.size() && rec.selected[next_selected] == n) {
                beliefs[n] = belief_update_active(arm, hidden[n]);
                ++next_selected;
            } else {
                beliefs[n] = belief_update_passive(arm, beliefs[n]);
            }
            hidden[n] = sample_categorical(streams[n], arm.transition().row(hidden[n]));
        }
        trace.steps.push_back(std::move(rec));
    }
    return trace;
}

std::unique_ptr<OptimalPlanner> planner_for(const BanditInstance& instance, const PolicyKind& policy,
                                            std::size_t horizon) {
    if (policy.variant != PolicyVariant::OptimalDP) return nullptr;
    const std::size_t lookahead = policy.dp_horizon > 0 ? std::min(policy.dp_horizon, horizon) : horizon;
    if (lookahead > kMaxDpHorizon) {
        throw std::invalid_argument("OptimalDP lookahead " + std::to_string(lookahead) + " exceeds the limit of " +
                                    std::to_string(kMaxDpHorizon) + "; set OptimalDP:<h> or lower the horizon");
    }
    return std::make_unique<OptimalPlanner>(instance);
}

void mean_and_stderr(const std::vector<double>& samples, double& mean, double& standard_error) {
    const double n = static_cast<double>(samples.size());
    mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
    if (samples.size() < 2) {
        standard_error = 0.0;
        return;
    }
    double ss = 0.0;
    for (double x : samples) ss += (x - mean) * (x - mean);
    standard_error = std::sqrt(ss / (n - 1.0) / n);
}

}  // namespace

EpisodeTrace run_episode(const BanditInstance& instance, const PolicyKind& policy, std::size_t horizon,
                         std::uint64_t seed, const SimulationOptions& options) {
    const auto planner = planner_for(instance, policy, horizon);
    return simulate(instance, policy, horizon, seed, options, planner.get());
}

const PolicyCurve* MonteCarloResult::find(PolicyVariant variant) const {
    for (const PolicyCurve& c : curves) {
        if (c.policy.variant == variant) return &c;
    }
    return nullptr;
}

MonteCarloResult run_monte_carlo(const BanditInstance& instance, std::span<const PolicyKind> policies,
                                 std::size_t horizon, std::size_t runs, std::uint64_t base_seed,
                                 const SimulationOptions& options) {
    if (runs < 1) throw std::invalid_argument("run_monte_carlo needs at least one run");
    const std::size_t n_policies = policies.size();
    for (const PolicyKind& p : policies) planner_for(instance, p, horizon);  // size guard before any work

    // traces[p][r]; each slot is written by exactly one worker.
    std::vector<std::vector<EpisodeTrace>> traces(n_policies, std::vector<EpisodeTrace>(runs));
    unsigned workers = options.threads != 0 ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, runs));

    const auto work = [&](unsigned worker) {
        for (std::size_t p = 0; p < n_policies; ++p) {
            const auto planner = planner_for(instance, policies[p], horizon);
            for (std::size_t r = worker; r < runs; r += workers) {
                traces[p][r] = simulate(instance, policies[p], horizon, base_seed + r, options, planner.get());
            }
        }
    };
    if (workers <= 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        std::exception_ptr failure;
        std::mutex failure_mutex;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    work(w);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        if (failure) std::rethrow_exception(failure);
    }

    MonteCarloResult out;
    out.horizon = horizon;
    out.runs = runs;
    out.base_seed = base_seed;
    std::vector<double> column(runs);
    for (std::size_t p = 0; p < n_policies; ++p) {
        PolicyCurve curve;
        curve.policy = policies[p];
        curve.mean_discounted.resize(horizon);
        curve.stderr_discounted.resize(horizon);
        curve.mean_raw.resize(horizon);
        curve.stderr_raw.resize(horizon);
        curve.myopic_agreement.assign(horizon, 0.0);
        curve.fallback_rate.assign(horizon, 0.0);
        for (std::size_t t = 0; t < horizon; ++t) {
            for (std::size_t r = 0; r < runs; ++r) column[r] = traces[p][r].steps[t].discounted_cumulative;
            mean_and_stderr(column, curve.mean_discounted[t], curve.stderr_discounted[t]);
            for (std::size_t r = 0; r < runs; ++r) column[r] = traces[p][r].steps[t].raw_cumulative;
            mean_and_stderr(column, curve.mean_raw[t], curve.stderr_raw[t]);
            std::size_t agree = 0;
            std::size_t evaluations = 0;
            std::size_t fallbacks = 0;
            for (std::size_t r = 0; r < runs; ++r) {
                const StepRecord& s = traces[p][r].steps[t];
                agree += s.matches_myopic ? 1 : 0;
                evaluations += s.index_evaluations;
                fallbacks += s.fallbacks;
            }
            curve.myopic_agreement[t] = static_cast<double>(agree) / static_cast<double>(runs);
            curve.fallback_rate[t] = evaluations ? static_cast<double>(fallbacks) / static_cast<double>(evaluations) : 0.0;
            curve.index_evaluations += evaluations;
            curve.fallbacks += fallbacks;
        }
        curve.final_discounted.resize(runs);
        for (std::size_t r = 0; r < runs; ++r) {
            curve.final_discounted[r] = horizon ? traces[p][r].steps.back().discounted_cumulative : 0.0;
        }
        out.curves.push_back(std::move(curve));
    }
    return out;
}

PairedDifference paired_difference(const PolicyCurve& a, const PolicyCurve& b) {
    if (a.final_discounted.size() != b.final_discounted.size() || a.final_discounted.empty()) {
        throw std::invalid_argument("paired_difference needs curves from the same Monte Carlo sweep");
    }
    std::vector<double> diff(a.final_discounted.size());
    for (std::size_t r = 0; r < diff.size(); ++r) diff[r] = a.final_discounted[r] - b.final_discounted[r];
    PairedDifference out;
    out.runs = diff.size();
    mean_and_stderr(diff, out.mean, out.standard_error);
    return out;
}

}  // namespace rmab
