// Acceptance run: one PASS/FAIL line per criterion, detail lines indented.
// Exit status is nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "generators.hpp"
#include "oracles.hpp"
#include "rmab/config.hpp"
#include "rmab/crossing.hpp"
#include "rmab/index.hpp"
#include "rmab/oracle.hpp"
#include "rmab/policy.hpp"
#include "rmab/results.hpp"
#include "rmab/simulation.hpp"

namespace {

using rmab::Arm;
using rmab::Belief;
using Clock = std::chrono::steady_clock;

const std::filesystem::path kFixtures = RMAB_FIXTURE_DIR;

// Pinned tolerances and sizes.
constexpr std::size_t kCrossingInstances = 10000;
constexpr double kNearTie = 1e-9;
constexpr double kMaxExcludedFraction = 0.01;
constexpr double kCrossingBudgetSeconds = 120.0;
constexpr std::size_t kClosedFormArms = 1000;
constexpr double kClosedFormRelTol = 1e-9;
constexpr double kExtremeTol = 1e-9;
constexpr std::size_t kMyopicStates = 1000;
constexpr double kMyopicDiscount = 1e-9;
constexpr double kMyopicRelTol = 1e-6;
constexpr std::size_t kTwoStateArms = 200;
constexpr double kIndifferenceTol = 1e-5;
constexpr double kBisectTol = 2e-4;
constexpr std::size_t kMonotoneArms = 50;
constexpr std::size_t kMonotoneGrid = 200;
constexpr std::size_t kRegularityArms = 20;
constexpr std::size_t kRegularityPairs = 500;
constexpr std::size_t kSandwichProbes = 200;
constexpr double kSandwichDelta = 1e-3;
constexpr double kSandwichTol = 1e-4;
constexpr double kExperimentBudgetSeconds = 600.0;
constexpr double kSignificance = 2.0;
constexpr std::size_t kToyInstances = 5;
constexpr std::size_t kToyHorizon = 8;
constexpr std::size_t kToyRuns = 20000;

int failures = 0;

void report(int id, bool ok, const std::string& what) {
    std::printf("%s %2d %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

template <typename... Args>
void detail(const char* fmt, Args... args) {
    std::printf("     ");
    std::printf(fmt, args...);
    std::printf("\n");
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<Arm> fixture_arms() {
    std::vector<Arm> arms;
    for (const char* name : {"experiment1.cfg", "experiment2_1.cfg", "experiment2_2.cfg"}) {
        const auto cfg = rmab::load_config(kFixtures / name);
        for (const auto& machine : cfg.machines) {
            const auto prepared = rmab::build_instance(cfg, machine.name);
            for (const Arm& a : prepared.instance.arms()) arms.push_back(a);
        }
    }
    return arms;
}

// 1. Analytic first crossing against the forward scan.
void crossing_equivalence() {
    const auto start = Clock::now();
    std::size_t agreed = 0;
    std::size_t excluded = 0;
    std::size_t disagreed = 0;
    for (std::uint64_t i = 0; i < kCrossingInstances; ++i) {
        gen::Source s(1001, i);
        const Arm arm = gen::random_arm(s, 3);
        const auto p = arm.transition().to_rows();
        const auto& b = arm.rewards();
        const auto w = gen::simplex_point(s, 3, 0.2);
        double threshold = 0.0;
        switch (s.index(3)) {
            case 0:
                threshold = oracle::dot(gen::simplex_point(s, 3), b);
                break;
            case 1:
                threshold = oracle::dot(oracle::stationary_by_power_iteration(p), b) +
                            (s.coin() ? 1e-3 : -1e-3) * arm.max_reward();
                break;
            default: {
                double lo = 1e300;
                double hi = -1e300;
                for (std::size_t k = 0; k < 20; ++k) {
                    const double h = oracle::reward_after(p, w, b, k);
                    lo = std::min(lo, h);
                    hi = std::max(hi, h);
                }
                threshold = s.uniform(lo, hi);
            }
        }
        const Belief omega(w);
        const auto scan = rmab::first_crossing_scan(arm, omega, threshold, 500);
        const auto analytic = rmab::first_crossing_analytic_k3(rmab::classify_spectrum(arm, omega), threshold);

        const std::size_t last = scan.is_finite() ? scan.steps() : 500;
        double gap = 1e300;
        oracle::Vec v = w;
        for (std::size_t k = 0; k <= last; ++k) {
            gap = std::min(gap, std::abs(oracle::dot(v, b) - (threshold + rmab::kCrossingMargin)));
            v = oracle::left_multiply(v, p);
        }
        if (gap < kNearTie) {
            ++excluded;
            continue;
        }
        const bool beyond = analytic.is_finite() && analytic.steps() > 500 && scan.is_never();
        if (analytic == scan || beyond) {
            ++agreed;
        } else {
            ++disagreed;
            if (disagreed <= 3) {
                detail("instance %llu: analytic %s, scan %s", static_cast<unsigned long long>(i),
                       analytic.to_string().c_str(), scan.to_string().c_str());
            }
        }
    }
    const double elapsed = seconds_since(start);
    const double fraction = static_cast<double>(excluded) / kCrossingInstances;
    char line[256];
    std::snprintf(line, sizeof line,
                  "crossing equivalence: %zu agree, %zu disagree, %zu excluded (%.3f%%), %.1fs", agreed, disagreed,
                  excluded, 100.0 * fraction, elapsed);
    report(1, disagreed == 0 && fraction < kMaxExcludedFraction && elapsed <= kCrossingBudgetSeconds, line);
}

// 2. Closed-form index against the root of the threshold-policy indifference equation.
void closed_form_vs_linear_system() {
    constexpr double kDiscounts[] = {0.3, 0.9, 0.9999};
    std::size_t passed = 0;
    std::size_t failed = 0;
    std::size_t fallbacks = 0;
    double worst = 0.0;
    for (std::uint64_t i = 0; i < kClosedFormArms; ++i) {
        gen::Source s(1002, i);
        const std::size_t k = 2 + s.index(5);
        const double beta = kDiscounts[i % 3];
        const Arm arm = gen::random_arm(s, k);
        const Belief omega(gen::simplex_point(s, k));
        const auto ing = rmab::build_ingredients(arm, omega, beta);
        const auto w = rmab::approximate_whittle_index(ing, arm, omega);
        if (w.fallback_used) {
            ++fallbacks;
            continue;
        }
        const auto sol = rmab::solve_threshold_values(ing, arm);
        const double r0 = rmab::indifference_residual(ing, sol, arm, omega, 0.0);
        const double r1 = rmab::indifference_residual(ing, sol, arm, omega, 1.0);
        const double root = r0 / (r0 - r1);
        const double rel = std::abs(root - w.value) / std::max(1.0, std::abs(root));
        worst = std::max(worst, rel);
        (rel <= kClosedFormRelTol ? passed : failed)++;
    }
    char line[256];
    std::snprintf(line, sizeof line,
                  "closed-form vs linear system: %zu/%zu within %.0e relative, worst %.2e, %zu fallbacks", passed,
                  kClosedFormArms, kClosedFormRelTol, worst, fallbacks);
    report(2, failed == 0 && fallbacks == 0, line);
}

// 3. Index at extreme points equals the state reward.
void extreme_points() {
    std::size_t checked = 0;
    double worst = 0.0;
    for (const Arm& arm : fixture_arms()) {
        for (double beta : {0.3, 0.9, 0.9999}) {
            for (std::size_t k = 0; k < arm.states(); ++k) {
                const auto w = rmab::approximate_whittle_index(arm, Belief::extreme_point(k, arm.states()), beta);
                worst = std::max(worst, std::abs(w.value - arm.rewards()[k]));
                ++checked;
            }
        }
    }
    char line[128];
    std::snprintf(line, sizeof line, "extreme points: %zu fixture state and discount pairs, worst |W - B_k| = %.2e", checked, worst);
    report(3, worst <= kExtremeTol, line);
}

// 4. Near-zero discount reduces the index to the expected reward.
void myopic_degeneration() {
    double worst = 0.0;
    for (std::uint64_t i = 0; i < kMyopicStates; ++i) {
        gen::Source s(1004, i);
        const std::size_t k = 2 + s.index(5);
        const Arm arm = gen::random_arm(s, k);
        const Belief omega(gen::simplex_point(s, k, 0.1));
        const double w = rmab::approximate_whittle_index(arm, omega, kMyopicDiscount).value;
        worst = std::max(worst, std::abs(w - arm.expected_reward(omega)) / arm.max_reward());
    }
    char line[128];
    std::snprintf(line, sizeof line, "myopic degeneration at beta 1e-9: worst |W - wB|/B_max = %.2e", worst);
    report(4, worst <= kMyopicRelTol, line);
}

// 5. Two-state arms: the index is an indifference point of the exact value function.
void two_state_consistency() {
    std::size_t bad_gap = 0;
    std::size_t bad_bisect = 0;
    double worst_gap = 0.0;
    double worst_bisect = 0.0;
    const rmab::OracleConfig cfg;
    for (std::uint64_t i = 0; i < kTwoStateArms; ++i) {
        gen::Source s(1005, i);
        const Arm arm = gen::random_arm(s, 2);
        const double beta = s.uniform(0.05, 0.9);
        const Belief omega(gen::simplex_point(s, 2));
        const double w = rmab::approximate_whittle_index(arm, omega, beta).value;
        const auto v = rmab::value_single_arm(arm, omega, beta, w, cfg);
        const double gap = std::abs(v.value_active - v.value_passive);
        const double bisect = std::abs(rmab::classical_index_bisect(arm, omega, beta, cfg) - w);
        worst_gap = std::max(worst_gap, gap);
        worst_bisect = std::max(worst_bisect, bisect);
        bad_gap += gap > kIndifferenceTol;
        bad_bisect += bisect > kBisectTol;
    }
    char line[256];
    std::snprintf(line, sizeof line, "two-state consistency: worst indifference gap %.2e, worst bisection gap %.2e",
                  worst_gap, worst_bisect);
    report(5, bad_gap == 0 && bad_bisect == 0, line);
}

// 6. Membership never returns to Active once Passive along an increasing subsidy grid.
void monotone_membership() {
    std::size_t violations = 0;
    std::size_t indeterminate = 0;
    for (std::uint64_t i = 0; i < kMonotoneArms; ++i) {
        gen::Source s(1006, i);
        const std::size_t k = 2 + s.index(2);
        const Arm arm = gen::random_arm(s, k);
        const Belief omega(gen::simplex_point(s, k));
        for (double beta : {0.3, 0.5}) {
            bool passive = false;
            for (std::size_t g = 0; g < kMonotoneGrid; ++g) {
                const double m = arm.max_reward() * static_cast<double>(g) / static_cast<double>(kMonotoneGrid - 1);
                const auto status = rmab::membership_probe(arm, omega, beta, m);
                if (status == rmab::Membership::Indeterminate) ++indeterminate;
                if (status == rmab::Membership::Passive) passive = true;
                if (passive && status == rmab::Membership::Active) ++violations;
            }
        }
    }
    char line[160];
    std::snprintf(line, sizeof line, "monotone membership: %zu sweeps, %zu violations, %zu indeterminate probes",
                  kMonotoneArms * 2, violations, indeterminate);
    report(6, violations == 0, line);
}

// 7. Convexity and Lipschitz continuity of the value function in belief and subsidy.
void value_regularity() {
    const rmab::OracleConfig cfg;
    const double slack = 3.0 * cfg.epsilon;
    std::size_t convex_bad = 0;
    std::size_t lipschitz_bad = 0;
    for (std::uint64_t a = 0; a < kRegularityArms; ++a) {
        gen::Source s(1007, a);
        const std::size_t k = 2 + s.index(3);
        const Arm arm = gen::random_arm(s, k);
        const double beta = s.uniform(0.3, 0.9);
        const double bmax = arm.max_reward();
        const auto value = [&](const oracle::Vec& w, double m) {
            return rmab::value_single_arm(arm, Belief(w), beta, m, cfg).value;
        };
        for (std::size_t pair = 0; pair < kRegularityPairs; ++pair) {
            const auto w1 = gen::simplex_point(s, k);
            const auto w2 = gen::simplex_point(s, k);
            const double m1 = s.uniform(0.0, bmax);
            const double m2 = s.uniform(0.0, bmax);
            const double lambda = s.uniform();
            oracle::Vec mixed(k);
            double dist = 0.0;
            for (std::size_t j = 0; j < k; ++j) {
                mixed[j] = lambda * w1[j] + (1.0 - lambda) * w2[j];
                dist += std::abs(w1[j] - w2[j]);
            }
            const double v11 = value(w1, m1);
            const double v21 = value(w2, m1);
            const double v12 = value(w1, m2);
            convex_bad += value(mixed, m1) > lambda * v11 + (1.0 - lambda) * v21 + slack;
            convex_bad += value(w1, lambda * m1 + (1.0 - lambda) * m2) > lambda * v11 + (1.0 - lambda) * v12 + slack;
            lipschitz_bad += std::abs(v11 - v21) > bmax / (1.0 - beta) * dist + slack;
            lipschitz_bad += std::abs(v11 - v12) > std::abs(m1 - m2) / (1.0 - beta) + slack;
        }
    }
    char line[200];
    std::snprintf(line, sizeof line,
                  "value convexity and Lipschitz bounds: %zu arms x %zu pairs, %zu convexity and %zu Lipschitz "
                  "violations",
                  kRegularityArms, kRegularityPairs, convex_bad, lipschitz_bad);
    report(7, convex_bad == 0 && lipschitz_bad == 0, line);
}

// 8. Passive time brackets the finite-difference slope of the value in m.
void derivative_sandwich() {
    std::size_t bad = 0;
    double worst = 0.0;
    const rmab::OracleConfig cfg;
    for (std::uint64_t i = 0; i < kSandwichProbes; ++i) {
        gen::Source s(1008, i);
        const std::size_t k = 2 + s.index(3);
        const Arm arm = gen::random_arm(s, k);
        const double beta = s.uniform(0.3, 0.9);
        const Belief omega(gen::simplex_point(s, k));
        const double m = s.uniform(0.0, arm.max_reward() - kSandwichDelta);
        const double slope = (rmab::value_single_arm(arm, omega, beta, m + kSandwichDelta, cfg).value -
                              rmab::value_single_arm(arm, omega, beta, m, cfg).value) /
                             kSandwichDelta;
        const double lo = rmab::passive_time(arm, omega, beta, m, cfg);
        const double hi = rmab::passive_time(arm, omega, beta, m + kSandwichDelta, cfg);
        const double miss = std::max({0.0, lo - slope, slope - hi});
        worst = std::max(worst, miss);
        bad += miss > kSandwichTol;
    }
    char line[160];
    std::snprintf(line, sizeof line, "derivative sandwich: %zu probes, %zu outside, worst excursion %.2e",
                  kSandwichProbes, bad, worst);
    report(8, bad == 0, line);
}

struct ExperimentRow {
    std::string fixture;
    std::string machine;
    std::size_t select_count;
    double whittle;
    double myopic;
    double diff;
    double se;
};

struct FallbackTally {
    std::size_t fallbacks = 0;
    std::size_t evaluations = 0;
};

ExperimentRow run_experiment(const rmab::ExperimentConfig& cfg, const std::string& fixture,
                             const std::string& machine, std::size_t m, FallbackTally& tally) {
    rmab::CompareOverrides o;
    o.machine = machine;
    o.select_count = m;
    o.policies = std::vector<rmab::PolicyKind>{{rmab::PolicyVariant::WhittleIndex, 0}, {rmab::PolicyVariant::Myopic, 0}};
    const auto out = rmab::run_compare(cfg, o);
    const auto* w = out.result.find(rmab::PolicyVariant::WhittleIndex);
    const auto* y = out.result.find(rmab::PolicyVariant::Myopic);
    tally.fallbacks += w->fallbacks;
    tally.evaluations += w->index_evaluations;
    const auto d = rmab::paired_difference(*w, *y);
    return {fixture, machine, m, w->mean_discounted.back(), y->mean_discounted.back(), d.mean, d.standard_error};
}

// 9 and 11. Whittle against myopic on the fixture machines, with the fallback log.
void experiments() {
    const auto start = Clock::now();
    FallbackTally tally;
    std::vector<ExperimentRow> rows;
    for (const char* name : {"experiment2_1.cfg", "experiment2_2.cfg"}) {
        const auto cfg = rmab::load_config(kFixtures / name);
        for (const auto& machine : cfg.machines) {
            for (std::size_t m = 1; m <= 3; ++m) rows.push_back(run_experiment(cfg, name, machine.name, m, tally));
        }
    }
    const double elapsed = seconds_since(start);

    detail("%-18s %-9s %s %10s %10s %9s %7s", "fixture", "machine", "M", "whittle", "myopic", "diff", "stderr");
    for (const auto& r : rows) {
        detail("%-18s %-9s %zu %10.4f %10.4f %+9.4f %7.4f%s", r.fixture.c_str(), r.machine.c_str(), r.select_count,
               r.whittle, r.myopic, r.diff, r.se, r.diff > kSignificance * r.se ? "  *" : "");
    }
    // Each machine needs some M where Whittle is ahead by more than two standard errors.
    std::vector<std::string> lagging;
    std::vector<std::string> fixtures_ahead;
    for (const auto& r : rows) {
        const bool ahead = r.diff >= 0.0 && r.diff > kSignificance * r.se;
        const std::string key = r.fixture + "/" + r.machine;
        const bool any = std::any_of(rows.begin(), rows.end(), [&](const ExperimentRow& x) {
            return x.fixture == r.fixture && x.machine == r.machine && x.diff >= 0.0 && x.diff > kSignificance * x.se;
        });
        if (!any && std::find(lagging.begin(), lagging.end(), key) == lagging.end()) lagging.push_back(key);
        if (ahead && std::find(fixtures_ahead.begin(), fixtures_ahead.end(), r.fixture) == fixtures_ahead.end())
            fixtures_ahead.push_back(r.fixture);
    }
    for (const auto& key : lagging) detail("no M with a significant Whittle lead on %s", key.c_str());
    detail("fixtures with a significant Whittle lead on some machine and M: %zu of 2", fixtures_ahead.size());
    char line[200];
    std::snprintf(line, sizeof line,
                  "Whittle vs myopic per machine (T=100, R=1000, M=1..3): %zu of %zu machines with a lead > 2 SE, "
                  "%.0fs",
                  4 - lagging.size(), std::size_t{4}, elapsed);
    report(9, lagging.empty() && elapsed <= kExperimentBudgetSeconds, line);

    const auto cfg1 = rmab::load_config(kFixtures / "experiment1.cfg");
    for (const auto& machine : cfg1.machines) {
        for (std::size_t m = 1; m <= 3; ++m) run_experiment(cfg1, "experiment1.cfg", machine.name, m, tally);
    }
    std::snprintf(line, sizeof line, "index fallbacks over all fixture experiments: %zu of %zu evaluations (%.2e)",
                  tally.fallbacks, tally.evaluations,
                  tally.evaluations ? static_cast<double>(tally.fallbacks) / tally.evaluations : 0.0);
    report(11, tally.fallbacks == 0 && tally.evaluations > 0, line);
}

// 10. Toy instances: the exhaustive optimum dominates the Whittle policy.
void optimality_gap() {
    bool ok = true;
    for (std::uint64_t i = 0; i < kToyInstances; ++i) {
        gen::Source s(1010, i);
        std::vector<Arm> arms = {gen::random_arm(s, 3), gen::random_arm(s, 3)};
        const rmab::BanditInstance instance(arms, 1, 0.9);
        const double dp = rmab::optimal_dp(instance, kToyHorizon).value;

        std::vector<oracle::ToyArm> toy;
        for (const Arm& a : arms) toy.push_back({a.transition().to_rows(), a.rewards()});
        const oracle::SelectionRule whittle_rule = [&](const std::vector<oracle::Vec>& beliefs) {
            std::vector<Belief> b;
            for (const auto& v : beliefs) b.emplace_back(v);
            return rmab::select_whittle(instance, b, 0.9);
        };
        std::vector<oracle::Vec> start;
        for (const Arm& a : arms) start.push_back(a.initial_belief().values());
        const double exact = oracle::policy_tree_value(toy, whittle_rule, 0.9, start, kToyHorizon);

        const std::vector<rmab::PolicyKind> policies = {{rmab::PolicyVariant::WhittleIndex, 0}};
        const auto mc = rmab::run_monte_carlo(instance, policies, kToyHorizon, kToyRuns, 77);
        const double mean = mc.curves[0].mean_discounted.back();
        const double se = mc.curves[0].stderr_discounted.back();
        const bool this_ok = dp >= exact - 1e-12 && dp >= mean - 3.0 * se;
        ok = ok && this_ok;
        detail("instance %llu: optimal %.6f, Whittle exact %.6f (gap %.3f%%), Whittle MC %.6f +- %.6f",
               static_cast<unsigned long long>(i), dp, exact, 100.0 * (dp - exact) / dp, mean, se);
    }
    report(10, ok, "optimality gap at toy scale (N=2, M=1, K=3, beta 0.9, horizon 8)");
}

// 12. Repeated compare runs are byte-identical.
void determinism() {
    const auto cfg = rmab::load_config(kFixtures / "experiment2_1.cfg");
    rmab::CompareOverrides o;
    o.seed = 2024;
    const auto a = rmab::run_compare(cfg, o);
    o.threads = 2;
    const auto b = rmab::run_compare(cfg, o);
    const bool same = a.csv == b.csv && a.companion == b.companion &&
                      rmab::csv_body(a.csv) == rmab::csv_body(b.csv);
    char line[128];
    std::snprintf(line, sizeof line, "determinism: two compare runs, %zu bytes, %s", a.csv.size(),
                  same ? "identical" : "different");
    report(12, same, line);
}

}  // namespace

int main() {
    const std::vector<std::pair<std::vector<int>, std::function<void()>>> order = {
        {{1}, crossing_equivalence}, {{2}, closed_form_vs_linear_system}, {{3}, extreme_points},
        {{4}, myopic_degeneration},  {{5}, two_state_consistency},        {{6}, monotone_membership},
        {{7}, value_regularity},     {{8}, derivative_sandwich},          {{10}, optimality_gap},
        {{9, 11}, experiments},      {{12}, determinism}};
    for (const auto& [ids, run] : order) {
        try {
            run();
        } catch (const std::exception& e) {
            for (int id : ids) report(id, false, std::string("unexpected exception: ") + e.what());
        }
    }
    std::printf("%s\n", failures ? "acceptance: some criteria failed" : "acceptance: all criteria passed");
    return failures ? 1 : 0;
}
