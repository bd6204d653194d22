#include "rmab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rmab/crossing.hpp"
#include "rmab/index.hpp"
#include "rmab/oracle.hpp"
#include "rmab/random.hpp"

namespace rmab {

namespace {

constexpr std::uint64_t kCrossingSalt = 0x78'696e'67ULL;
constexpr std::uint64_t kClosedFormSalt = 0x636c'6f73'6564ULL;
constexpr std::uint64_t kTwoStateSalt = 0x6b32ULL;
constexpr std::uint64_t kMembershipSalt = 0x6d65'6d62ULL;
constexpr std::size_t kMaxListedFailures = 5;
constexpr double kNearTie = 1e-9;

void record_failure(CheckResult& check, const std::string& what) {
    ++check.failed;
    if (check.failures.size() < kMaxListedFailures) check.failures.push_back(what);
}

RandomArmOptions varied_arm_options(Rng& rng) {
    RandomArmOptions opt;
    opt.row_concentration = 0.3 + 2.0 * uniform01(rng);
    opt.max_permutation_weight = 0.95;
    opt.reward_scale = 1.0 + 4.0 * uniform01(rng);
    return opt;
}

// Closest approach of h(k) to the crossing level over the steps that decide the answer.
double decisive_gap(const Arm& arm, const Belief& start, double level, std::size_t last_step) {
    Belief b = start;
    double gap = std::abs(arm.expected_reward(b) - level);
    for (std::size_t k = 1; k <= last_step; ++k) {
        b = belief_update_passive(arm, b);
        gap = std::min(gap, std::abs(arm.expected_reward(b) - level));
    }
    return gap;
}

// A third of the thresholds are rewards of random beliefs; the rest sit inside
// the transient range of h or just around its limit, where the cases are hard.
double crossing_threshold(Rng& rng, const Arm& arm, const Belief& start) {
    const double pick = uniform01(rng);
    if (pick < 1.0 / 3.0) return arm.expected_reward(random_belief(rng, arm.states(), 0.5));
    if (pick < 2.0 / 3.0) {
        const double limit = arm.expected_reward(stationary_distribution(arm));
        return limit + arm.max_reward() * 1e-3 * (2.0 * uniform01(rng) - 1.0);
    }
    Belief b = start;
    double lo = arm.expected_reward(b);
    double hi = lo;
    for (int k = 0; k < 20; ++k) {
        b = belief_update_passive(arm, b);
        lo = std::min(lo, arm.expected_reward(b));
        hi = std::max(hi, arm.expected_reward(b));
    }
    return lo + (hi - lo) * uniform01(rng);
}

}  // namespace

bool VerifyReport::ok() const noexcept {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.ok(); });
}

CheckResult check_crossing_agreement(std::uint64_t seed, std::size_t count, bool corrupt_analytic) {
    CheckResult check;
    check.name = "crossing agreement (analytic vs scan, K=3)";
    for (std::size_t i = 0; i < count; ++i) {
        Rng rng = make_stream(seed, i, kCrossingSalt);
        const Arm arm = random_arm(rng, 3, varied_arm_options(rng));
        const Belief start = random_belief(rng, 3);
        const double threshold = crossing_threshold(rng, arm, start);

        const CrossingTime scan = first_crossing_scan(arm, start, threshold, kDefaultScanHorizon);
        CrossingTime analytic = first_crossing_analytic_k3(classify_spectrum(arm, start), threshold);
        if (corrupt_analytic && analytic.is_finite()) analytic = CrossingTime::finite(analytic.steps() + 1);

        const std::size_t last = scan.is_finite() ? scan.steps() : kDefaultScanHorizon;
        if (decisive_gap(arm, start, threshold + kCrossingMargin, last) < kNearTie) {
            ++check.excluded;
            continue;
        }
        // A crossing past the scan horizon is invisible to the scan.
        const bool beyond_scan = analytic.is_finite() && analytic.steps() > kDefaultScanHorizon && scan.is_never();
        if (analytic == scan || beyond_scan) {
            ++check.passed;
        } else {
            record_failure(check, "instance " + std::to_string(i) + ": analytic " + analytic.to_string() + ", scan " +
                                      scan.to_string());
        }
    }
    return check;
}

CheckResult check_closed_form(std::uint64_t seed, std::size_t count) {
    CheckResult check;
    check.name = "closed-form index vs linear-system root";
    constexpr double kDiscounts[] = {0.3, 0.9, 0.9999};
    for (std::size_t i = 0; i < count; ++i) {
        Rng rng = make_stream(seed, i, kClosedFormSalt);
        const std::size_t k = 2 + static_cast<std::size_t>(uniform01(rng) * 5.0);
        const double beta = kDiscounts[i % 3];
        const Arm arm = random_arm(rng, k, varied_arm_options(rng));
        const Belief omega = random_belief(rng, k);

        const IndexIngredients ing = build_ingredients(arm, omega, beta);
        const IndexResult w = approximate_whittle_index(ing, arm, omega);
        if (w.fallback_used) {
            ++check.excluded;
            continue;
        }
        const ThresholdValueSolution sol = solve_threshold_values(ing, arm);
        // The residual is affine in m with slope -denominator.
        const double r0 = indifference_residual(ing, sol, arm, omega, 0.0);
        const double r1 = indifference_residual(ing, sol, arm, omega, 1.0);
        const double root = r0 / (r0 - r1);
        if (std::abs(root - w.value) <= 1e-9 * std::max(1.0, std::abs(root))) {
            ++check.passed;
        } else {
            std::ostringstream msg;
            msg.precision(17);
            msg << "instance " << i << " (K=" << k << ", beta=" << beta << "): closed form " << w.value << ", root "
                << root;
            record_failure(check, msg.str());
        }
    }
    return check;
}

CheckResult check_two_state_consistency(std::uint64_t seed, std::size_t count) {
    CheckResult check;
    check.name = "K=2 index vs value oracle";
    const OracleConfig oracle;
    for (std::size_t i = 0; i < count; ++i) {
        Rng rng = make_stream(seed, i, kTwoStateSalt);
        const double beta = 0.1 + 0.8 * uniform01(rng);
        const Arm arm = random_arm(rng, 2, varied_arm_options(rng));
        const Belief omega = random_belief(rng, 2);
        const IndexResult w = approximate_whittle_index(arm, omega, beta);
        if (w.fallback_used) {
            ++check.excluded;
            continue;
        }
        const ValueEstimate v = value_single_arm(arm, omega, beta, w.value, oracle);
        const double gap = std::abs(v.value_active - v.value_passive);
        const double bisected = classical_index_bisect(arm, omega, beta, oracle);
        if (gap <= 1e-5 && std::abs(bisected - w.value) <= 2e-4) {
            ++check.passed;
        } else {
            std::ostringstream msg;
            msg << "instance " << i << ": index " << w.value << ", indifference gap " << gap << ", bisection "
                << bisected;
            record_failure(check, msg.str());
        }
    }
    return check;
}

CheckResult check_monotone_membership(std::uint64_t seed, std::size_t count, std::size_t grid_points) {
    CheckResult check;
    check.name = "monotone membership for beta <= 0.5";
    const OracleConfig oracle;
    for (std::size_t i = 0; i < count; ++i) {
        Rng rng = make_stream(seed, i, kMembershipSalt);
        const std::size_t k = 2 + (i % 2);
        const double beta = (i / 2) % 2 == 0 ? 0.3 : 0.5;
        const Arm arm = random_arm(rng, k, varied_arm_options(rng));
        const Belief omega = random_belief(rng, k);
        bool seen_passive = false;
        bool monotone = true;
        std::size_t bad_point = 0;
        for (std::size_t g = 0; g < grid_points && monotone; ++g) {
            const double m = grid_points > 1 ? arm.max_reward() * static_cast<double>(g) /
                                                   static_cast<double>(grid_points - 1)
                                             : 0.0;
            const Membership status = membership_probe(arm, omega, beta, m, oracle);
            if (status == Membership::Passive) seen_passive = true;
            if (status == Membership::Active && seen_passive) {
                monotone = false;
                bad_point = g;
            }
        }
        if (monotone) {
            ++check.passed;
        } else {
            record_failure(check, "instance " + std::to_string(i) + ": passive to active at grid point " +
                                      std::to_string(bad_point));
        }
    }
    return check;
}

CheckResult check_extreme_points(const ExperimentConfig& config) {
    CheckResult check;
    check.name = "extreme-point index equals reward";
    for (const MachineSpec& machine : config.machines) {
        const PreparedInstance prepared = build_instance(config, machine.name);
        for (const Arm& arm : prepared.instance.arms()) {
            for (std::size_t k = 0; k < arm.states(); ++k) {
                const IndexResult w =
                    approximate_whittle_index(arm, Belief::extreme_point(k, arm.states()), config.discount);
                if (std::abs(w.value - arm.rewards()[k]) <= 1e-9) {
                    ++check.passed;
                } else {
                    std::ostringstream msg;
                    msg.precision(17);
                    msg << machine.name << "/" << arm.label() << " state " << k << ": index " << w.value
                        << ", reward " << arm.rewards()[k];
                    record_failure(check, msg.str());
                }
            }
        }
    }
    return check;
}

VerifyReport run_verify(const VerifyOptions& options) {
    VerifyReport report;
    if (options.size == 0) {
        report.warnings.push_back("suite size is 0; no randomized checks were run");
        return report;
    }
    const std::size_t n = options.size;
    report.checks.push_back(check_crossing_agreement(options.seed, n, options.corrupt_analytic));
    report.checks.push_back(check_closed_form(options.seed, (n + 9) / 10));
    report.checks.push_back(check_two_state_consistency(options.seed, (n + 49) / 50));
    report.checks.push_back(check_monotone_membership(options.seed, (n + 199) / 200));
    if (options.config) report.checks.push_back(check_extreme_points(*options.config));
    return report;
}

std::string format_report(const VerifyReport& report) {
    std::ostringstream out;
    for (const std::string& w : report.warnings) out << "warning: " << w << '\n';
    for (const CheckResult& c : report.checks) {
        out << (c.ok() ? "PASS " : "FAIL ") << c.name << ": " << c.passed << " passed, " << c.failed << " failed";
        if (c.excluded) out << ", " << c.excluded << " excluded";
        out << '\n';
        for (const std::string& f : c.failures) out << "  " << f << '\n';
    }
    out << (report.ok() ? "all checks passed" : "some checks failed") << '\n';
    return out.str();
}

}  // namespace rmab
