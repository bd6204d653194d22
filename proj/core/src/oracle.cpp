#include "rmab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace rmab {

namespace {

constexpr double kTieTolerance = 1e-12;

}  // namespace

OracleHorizonError::OracleHorizonError(std::size_t required, std::size_t limit)
    : std::runtime_error("value oracle needs horizon " + std::to_string(required) + " (limit " +
                         std::to_string(limit) + "); raise epsilon or lower the discount"),
      required_(required) {}

std::size_t OracleConfig::horizon(double discount, double max_reward, double subsidy) const {
    if (!(discount > 0.0 && discount < 1.0)) throw std::invalid_argument("discount must lie in (0,1)");
    if (!(epsilon > 0.0)) throw std::invalid_argument("oracle epsilon must be positive");
    const double scale = std::max({max_reward, subsidy, 1.0});
    const double t = std::ceil(std::log(epsilon * (1.0 - discount) / scale) / std::log(discount));
    const double required = std::max(t, 1.0);
    if (required > static_cast<double>(max_horizon)) {
        throw OracleHorizonError(static_cast<std::size_t>(std::min(required, 1e18)), max_horizon);
    }
    return static_cast<std::size_t>(required);
}

OracleSolution solve_single_arm(const Arm& arm, const Belief& omega, double discount, double subsidy,
                                const OracleConfig& config) {
    if (omega.size() != arm.states()) throw std::invalid_argument("oracle: belief size mismatch");
    const std::size_t k = arm.states();
    const std::size_t horizon = config.horizon(discount, arm.max_reward(), subsidy);
    const std::size_t sources = k + 1;  // 0 is omega, 1 + i is p_i
    const std::size_t depth = horizon + 1;

    // beliefs[s][j] = T^j(source s), flattened.
    std::vector<double> beliefs(sources * depth * k);
    std::vector<double> reward(sources * depth);
    const auto belief_at = [&](std::size_t s, std::size_t j) { return beliefs.data() + (s * depth + j) * k; };
    for (std::size_t s = 0; s < sources; ++s) {
        const auto start = s == 0 ? omega.probs() : arm.transition().row(s - 1);
        std::copy(start.begin(), start.end(), belief_at(s, 0));
        for (std::size_t j = 0; j < depth; ++j) {
            double* cur = belief_at(s, j);
            reward[s * depth + j] = dot(std::span<const double>(cur, k), arm.rewards());
            if (j + 1 < depth) {
                Belief next(row_times(std::span<const double>(cur, k), arm.transition()));
                std::copy(next.values().begin(), next.values().end(), belief_at(s, j + 1));
            }
        }
    }

    // Rolling tables over remaining steps n; entry (s, j) valid for j <= horizon - n.
    std::vector<double> value(sources * depth, 0.0);
    std::vector<double> passive(sources * depth, 0.0);
    std::vector<double> next_value(sources * depth, 0.0);
    std::vector<double> next_passive(sources * depth, 0.0);
    double root_active = 0.0;
    double root_passive = 0.0;
    for (std::size_t n = 1; n <= horizon; ++n) {
        const std::size_t width = horizon - n;
        for (std::size_t s = 0; s < sources; ++s) {
            for (std::size_t j = 0; j <= width; ++j) {
                const double* b = belief_at(s, j);
                double cont_value = 0.0;
                double cont_passive = 0.0;
                for (std::size_t i = 0; i < k; ++i) {
                    cont_value += b[i] * value[(1 + i) * depth];
                    cont_passive += b[i] * passive[(1 + i) * depth];
                }
                const double va = reward[s * depth + j] + discount * cont_value;
                const double vp = subsidy + discount * value[s * depth + j + 1];
                const double da = discount * cont_passive;
                const double dp = 1.0 + discount * passive[s * depth + j + 1];
                const double best = std::max(va, vp);
                double d;
                if (std::abs(va - vp) <= kTieTolerance * (1.0 + std::abs(best))) {
                    d = std::max(da, dp);  // right derivative at a kink
                } else {
                    d = va > vp ? da : dp;
                }
                next_value[s * depth + j] = best;
                next_passive[s * depth + j] = d;
                if (n == horizon && s == 0 && j == 0) {
                    root_active = va;
                    root_passive = vp;
                }
            }
        }
        std::swap(value, next_value);
        std::swap(passive, next_passive);
    }

    OracleSolution out;
    out.values = {value[0], root_active, root_passive};
    out.passive_time = passive[0];
    out.horizon = horizon;
    return out;
}

ValueEstimate value_single_arm(const Arm& arm, const Belief& omega, double discount, double subsidy,
                               const OracleConfig& config) {
    return solve_single_arm(arm, omega, discount, subsidy, config).values;
}

double passive_time(const Arm& arm, const Belief& omega, double discount, double subsidy, const OracleConfig& config) {
    return solve_single_arm(arm, omega, discount, subsidy, config).passive_time;
}

std::string_view to_string(Membership membership) {
    switch (membership) {
        case Membership::Passive: return "Passive";
        case Membership::Active: return "Active";
        case Membership::Indeterminate: return "Indeterminate";
    }
    return "unknown";
}

Membership membership_probe(const Arm& arm, const Belief& omega, double discount, double subsidy,
                            const OracleConfig& config) {
    const ValueEstimate v = value_single_arm(arm, omega, discount, subsidy, config);
    const double gap = v.value_active - v.value_passive;
    if (std::abs(gap) <= 2.0 * config.epsilon) return Membership::Indeterminate;
    return gap > 0.0 ? Membership::Active : Membership::Passive;
}

double classical_index_bisect(const Arm& arm, const Belief& omega, double discount, const OracleConfig& config) {
    const double top = arm.max_reward();
    const std::size_t points = std::max<std::size_t>(config.bisect_grid_points, 2);
    const auto gap = [&](double m) {
        const ValueEstimate v = value_single_arm(arm, omega, discount, m, config);
        return v.value_active - v.value_passive;
    };

    std::vector<double> grid(points);
    std::vector<double> gaps(points);
    for (std::size_t i = 0; i < points; ++i) {
        grid[i] = top * static_cast<double>(i) / static_cast<double>(points - 1);
        gaps[i] = gap(grid[i]);
    }
    // Indeterminate points are skipped; a clear Passive followed by a clear Active is a violation.
    bool seen_passive = false;
    for (std::size_t i = 0; i < points; ++i) {
        if (gaps[i] < -2.0 * config.epsilon) seen_passive = true;
        if (seen_passive && gaps[i] > 2.0 * config.epsilon) {
            throw NonMonotoneMembershipError("membership returns to Active at m = " + std::to_string(grid[i]));
        }
    }

    std::size_t last_active = points;
    for (std::size_t i = 0; i < points; ++i) {
        if (gaps[i] > 0.0) last_active = i;
    }
    if (last_active == points) return 0.0;
    if (last_active == points - 1) return top;

    double lo = grid[last_active];
    double hi = grid[last_active + 1];
    while (hi - lo > config.bisect_tolerance) {
        const double mid = 0.5 * (lo + hi);
        if (gap(mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace rmab
