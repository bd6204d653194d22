#include "rmab/policy.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rmab {

std::string_view to_string(PolicyVariant variant) {
    switch (variant) {
        case PolicyVariant::WhittleIndex: return "WhittleIndex";
        case PolicyVariant::Myopic: return "Myopic";
        case PolicyVariant::Random: return "Random";
        case PolicyVariant::OptimalDP: return "OptimalDP";
    }
    return "unknown";
}

std::string to_string(const PolicyKind& policy) {
    std::string out(to_string(policy.variant));
    if (policy.variant == PolicyVariant::OptimalDP && policy.dp_horizon > 0) {
        out += ':' + std::to_string(policy.dp_horizon);
    }
    return out;
}

PolicyKind parse_policy(std::string_view text) {
    const auto colon = text.find(':');
    const std::string_view name = text.substr(0, colon);
    for (PolicyVariant v : {PolicyVariant::WhittleIndex, PolicyVariant::Myopic, PolicyVariant::Random,
                            PolicyVariant::OptimalDP}) {
        if (name != to_string(v)) continue;
        PolicyKind out{v, 0};
        if (colon != std::string_view::npos) {
            if (v != PolicyVariant::OptimalDP) {
                throw std::invalid_argument("only OptimalDP takes a horizon suffix: '" + std::string(text) + "'");
            }
            const std::string_view digits = text.substr(colon + 1);
            const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), out.dp_horizon);
            if (ec != std::errc() || ptr != digits.data() + digits.size()) {
                throw std::invalid_argument("bad OptimalDP horizon in '" + std::string(text) + "'");
            }
        }
        return out;
    }
    throw std::invalid_argument("unknown policy '" + std::string(text) +
                                "' (expected WhittleIndex, Myopic, Random or OptimalDP[:horizon])");
}

std::vector<std::size_t> top_scores(std::span<const double> scores, std::size_t m) {
    if (m > scores.size()) throw std::invalid_argument("cannot select more arms than exist");
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    order.resize(m);
    std::sort(order.begin(), order.end());
    return order;
}

namespace {

void check_beliefs(const BanditInstance& instance, std::span<const Belief> beliefs) {
    if (beliefs.size() != instance.size()) {
        throw std::invalid_argument("expected " + std::to_string(instance.size()) + " beliefs, got " +
                                    std::to_string(beliefs.size()));
    }
    for (std::size_t n = 0; n < beliefs.size(); ++n) {
        if (beliefs[n].size() != instance.arm(n).states()) {
            throw std::invalid_argument("belief for arm " + std::to_string(n) + " has the wrong size");
        }
    }
}

void enumerate_subsets(std::size_t n, std::size_t m, std::size_t from, std::vector<std::size_t>& current,
                       std::vector<std::vector<std::size_t>>& out) {
    if (current.size() == m) {
        out.push_back(current);
        return;
    }
    for (std::size_t i = from; i < n; ++i) {
        current.push_back(i);
        enumerate_subsets(n, m, i + 1, current, out);
        current.pop_back();
    }
}

}  // namespace

WhittleSelection select_whittle_detailed(const BanditInstance& instance, std::span<const Belief> beliefs,
                                         double discount, const IndexOptions& options) {
    check_beliefs(instance, beliefs);
    WhittleSelection out;
    out.indices.reserve(beliefs.size());
    std::vector<double> scores(beliefs.size());
    for (std::size_t n = 0; n < beliefs.size(); ++n) {
        out.indices.push_back(approximate_whittle_index(instance.arm(n), beliefs[n], discount, options));
        scores[n] = out.indices.back().value;
    }
    out.arms = top_scores(scores, instance.select_count());
    return out;
}

std::vector<std::size_t> select_whittle(const BanditInstance& instance, std::span<const Belief> beliefs,
                                        double discount, std::size_t l_max) {
    IndexOptions options;
    options.l_max = l_max;
    return select_whittle_detailed(instance, beliefs, discount, options).arms;
}

std::vector<std::size_t> select_myopic(const BanditInstance& instance, std::span<const Belief> beliefs) {
    check_beliefs(instance, beliefs);
    std::vector<double> scores(beliefs.size());
    for (std::size_t n = 0; n < beliefs.size(); ++n) scores[n] = instance.arm(n).expected_reward(beliefs[n]);
    return top_scores(scores, instance.select_count());
}

OptimalPlanner::OptimalPlanner(const BanditInstance& instance, double memo_tolerance)
    : instance_(instance), tolerance_(memo_tolerance) {
    if (instance.size() > kMaxDpArms) {
        throw std::invalid_argument("OptimalDP supports at most " + std::to_string(kMaxDpArms) + " arms; instance has " +
                                    std::to_string(instance.size()));
    }
    std::vector<std::size_t> current;
    enumerate_subsets(instance.size(), instance.select_count(), 0, current, action_sets_);
}

std::vector<std::int64_t> OptimalPlanner::key(std::span<const Belief> beliefs, std::size_t horizon) const {
    std::vector<std::int64_t> out;
    out.push_back(static_cast<std::int64_t>(horizon));
    for (const Belief& b : beliefs)
        for (double p : b.probs()) out.push_back(std::llround(p / tolerance_));
    return out;
}

double OptimalPlanner::value(std::vector<Belief>& beliefs, std::size_t horizon) {
    if (horizon == 0) return 0.0;
    std::vector<std::int64_t> k = key(beliefs, horizon);
    if (const auto it = memo_.find(k); it != memo_.end()) return it->second;
    const double v = best(beliefs, horizon).value;
    memo_.emplace(std::move(k), v);
    return v;
}

DpDecision OptimalPlanner::best(std::vector<Belief>& beliefs, std::size_t horizon) {
    const double beta = instance_.discount();
    const std::size_t n_arms = beliefs.size();
    std::vector<Belief> passive_next(n_arms);
    for (std::size_t n = 0; n < n_arms; ++n) passive_next[n] = belief_update_passive(instance_.arm(n), beliefs[n]);

    DpDecision out;
    out.value = -std::numeric_limits<double>::infinity();
    for (const auto& action : action_sets_) {
        double immediate = 0.0;
        for (std::size_t n : action) immediate += instance_.arm(n).expected_reward(beliefs[n]);

        // Enumerate observation outcomes of the selected arms like an odometer.
        std::vector<Belief> next = passive_next;
        std::vector<std::size_t> outcome(action.size(), 0);
        double expected = 0.0;
        for (;;) {
            double prob = 1.0;
            for (std::size_t i = 0; i < action.size(); ++i) {
                const std::size_t n = action[i];
                prob *= beliefs[n][outcome[i]];
                next[n] = instance_.arm(n).row(outcome[i]);
            }
            if (prob > 0.0) expected += prob * value(next, horizon - 1);
            std::size_t i = 0;
            while (i < action.size() && ++outcome[i] == instance_.arm(action[i]).states()) {
                outcome[i] = 0;
                ++i;
            }
            if (i == action.size()) break;
        }
        const double total = immediate + beta * expected;
        if (total > out.value) {
            out.value = total;
            out.first_action = action;
        }
    }
    return out;
}

DpDecision OptimalPlanner::solve(std::span<const Belief> beliefs, std::size_t horizon) {
    check_beliefs(instance_, beliefs);
    if (horizon > kMaxDpHorizon) {
        throw std::invalid_argument("OptimalDP supports horizons up to " + std::to_string(kMaxDpHorizon) + "; got " +
                                    std::to_string(horizon));
    }
    std::vector<Belief> copy(beliefs.begin(), beliefs.end());
    if (horizon == 0) return {0.0, {}};
    return best(copy, horizon);
}

DpDecision optimal_dp(const BanditInstance& instance, std::size_t horizon) {
    OptimalPlanner planner(instance);
    const std::vector<Belief> beliefs = instance.initial_beliefs();
    return planner.solve(beliefs, horizon);
}

}  // namespace rmab
