#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rmab/index.hpp"
#include "rmab/model.hpp"

namespace rmab {

enum class PolicyVariant { WhittleIndex, Myopic, Random, OptimalDP };

inline constexpr std::size_t kMaxDpArms = 3;
inline constexpr std::size_t kMaxDpHorizon = 12;

struct PolicyKind {
    PolicyVariant variant = PolicyVariant::WhittleIndex;
    std::size_t dp_horizon = 0;  // OptimalDP only

    bool operator==(const PolicyKind&) const = default;
};

// "WhittleIndex", "Myopic", "Random", "OptimalDP" or "OptimalDP:<horizon>".
PolicyKind parse_policy(std::string_view text);
std::string to_string(const PolicyKind& policy);
std::string_view to_string(PolicyVariant variant);

// Indices of the m largest scores, lowest index first among equals; returned ascending.
std::vector<std::size_t> top_scores(std::span<const double> scores, std::size_t m);

struct WhittleSelection {
    std::vector<std::size_t> arms;
    std::vector<IndexResult> indices;
};

WhittleSelection select_whittle_detailed(const BanditInstance& instance, std::span<const Belief> beliefs,
                                         double discount, const IndexOptions& options = {});
std::vector<std::size_t> select_whittle(const BanditInstance& instance, std::span<const Belief> beliefs,
                                        double discount, std::size_t l_max = kDefaultScanHorizon);
std::vector<std::size_t> select_myopic(const BanditInstance& instance, std::span<const Belief> beliefs);

struct DpDecision {
    double value = 0.0;
    std::vector<std::size_t> first_action;
};

// Exhaustive finite-horizon DP over joint beliefs, memoized on beliefs
// quantized to memo_tolerance. The memo is reused across solve() calls.
class OptimalPlanner {
public:
    explicit OptimalPlanner(const BanditInstance& instance, double memo_tolerance = 1e-9);

    DpDecision solve(std::span<const Belief> beliefs, std::size_t horizon);
    std::size_t memo_size() const noexcept { return memo_.size(); }

private:
    double value(std::vector<Belief>& beliefs, std::size_t horizon);
    DpDecision best(std::vector<Belief>& beliefs, std::size_t horizon);
    std::vector<std::int64_t> key(std::span<const Belief> beliefs, std::size_t horizon) const;

    const BanditInstance& instance_;
    double tolerance_;
    std::vector<std::vector<std::size_t>> action_sets_;
    std::map<std::vector<std::int64_t>, double> memo_;
};

// Throws std::invalid_argument when N > 3 or horizon > 12.
DpDecision optimal_dp(const BanditInstance& instance, std::size_t horizon);

}  // namespace rmab
