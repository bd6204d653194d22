#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rmab/config.hpp"
#include "rmab/simulation.hpp"

namespace rmab {

std::string library_version();

inline constexpr std::string_view kResultHeader = "policy,t,mean_cum_discounted_reward,stderr,runs";
inline constexpr std::string_view kCompanionHeader = "policy,t,myopic_agreement,fallback_rate,mean_raw_reward";

struct ResultRow {
    std::string policy;
    std::size_t t = 0;  // 1-based
    double mean = 0.0;
    double standard_error = 0.0;
    std::size_t runs = 0;
};

struct ResultTable {
    std::vector<std::pair<std::string, std::string>> metadata;  // written as "# key: value"
    std::vector<ResultRow> rows;
};

ResultTable make_result_table(const MonteCarloResult& result);
std::string to_csv(const ResultTable& table);
// Per-step selection agreement with the myopic rule and index fallback frequency.
std::string companion_csv(const MonteCarloResult& result);
// CSV text without its '#' lines.
std::string csv_body(std::string_view csv);

struct CompareOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> runs;
    std::optional<std::size_t> select_count;
    std::optional<std::size_t> horizon;
    std::optional<std::vector<PolicyKind>> policies;
    std::string machine;  // empty: first machine
    unsigned threads = 0;
};

struct CompareOutput {
    ExperimentConfig effective;  // config after overrides
    MonteCarloResult result;
    ResultTable table;
    std::string csv;
    std::string companion;
};

CompareOutput run_compare(const ExperimentConfig& config, const CompareOverrides& overrides = {});

}  // namespace rmab
