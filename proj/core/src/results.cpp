#include "rmab/results.hpp"

#include <cstdio>
#include <sstream>

namespace rmab {

#ifndef RMAB_VERSION_STRING
#define RMAB_VERSION_STRING "unknown"
#endif

std::string library_version() { return RMAB_VERSION_STRING; }

ResultTable make_result_table(const MonteCarloResult& result) {
    ResultTable table;
    for (const PolicyCurve& curve : result.curves) {
        const std::string name = to_string(curve.policy);
        for (std::size_t t = 0; t < result.horizon; ++t) {
            table.rows.push_back({name, t + 1, curve.mean_discounted[t], curve.stderr_discounted[t], result.runs});
        }
    }
    return table;
}

std::string to_csv(const ResultTable& table) {
    std::ostringstream out;
    for (const auto& [key, value] : table.metadata) out << "# " << key << ": " << value << '\n';
    out << kResultHeader << '\n';
    for (const ResultRow& row : table.rows) {
        out << row.policy << ',' << row.t << ',' << format_double(row.mean) << ','
            << format_double(row.standard_error) << ',' << row.runs << '\n';
    }
    return out.str();
}

std::string companion_csv(const MonteCarloResult& result) {
    std::ostringstream out;
    out << kCompanionHeader << '\n';
    for (const PolicyCurve& curve : result.curves) {
        const std::string name = to_string(curve.policy);
        for (std::size_t t = 0; t < result.horizon; ++t) {
            out << name << ',' << t + 1 << ',' << format_double(curve.myopic_agreement[t]) << ','
                << format_double(curve.fallback_rate[t]) << ',' << format_double(curve.mean_raw[t]) << '\n';
        }
    }
    return out.str();
}

std::string csv_body(std::string_view csv) {
    std::string out;
    std::size_t pos = 0;
    while (pos < csv.size()) {
        std::size_t end = csv.find('\n', pos);
        end = end == std::string_view::npos ? csv.size() : end + 1;
        if (csv[pos] != '#') out.append(csv.substr(pos, end - pos));
        pos = end;
    }
    return out;
}

CompareOutput run_compare(const ExperimentConfig& config, const CompareOverrides& overrides) {
    CompareOutput out;
    ExperimentConfig& cfg = out.effective;
    cfg = config;
    if (overrides.seed) cfg.seed = *overrides.seed;
    if (overrides.runs) cfg.runs = *overrides.runs;
    if (overrides.select_count) cfg.select_count = *overrides.select_count;
    if (overrides.horizon) cfg.horizon = *overrides.horizon;
    if (overrides.policies) cfg.policies = *overrides.policies;

    const PreparedInstance prepared = build_instance(cfg, overrides.machine);
    SimulationOptions options;
    options.l_max = cfg.l_max;
    options.threads = overrides.threads;
    out.result = run_monte_carlo(prepared.instance, cfg.policies, cfg.horizon, cfg.runs, cfg.seed, options);

    out.table = make_result_table(out.result);
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash(cfg)));
    auto& meta = out.table.metadata;
    meta.emplace_back("config_hash", hash);
    meta.emplace_back("seed", std::to_string(cfg.seed));
    meta.emplace_back("version", library_version());
    meta.emplace_back("machine", prepared.machine);
    meta.emplace_back("select_count", std::to_string(cfg.select_count));
    meta.emplace_back("discount", format_double(cfg.discount));
    meta.emplace_back("l_max", std::to_string(cfg.l_max));
    for (const std::string& note : prepared.notes) meta.emplace_back("note", note);
    for (const PolicyCurve& curve : out.result.curves) {
        if (curve.index_evaluations == 0) continue;
        meta.emplace_back("fallbacks", to_string(curve.policy) + " " + std::to_string(curve.fallbacks) + "/" +
                                           std::to_string(curve.index_evaluations));
    }
    const PolicyCurve* whittle = out.result.find(PolicyVariant::WhittleIndex);
    const PolicyCurve* myopic = out.result.find(PolicyVariant::Myopic);
    if (whittle && myopic && cfg.horizon > 0) {
        const PairedDifference d = paired_difference(*whittle, *myopic);
        meta.emplace_back("whittle_minus_myopic", "mean " + format_double(d.mean) + " stderr " +
                                                      format_double(d.standard_error));
    }
    out.csv = to_csv(out.table);
    out.companion = companion_csv(out.result);
    return out;
}

}  // namespace rmab
