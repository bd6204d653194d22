#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "rmab/config.hpp"
#include "rmab/index.hpp"
#include "rmab/results.hpp"
#include "rmab/verify.hpp"

namespace {

using nlohmann::json;

std::vector<double> parse_numbers(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        const double x = std::stod(item, &used);
        if (item.find_first_not_of(" \t", used) != std::string::npos) {
            throw std::invalid_argument("bad number '" + item + "' in belief");
        }
        out.push_back(x);
    }
    return out;
}

std::vector<rmab::PolicyKind> parse_policy_list(const std::string& text) {
    std::vector<rmab::PolicyKind> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(rmab::parse_policy(item));
    if (out.empty()) throw std::invalid_argument("empty policy list");
    return out;
}

json crossing_json(const rmab::CrossingTime& t) {
    return t.is_finite() ? json(t.steps()) : json("never");
}

struct IndexArgs {
    std::string config;
    std::string machine;
    std::string arm;
    std::string belief;
    bool json_output = false;
};

int cmd_index(const IndexArgs& args) {
    const rmab::ExperimentConfig cfg = rmab::load_config(args.config);
    const rmab::PreparedInstance prepared = rmab::build_instance(cfg, args.machine);
    const rmab::Arm* arm = nullptr;
    for (const rmab::Arm& a : prepared.instance.arms()) {
        if (a.label() == args.arm) arm = &a;
    }
    if (!arm) throw std::invalid_argument("no arm '" + args.arm + "' in " + prepared.machine);
    const rmab::Belief omega = args.belief.empty() ? arm->initial_belief() : rmab::Belief(parse_numbers(args.belief));
    if (omega.size() != arm->states()) {
        throw std::invalid_argument("belief has " + std::to_string(omega.size()) + " entries, arm has " +
                                    std::to_string(arm->states()) + " states");
    }

    rmab::IndexOptions options;
    options.l_max = cfg.l_max;
    const rmab::IndexIngredients ing = rmab::build_ingredients(*arm, omega, cfg.discount, options);
    const rmab::IndexResult w = rmab::approximate_whittle_index(ing, *arm, omega);

    if (args.json_output) {
        json out;
        out["machine"] = prepared.machine;
        out["arm"] = arm->label();
        out["belief"] = omega.values();
        out["index"] = w.value;
        out["denominator"] = w.denominator;
        out["fallback_used"] = w.fallback_used;
        out["threshold_reward"] = ing.threshold_reward;
        json rows = json::array();
        for (const auto& t : ing.crossing_rows) rows.push_back(crossing_json(t));
        out["crossing_rows"] = rows;
        out["crossing_next"] = crossing_json(ing.crossing_next);
        out["f"] = ing.f_values;
        out["g"] = ing.g_rows.to_rows();
        out["f_next"] = ing.f_next;
        out["g_next"] = ing.g_next;
        out["condition_estimate"] = ing.condition_estimate;
        out["notes"] = prepared.notes;
        std::cout << out.dump(2) << '\n';
        return 0;
    }

    std::cout.precision(12);
    std::cout << prepared.machine << "/" << arm->label() << " at belief (";
    for (std::size_t k = 0; k < omega.size(); ++k) std::cout << (k ? ", " : "") << omega[k];
    std::cout << ")\n";
    std::cout << "  index            " << w.value << (w.fallback_used ? "  (fallback: myopic reward)" : "") << '\n';
    std::cout << "  denominator      " << w.denominator << '\n';
    std::cout << "  threshold reward " << ing.threshold_reward << '\n';
    for (std::size_t k = 0; k < arm->states(); ++k) {
        std::cout << "  from p_" << k << ": L = " << ing.crossing_rows[k].to_string() << ", f = " << ing.f_values[k]
                  << ", g = (";
        for (std::size_t j = 0; j < arm->states(); ++j) std::cout << (j ? ", " : "") << ing.g_rows(k, j);
        std::cout << ")\n";
    }
    std::cout << "  from omega P: L = " << ing.crossing_next.to_string() << ", f = " << ing.f_next << ", g = (";
    for (std::size_t j = 0; j < ing.g_next.size(); ++j) std::cout << (j ? ", " : "") << ing.g_next[j];
    std::cout << ")\n";
    for (const std::string& note : prepared.notes) std::cout << "  note: " << note << '\n';
    return 0;
}

struct CompareArgs {
    std::string config;
    std::string output;
    std::string policies;
    std::string machine;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> select_count;
    std::optional<std::size_t> runs;
    std::optional<std::size_t> horizon;
    unsigned threads = 0;
};

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

int cmd_compare(const CompareArgs& args) {
    const rmab::ExperimentConfig cfg = rmab::load_config(args.config);
    rmab::CompareOverrides overrides;
    overrides.seed = args.seed;
    overrides.select_count = args.select_count;
    overrides.runs = args.runs;
    overrides.horizon = args.horizon;
    overrides.machine = args.machine;
    overrides.threads = args.threads;
    if (!args.policies.empty()) overrides.policies = parse_policy_list(args.policies);

    const rmab::CompareOutput result = rmab::run_compare(cfg, overrides);
    const std::filesystem::path output = args.output.empty() ? cfg.output_path : args.output;
    std::filesystem::path companion = output;
    companion.replace_filename(output.stem().string() + "_selection.csv");
    write_file(output, result.csv);
    write_file(companion, result.companion);

    std::cout << "wrote " << output.string() << " and " << companion.string() << '\n';
    for (const rmab::PolicyCurve& curve : result.result.curves) {
        std::cout << "  " << rmab::to_string(curve.policy) << ": mean discounted reward at T = "
                  << curve.mean_discounted.back() << " (stderr " << curve.stderr_discounted.back() << ")";
        if (curve.index_evaluations) {
            std::cout << ", fallbacks " << curve.fallbacks << "/" << curve.index_evaluations;
        }
        std::cout << '\n';
    }
    return 0;
}

struct VerifyArgs {
    std::string config;
    std::uint64_t seed = 1;
    std::size_t size = 1000;
    bool inject_fault = false;
};

int cmd_verify(const VerifyArgs& args) {
    std::optional<rmab::ExperimentConfig> cfg;
    if (!args.config.empty()) cfg = rmab::load_config(args.config);
    rmab::VerifyOptions options;
    options.seed = args.seed;
    options.size = args.size;
    options.corrupt_analytic = args.inject_fault;
    options.config = cfg ? &*cfg : nullptr;
    const rmab::VerifyReport report = rmab::run_verify(options);
    std::cout << rmab::format_report(report);
    return report.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Approximate Whittle index policy for partially observed restless bandits"};
    app.set_version_flag("--version", rmab::library_version());
    app.require_subcommand(1);

    IndexArgs index_args;
    auto* index = app.add_subcommand("index", "Evaluate the approximate index of one arm at one belief");
    index->add_option("-c,--config", index_args.config, "Experiment config")->required()->check(CLI::ExistingFile);
    index->add_option("--machine", index_args.machine, "Machine name (default: first)");
    index->add_option("-a,--arm", index_args.arm, "Arm label")->required();
    index->add_option("-b,--belief", index_args.belief,
                      "Comma-separated belief in ascending-reward state order (default: the arm's initial belief)");
    index->add_flag("--json", index_args.json_output, "Machine-readable output");

    CompareArgs compare_args;
    auto* compare = app.add_subcommand("compare", "Monte Carlo comparison of policies; writes CSV");
    compare->add_option("-c,--config", compare_args.config, "Experiment config")->required()->check(CLI::ExistingFile);
    compare->add_option("-o,--output", compare_args.output, "CSV path (default: output_path from the config)");
    compare->add_option("-s,--seed", compare_args.seed, "Base seed override");
    compare->add_option("-p,--policies", compare_args.policies, "Comma-separated policy list override");
    compare->add_option("-m,--select-count", compare_args.select_count, "Arms activated per step (M) override");
    compare->add_option("-r,--runs", compare_args.runs, "Monte Carlo run count override");
    compare->add_option("--horizon", compare_args.horizon, "Horizon override");
    compare->add_option("--machine", compare_args.machine, "Machine name (default: first)");
    compare->add_option("-j,--threads", compare_args.threads, "Worker threads (0: all cores)");

    VerifyArgs verify_args;
    auto* verify = app.add_subcommand("verify", "Run the randomized property suites");
    verify->add_option("-c,--config", verify_args.config, "Config whose arms get the extreme-point check")
        ->check(CLI::ExistingFile);
    verify->add_option("-s,--seed", verify_args.seed, "Suite seed");
    verify->add_option("-n,--size", verify_args.size, "Number of crossing instances; other suites scale from it");
    verify->add_flag("--inject-fault", verify_args.inject_fault, "Corrupt the analytic crossing (negative control)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // --help and --version also arrive here, with exit code 0.
        return app.exit(e) == 0 ? 0 : 2;
    }
    try {
        if (*index) return cmd_index(index_args);
        if (*compare) return cmd_compare(compare_args);
        if (*verify) return cmd_verify(verify_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
