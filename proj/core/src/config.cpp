#include "rmab/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace rmab {

ConfigError::ConfigError(const std::string& source, std::size_t line, const std::string& message)
    : std::runtime_error(line ? source + ":" + std::to_string(line) + ": " + message : source + ": " + message),
      line_(line) {}

std::string format_double(double x) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc()) throw std::runtime_error("cannot format number");
    return std::string(buf, ptr);
}

namespace {

std::size_t line_of(const YAML::Node& node) {
    const YAML::Mark mark = node.Mark();
    return mark.line >= 0 ? static_cast<std::size_t>(mark.line) + 1 : 0;
}

class Reader {
public:
    explicit Reader(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(const YAML::Node& node, const std::string& message) const {
        throw ConfigError(source_, line_of(node), message);
    }
    [[noreturn]] void fail(std::size_t line, const std::string& message) const {
        throw ConfigError(source_, line, message);
    }

    void expect_keys(const YAML::Node& map, std::initializer_list<std::string_view> allowed,
                     const std::string& where) const {
        if (!map.IsMap()) fail(map, where + " must be a mapping");
        for (const auto& kv : map) {
            const std::string key = kv.first.as<std::string>();
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
                fail(kv.first, "unknown key '" + key + "' in " + where);
            }
        }
    }

    YAML::Node require(const YAML::Node& map, const std::string& key, const std::string& where) const {
        const YAML::Node node = map[key];
        if (!node) fail(map, "missing required field '" + key + "' in " + where);
        return node;
    }

    double real(const YAML::Node& node, const std::string& what) const {
        if (!node.IsScalar()) fail(node, what + " must be a number");
        const std::string& text = node.Scalar();
        double out = 0.0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
        if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(out)) {
            fail(node, what + " must be a finite number, got '" + text + "'");
        }
        return out;
    }

    std::uint64_t integer(const YAML::Node& node, const std::string& what) const {
        if (!node.IsScalar()) fail(node, what + " must be a non-negative integer");
        const std::string& text = node.Scalar();
        std::uint64_t out = 0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
        if (ec != std::errc() || ptr != text.data() + text.size()) {
            fail(node, what + " must be a non-negative integer, got '" + text + "'");
        }
        return out;
    }

    std::string string(const YAML::Node& node, const std::string& what) const {
        if (!node.IsScalar() || node.Scalar().empty()) fail(node, what + " must be a non-empty string");
        return node.Scalar();
    }

    std::vector<double> reals(const YAML::Node& node, const std::string& what) const {
        if (!node.IsSequence()) fail(node, what + " must be a list of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < node.size(); ++i) out.push_back(real(node[i], what + " entry " + std::to_string(i)));
        return out;
    }

    const std::string& source() const noexcept { return source_; }

private:
    std::string source_;
};

ArmSpec read_arm(const Reader& rd, const YAML::Node& node, const std::string& machine) {
    rd.expect_keys(node, {"label", "transition", "rewards", "initial_belief"}, "arm of " + machine);
    ArmSpec arm;
    arm.line = line_of(node);
    arm.label = rd.string(rd.require(node, "label", "arm of " + machine), "label");
    const std::string where = machine + "/" + arm.label;

    const YAML::Node rows = rd.require(node, "transition", where);
    if (!rows.IsSequence() || rows.size() == 0) rd.fail(rows, where + ": transition must be a list of rows");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        arm.transition.push_back(rd.reals(rows[i], where + ": transition row " + std::to_string(i)));
        arm.row_lines.push_back(line_of(rows[i]));
    }
    const YAML::Node rewards = rd.require(node, "rewards", where);
    arm.rewards = rd.reals(rewards, where + ": rewards");
    arm.rewards_line = line_of(rewards);
    const YAML::Node belief = rd.require(node, "initial_belief", where);
    arm.initial_belief = rd.reals(belief, where + ": initial_belief");
    arm.belief_line = line_of(belief);
    return arm;
}

// Sorting permutation for ascending rewards (stable, so equal rewards keep order).
std::vector<std::size_t> reward_order(const std::vector<double>& rewards) {
    std::vector<std::size_t> order(rewards.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rewards[a] < rewards[b]; });
    return order;
}

Arm make_arm(const ArmSpec& spec, const std::string& machine, std::vector<std::string>* notes) {
    const std::size_t k = spec.rewards.size();
    const std::vector<std::size_t> order = reward_order(spec.rewards);
    const bool permuted = !std::is_sorted(order.begin(), order.end());
    Matrix p(k, k);
    std::vector<double> rewards(k);
    std::vector<double> belief(k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) p(i, j) = spec.transition[order[i]][order[j]];
        rewards[i] = spec.rewards[order[i]];
        belief[i] = spec.initial_belief[order[i]];
    }
    Arm arm(spec.label, std::move(p), std::move(rewards), std::move(belief));
    if (notes && permuted) {
        std::string text = machine + "/" + spec.label + ": rewards not ascending; states reordered as (";
        for (std::size_t i = 0; i < k; ++i) text += (i ? ", " : "") + std::to_string(order[i]);
        notes->push_back(text + ")");
    }
    if (notes && arm.reward_shift() != 0.0) {
        notes->push_back(machine + "/" + spec.label + ": rewards shifted by -" + format_double(arm.reward_shift()) +
                         " so that the lowest reward is 0");
    }
    return arm;
}

void validate_arm(const Reader& rd, const ArmSpec& arm, const std::string& machine) {
    const std::string where = machine + "/" + arm.label;
    const std::size_t k = arm.transition.size();
    if (k < 2) rd.fail(arm.line, where + ": an arm needs at least 2 states");
    for (std::size_t i = 0; i < k; ++i) {
        const auto& row = arm.transition[i];
        const std::size_t line = arm.row_lines.size() > i ? arm.row_lines[i] : arm.line;
        if (row.size() != k) {
            rd.fail(line, where + ": transition row " + std::to_string(i) + " has " + std::to_string(row.size()) +
                              " entries, expected " + std::to_string(k));
        }
        for (double x : row) {
            if (x < 0.0 || x > 1.0) {
                rd.fail(line, where + ": transition row " + std::to_string(i) + " has entry " + format_double(x) +
                                  " outside [0, 1]");
            }
        }
        const double sum = std::accumulate(row.begin(), row.end(), 0.0);
        if (std::abs(sum - 1.0) > kRowSumTolerance) {
            rd.fail(line, where + ": transition row " + std::to_string(i) + " sums to " + format_double(sum) +
                              ", expected 1");
        }
    }
    if (arm.rewards.size() != k) {
        rd.fail(arm.rewards_line, where + ": rewards has " + std::to_string(arm.rewards.size()) + " entries, expected " +
                                      std::to_string(k));
    }
    if (arm.initial_belief.size() != k) {
        rd.fail(arm.belief_line, where + ": initial_belief has " + std::to_string(arm.initial_belief.size()) +
                                     " entries, expected " + std::to_string(k));
    }
    for (double x : arm.initial_belief) {
        if (x < 0.0) rd.fail(arm.belief_line, where + ": initial_belief has negative entry " + format_double(x));
    }
    const double belief_sum = std::accumulate(arm.initial_belief.begin(), arm.initial_belief.end(), 0.0);
    if (std::abs(belief_sum - 1.0) > kRowSumTolerance) {
        rd.fail(arm.belief_line, where + ": initial_belief sums to " + format_double(belief_sum) + ", expected 1");
    }
    try {
        make_arm(arm, machine, nullptr);
    } catch (const InvalidModelError& e) {
        rd.fail(arm.line, where + ": " + e.what());
    }
}

void validate(const Reader& rd, const ExperimentConfig& cfg, const YAML::Node& root) {
    if (!(cfg.discount > 0.0 && cfg.discount < 1.0)) {
        rd.fail(root["discount"], "discount must lie in (0, 1), got " + format_double(cfg.discount));
    }
    if (cfg.horizon < 1) rd.fail(root["horizon"], "horizon must be at least 1");
    if (cfg.runs < 1) rd.fail(root["runs"], "runs must be at least 1");
    if (cfg.select_count < 1) rd.fail(root["select_count"], "select_count must be at least 1");
    if (cfg.machines.empty()) rd.fail(root["machines"], "machines must list at least one machine");
    std::set<std::string> machine_names;
    const YAML::Node machines = root["machines"];
    for (std::size_t m = 0; m < cfg.machines.size(); ++m) {
        const MachineSpec& machine = cfg.machines[m];
        if (!machine_names.insert(machine.name).second) {
            rd.fail(machines[m], "duplicate machine name '" + machine.name + "'");
        }
        if (cfg.select_count >= machine.arms.size()) {
            rd.fail(root["select_count"], "select_count " + std::to_string(cfg.select_count) + " must be below the " +
                                              std::to_string(machine.arms.size()) + " arms of " + machine.name);
        }
        std::set<std::string> labels;
        for (const ArmSpec& arm : machine.arms) {
            if (!labels.insert(arm.label).second) {
                rd.fail(arm.line, "duplicate arm label '" + arm.label + "' in " + machine.name);
            }
            validate_arm(rd, arm, machine.name);
        }
    }
}

std::vector<std::string> leading_comments(std::string_view text) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos < text.size() && text[pos] == '#') {
        const std::size_t end = text.find('\n', pos);
        out.emplace_back(text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos));
        if (end == std::string_view::npos) break;
        pos = end + 1;
    }
    return out;
}

void write_list(std::ostringstream& out, const std::vector<double>& xs) {
    out << '[';
    for (std::size_t i = 0; i < xs.size(); ++i) out << (i ? ", " : "") << format_double(xs[i]);
    out << ']';
}

}  // namespace

ExperimentConfig parse_config(std::string_view text, const std::string& source_name) {
    const Reader rd(source_name);
    YAML::Node root;
    try {
        root = YAML::Load(std::string(text));
    } catch (const YAML::ParserException& e) {
        throw ConfigError(source_name, e.mark.line >= 0 ? static_cast<std::size_t>(e.mark.line) + 1 : 0, e.msg);
    }
    if (!root || !root.IsMap()) throw ConfigError(source_name, 0, "expected a mapping at the top level");
    rd.expect_keys(root,
                   {"discount", "horizon", "runs", "select_count", "l_max", "seed", "policies", "output_path",
                    "machines"},
                   "the top level");

    ExperimentConfig cfg;
    cfg.header_comments = leading_comments(text);
    cfg.discount = rd.real(rd.require(root, "discount", "the top level"), "discount");
    cfg.select_count = rd.integer(rd.require(root, "select_count", "the top level"), "select_count");
    if (root["horizon"]) cfg.horizon = rd.integer(root["horizon"], "horizon");
    if (root["runs"]) cfg.runs = rd.integer(root["runs"], "runs");
    if (root["l_max"]) cfg.l_max = rd.integer(root["l_max"], "l_max");
    if (root["seed"]) cfg.seed = rd.integer(root["seed"], "seed");
    if (root["output_path"]) cfg.output_path = rd.string(root["output_path"], "output_path");
    if (const YAML::Node policies = root["policies"]) {
        if (!policies.IsSequence() || policies.size() == 0) rd.fail(policies, "policies must be a non-empty list");
        cfg.policies.clear();
        for (std::size_t i = 0; i < policies.size(); ++i) {
            try {
                cfg.policies.push_back(parse_policy(rd.string(policies[i], "policy")));
            } catch (const std::invalid_argument& e) {
                rd.fail(policies[i], e.what());
            }
        }
    }

    const YAML::Node machines = rd.require(root, "machines", "the top level");
    if (!machines.IsSequence()) rd.fail(machines, "machines must be a list");
    for (std::size_t m = 0; m < machines.size(); ++m) {
        const YAML::Node node = machines[m];
        rd.expect_keys(node, {"name", "arms"}, "machine");
        MachineSpec machine;
        machine.name = rd.string(rd.require(node, "name", "machine"), "machine name");
        const YAML::Node arms = rd.require(node, "arms", machine.name);
        if (!arms.IsSequence()) rd.fail(arms, machine.name + ": arms must be a list");
        for (std::size_t a = 0; a < arms.size(); ++a) machine.arms.push_back(read_arm(rd, arms[a], machine.name));
        cfg.machines.push_back(std::move(machine));
    }
    validate(rd, cfg, root);
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path.string(), 0, "cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.string());
}

std::string serialize_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    for (const std::string& line : cfg.header_comments) out << line << '\n';
    out << "discount: " << format_double(cfg.discount) << '\n';
    out << "horizon: " << cfg.horizon << '\n';
    out << "runs: " << cfg.runs << '\n';
    out << "select_count: " << cfg.select_count << '\n';
    out << "l_max: " << cfg.l_max << '\n';
    out << "seed: " << cfg.seed << '\n';
    out << "policies: [";
    for (std::size_t i = 0; i < cfg.policies.size(); ++i) out << (i ? ", " : "") << to_string(cfg.policies[i]);
    out << "]\n";
    out << "output_path: " << cfg.output_path << '\n';
    out << "machines:\n";
    for (const MachineSpec& machine : cfg.machines) {
        out << "  - name: " << machine.name << '\n';
        out << "    arms:\n";
        for (const ArmSpec& arm : machine.arms) {
            out << "      - label: " << arm.label << '\n';
            out << "        transition:\n";
            for (const auto& row : arm.transition) {
                out << "          - ";
                write_list(out, row);
                out << '\n';
            }
            out << "        rewards: ";
            write_list(out, arm.rewards);
            out << "\n        initial_belief: ";
            write_list(out, arm.initial_belief);
            out << '\n';
        }
    }
    return out.str();
}

std::uint64_t config_hash(const ExperimentConfig& config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : serialize_config(config)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

PreparedInstance build_instance(const ExperimentConfig& config, std::string_view machine) {
    const MachineSpec* spec = nullptr;
    if (machine.empty() && !config.machines.empty()) spec = &config.machines.front();
    for (const MachineSpec& m : config.machines) {
        if (m.name == machine) spec = &m;
    }
    if (!spec) throw std::invalid_argument("no machine named '" + std::string(machine) + "' in the config");
    std::vector<std::string> notes;
    std::vector<Arm> arms;
    arms.reserve(spec->arms.size());
    for (const ArmSpec& arm : spec->arms) arms.push_back(make_arm(arm, spec->name, &notes));
    return PreparedInstance{BanditInstance(std::move(arms), config.select_count, config.discount), spec->name,
                            std::move(notes)};
}

}  // namespace rmab
