#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rmab/model.hpp"
#include "rmab/policy.hpp"

namespace rmab {

class ConfigError : public std::runtime_error {
public:
    // line is 1-based; 0 means no location.
    ConfigError(const std::string& source, std::size_t line, const std::string& message);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Arm exactly as written in the file. Source lines are kept for error
// messages and ignored by comparisons.
struct ArmSpec {
    std::string label;
    std::vector<std::vector<double>> transition;
    std::vector<double> rewards;
    std::vector<double> initial_belief;

    std::size_t line = 0;
    std::vector<std::size_t> row_lines;
    std::size_t rewards_line = 0;
    std::size_t belief_line = 0;

    bool operator==(const ArmSpec& other) const {
        return label == other.label && transition == other.transition && rewards == other.rewards &&
               initial_belief == other.initial_belief;
    }
};

struct MachineSpec {
    std::string name;
    std::vector<ArmSpec> arms;

    bool operator==(const MachineSpec&) const = default;
};

struct ExperimentConfig {
    std::vector<std::string> header_comments;  // leading '#' lines, verbatim
    double discount = 0.0;
    std::size_t horizon = 100;
    std::size_t runs = 1000;
    std::size_t select_count = 0;
    std::size_t l_max = 500;
    std::uint64_t seed = 1;
    std::vector<PolicyKind> policies{{PolicyVariant::WhittleIndex, 0}, {PolicyVariant::Myopic, 0}};
    std::string output_path = "results.csv";
    std::vector<MachineSpec> machines;

    bool operator==(const ExperimentConfig&) const = default;
};

// Parses and validates every arm of every machine.
ExperimentConfig parse_config(std::string_view text, const std::string& source_name = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const ExperimentConfig& config);

// FNV-1a over the serialized form.
std::uint64_t config_hash(const ExperimentConfig& config);

struct PreparedInstance {
    BanditInstance instance;
    std::string machine;
    // Normalizations applied while building arms (state reordering, reward shift).
    std::vector<std::string> notes;
};

// Builds the bandit for one machine (the first when name is empty). Arms whose
// rewards are not ascending get their states reordered; a nonzero B_0 is
// shifted to 0. Both are reported in notes.
PreparedInstance build_instance(const ExperimentConfig& config, std::string_view machine = {});

// Shortest decimal form that parses back to the same double.
std::string format_double(double x);

}  // namespace rmab
