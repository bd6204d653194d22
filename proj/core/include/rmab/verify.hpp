#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "rmab/config.hpp"

namespace rmab {

struct VerifyOptions {
    std::uint64_t seed = 1;
    // Crossing instances; the slower suites scale down from this.
    std::size_t size = 1000;
    // Test hook: shifts every finite analytic crossing by one step.
    bool corrupt_analytic = false;
    // Fixture arms for the extreme-point check; skipped when null.
    const ExperimentConfig* config = nullptr;
};

struct CheckResult {
    std::string name;
    std::size_t passed = 0;
    std::size_t failed = 0;
    std::size_t excluded = 0;
    std::vector<std::string> failures;  // first few, for the report

    bool ok() const noexcept { return failed == 0; }
};

struct VerifyReport {
    std::vector<CheckResult> checks;
    std::vector<std::string> warnings;

    bool ok() const noexcept;
};

VerifyReport run_verify(const VerifyOptions& options);
std::string format_report(const VerifyReport& report);

// Individual suites, also used by the tests.
CheckResult check_crossing_agreement(std::uint64_t seed, std::size_t count, bool corrupt_analytic = false);
CheckResult check_closed_form(std::uint64_t seed, std::size_t count);
CheckResult check_two_state_consistency(std::uint64_t seed, std::size_t count);
CheckResult check_monotone_membership(std::uint64_t seed, std::size_t count, std::size_t grid_points = 200);
CheckResult check_extreme_points(const ExperimentConfig& config);

}  // namespace rmab
