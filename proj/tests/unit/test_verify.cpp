#include <doctest.h>

#include "rmab/verify.hpp"

namespace {

const std::filesystem::path kFixtures = RMAB_FIXTURE_DIR;

}  // namespace

TEST_CASE("empty suite warns and passes") {
    rmab::VerifyOptions options;
    options.size = 0;
    const auto report = rmab::run_verify(options);
    CHECK(report.ok());
    CHECK(report.checks.empty());
    REQUIRE(report.warnings.size() == 1);
    CHECK(report.warnings[0] == "suite size is 0; no randomized checks were run");
}

TEST_CASE("small suite passes on the fixtures") {
    const auto cfg = rmab::load_config(kFixtures / "experiment2_1.cfg");
    rmab::VerifyOptions options;
    options.size = 400;
    options.seed = 3;
    options.config = &cfg;
    const auto report = rmab::run_verify(options);
    CHECK(report.ok());
    CHECK(report.checks.size() == 5);
    for (const auto& c : report.checks) {
        CAPTURE(c.name);
        CHECK(c.passed > 0);
        CHECK(c.failed == 0);
    }
    const std::string text = rmab::format_report(report);
    CHECK(text.find("FAIL") == std::string::npos);
    CHECK(text.find("all checks passed") != std::string::npos);
}

TEST_CASE("a corrupted crossing routine is caught") {
    const auto check = rmab::check_crossing_agreement(1, 300, true);
    CHECK_FALSE(check.ok());
    CHECK(check.failures.size() <= 5);
    rmab::VerifyReport report;
    report.checks.push_back(check);
    CHECK(rmab::format_report(report).find("FAIL") != std::string::npos);
    CHECK(rmab::check_crossing_agreement(1, 300, false).ok());
}
