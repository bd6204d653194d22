#pragma once

#include <cstddef>
#include <stdexcept>
#include <string_view>

#include "rmab/model.hpp"

namespace rmab {

struct OracleConfig {
    double epsilon = 1e-6;
    std::size_t max_horizon = 20000;
    double bisect_tolerance = 1e-4;
    std::size_t bisect_grid_points = 21;

    // T with beta^T max(B_{K-1}, m, 1) / (1 - beta) <= epsilon.
    std::size_t horizon(double discount, double max_reward, double subsidy) const;
};

class OracleHorizonError : public std::runtime_error {
public:
    OracleHorizonError(std::size_t required, std::size_t limit);
    std::size_t required_horizon() const noexcept { return required_; }

private:
    std::size_t required_;
};

class NonMonotoneMembershipError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ValueEstimate {
    double value = 0.0;
    double value_active = 0.0;
    double value_passive = 0.0;
};

// Finite-horizon value iteration over the reachable belief tree of one arm
// with subsidy m for passivity. Every belief in the tree is T^j(omega) or
// T^j(p_i), so nodes are memoized exactly on (source, j).
struct OracleSolution {
    ValueEstimate values;
    double passive_time = 0.0;
    std::size_t horizon = 0;
};

OracleSolution solve_single_arm(const Arm& arm, const Belief& omega, double discount, double subsidy,
                                const OracleConfig& config = {});

ValueEstimate value_single_arm(const Arm& arm, const Belief& omega, double discount, double subsidy,
                               const OracleConfig& config = {});
double passive_time(const Arm& arm, const Belief& omega, double discount, double subsidy,
                    const OracleConfig& config = {});

enum class Membership { Passive, Active, Indeterminate };
std::string_view to_string(Membership membership);

Membership membership_probe(const Arm& arm, const Belief& omega, double discount, double subsidy,
                            const OracleConfig& config = {});

// Subsidy at which omega flips from active to passive, searched in
// [0, B_{K-1}]. Throws NonMonotoneMembershipError if the coarse grid shows a
// passive-to-active transition.
double classical_index_bisect(const Arm& arm, const Belief& omega, double discount, const OracleConfig& config = {});

}  // namespace rmab
