#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rmab/linalg.hpp"

namespace rmab {

class InvalidModelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline constexpr double kRowSumTolerance = 1e-12;
inline constexpr double kBeliefClampTolerance = 1e-12;
inline constexpr double kBeliefSumTolerance = 1e-10;

// Probability vector over an arm's hidden states. Entries down to -1e-12 are
// clamped to zero and the vector is renormalized on construction.
class Belief {
public:
    Belief() = default;
    explicit Belief(std::vector<double> probs);

    static Belief extreme_point(std::size_t k, std::size_t size);

    std::size_t size() const noexcept { return probs_.size(); }
    double operator[](std::size_t i) const { return probs_[i]; }
    std::span<const double> probs() const noexcept { return probs_; }
    const std::vector<double>& values() const noexcept { return probs_; }

    bool operator==(const Belief&) const = default;

private:
    std::vector<double> probs_;
};

double l1_distance(const Belief& a, const Belief& b);

class Arm {
public:
    // Validates and normalizes. A nonzero rewards[0] is subtracted from every
    // entry; the subtracted amount is kept in reward_shift().
    Arm(std::string label, Matrix transition, std::vector<double> rewards,
        std::vector<double> initial_belief);

    const std::string& label() const noexcept { return label_; }
    const Matrix& transition() const noexcept { return transition_; }
    const std::vector<double>& rewards() const noexcept { return rewards_; }
    const Belief& initial_belief() const noexcept { return initial_; }
    std::size_t states() const noexcept { return rewards_.size(); }
    double reward_shift() const noexcept { return reward_shift_; }
    double max_reward() const noexcept { return rewards_.back(); }

    // p_k, the k-th row of the transition matrix.
    Belief row(std::size_t k) const;
    double expected_reward(const Belief& belief) const;

private:
    std::string label_;
    Matrix transition_;
    std::vector<double> rewards_;
    Belief initial_;
    double reward_shift_ = 0.0;
};

class BanditInstance {
public:
    BanditInstance(std::vector<Arm> arms, std::size_t select_count, double discount);

    const std::vector<Arm>& arms() const noexcept { return arms_; }
    const Arm& arm(std::size_t n) const { return arms_.at(n); }
    std::size_t size() const noexcept { return arms_.size(); }
    std::size_t select_count() const noexcept { return select_count_; }
    double discount() const noexcept { return discount_; }

    std::vector<Belief> initial_beliefs() const;

private:
    std::vector<Arm> arms_;
    std::size_t select_count_;
    double discount_;
};

// Strict positivity of some power P^k, k <= 2K.
bool is_regular(const Matrix& transition);

Belief belief_update_active(const Arm& arm, std::size_t observed_state);
Belief belief_update_passive(const Arm& arm, const Belief& belief);
Belief k_step_update(const Arm& arm, const Belief& belief, std::uint64_t k);
Belief stationary_distribution(const Arm& arm);
// Throws InvalidModelError for a non-regular matrix.
Belief stationary_distribution(const Matrix& transition);

}  // namespace rmab
