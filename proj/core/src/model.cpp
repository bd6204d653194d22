#include "rmab/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <utility>

namespace rmab {

namespace {

std::string describe(const std::vector<double>& v) {
    std::ostringstream out;
    out << '(';
    for (std::size_t i = 0; i < v.size(); ++i) out << (i ? ", " : "") << v[i];
    out << ')';
    return out.str();
}

}  // namespace

Belief::Belief(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) throw InvalidModelError("belief is empty");
    double sum = 0.0;
    for (std::size_t i = 0; i < probs_.size(); ++i) {
        double& p = probs_[i];
        if (!std::isfinite(p)) throw InvalidModelError("belief entry " + std::to_string(i) + " is not finite");
        if (p < -kBeliefClampTolerance) {
            throw InvalidModelError("belief entry " + std::to_string(i) + " is negative: " + std::to_string(p));
        }
        if (p < 0.0) p = 0.0;
        sum += p;
    }
    if (std::abs(sum - 1.0) > kBeliefSumTolerance) {
        throw InvalidModelError("belief " + describe(probs_) + " sums to " + std::to_string(sum));
    }
    for (double& p : probs_) p /= sum;
}

Belief Belief::extreme_point(std::size_t k, std::size_t size) {
    if (k >= size) throw std::out_of_range("extreme point index out of range");
    std::vector<double> probs(size, 0.0);
    probs[k] = 1.0;
    return Belief(std::move(probs));
}

double l1_distance(const Belief& a, const Belief& b) {
    if (a.size() != b.size()) throw std::invalid_argument("l1_distance: size mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
    return d;
}

Arm::Arm(std::string label, Matrix transition, std::vector<double> rewards,
         std::vector<double> initial_belief)
    : label_(std::move(label)), transition_(std::move(transition)), rewards_(std::move(rewards)) {
    const std::size_t k = rewards_.size();
    const auto fail = [&](const std::string& what) {
        throw InvalidModelError("arm '" + label_ + "': " + what);
    };
    if (k < 2) fail("needs at least 2 states");
    if (transition_.rows() != k || transition_.cols() != k) {
        fail("transition matrix is " + std::to_string(transition_.rows()) + "x" +
             std::to_string(transition_.cols()) + " but rewards have " + std::to_string(k) + " entries");
    }
    if (initial_belief.size() != k) fail("initial_belief has " + std::to_string(initial_belief.size()) + " entries");

    for (std::size_t i = 0; i < k; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            const double p = transition_(i, j);
            if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
                fail("transition row " + std::to_string(i) + " entry " + std::to_string(j) + " = " +
                     std::to_string(p) + " is outside [0,1]");
            }
            sum += p;
        }
        if (std::abs(sum - 1.0) > kRowSumTolerance) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "transition row " << i << " sums to " << sum;
            fail(msg.str());
        }
    }
    if (!is_regular(transition_)) fail("transition matrix is not regular (no positive power up to 2K)");

    for (double b : rewards_) {
        if (!std::isfinite(b)) fail("rewards contain a non-finite entry");
    }
    if (rewards_[0] != 0.0) {
        reward_shift_ = rewards_[0];
        for (double& b : rewards_) b -= reward_shift_;
    }
    for (std::size_t i = 0; i + 1 < k; ++i) {
        if (rewards_[i] > rewards_[i + 1]) {
            fail("rewards are not ascending at index " + std::to_string(i) + " (" + describe(rewards_) + ")");
        }
    }

    double belief_sum = 0.0;
    for (double p : initial_belief) {
        if (!std::isfinite(p) || p < 0.0) fail("initial_belief has a negative or non-finite entry");
        belief_sum += p;
    }
    if (std::abs(belief_sum - 1.0) > kRowSumTolerance) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "initial_belief sums to " << belief_sum;
        fail(msg.str());
    }
    initial_ = Belief(std::move(initial_belief));
}

Belief Arm::row(std::size_t k) const {
    if (k >= states()) {
        throw std::out_of_range("arm '" + label_ + "': state " + std::to_string(k) + " out of range");
    }
    const auto r = transition_.row(k);
    return Belief(std::vector<double>(r.begin(), r.end()));
}

double Arm::expected_reward(const Belief& belief) const { return dot(belief.probs(), rewards_); }

BanditInstance::BanditInstance(std::vector<Arm> arms, std::size_t select_count, double discount)
    : arms_(std::move(arms)), select_count_(select_count), discount_(discount) {
    if (arms_.empty()) throw InvalidModelError("bandit instance has no arms");
    if (select_count_ < 1 || select_count_ >= arms_.size()) {
        throw InvalidModelError("select_count must satisfy 1 <= M < N; got M = " + std::to_string(select_count_) +
                                ", N = " + std::to_string(arms_.size()));
    }
    if (!(discount_ > 0.0 && discount_ < 1.0)) {
        throw InvalidModelError("discount must lie in (0,1); got " + std::to_string(discount_));
    }
}

std::vector<Belief> BanditInstance::initial_beliefs() const {
    std::vector<Belief> out;
    out.reserve(arms_.size());
    for (const Arm& arm : arms_) out.push_back(arm.initial_belief());
    return out;
}

bool is_regular(const Matrix& transition) {
    const std::size_t k = transition.rows();
    if (!transition.square() || k == 0) return false;
    // Boolean support pattern avoids underflow in long products.
    std::vector<char> base(k * k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) base[i * k + j] = transition(i, j) > 0.0;
    std::vector<char> power = base;
    for (std::size_t step = 1; step <= 2 * k; ++step) {
        if (std::all_of(power.begin(), power.end(), [](char c) { return c != 0; })) return true;
        std::vector<char> next(k * k, 0);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t m = 0; m < k; ++m) {
                if (!power[i * k + m]) continue;
                for (std::size_t j = 0; j < k; ++j)
                    if (base[m * k + j]) next[i * k + j] = 1;
            }
        power = std::move(next);
    }
    return false;
}

Belief belief_update_active(const Arm& arm, std::size_t observed_state) { return arm.row(observed_state); }

Belief belief_update_passive(const Arm& arm, const Belief& belief) {
    return Belief(row_times(belief.probs(), arm.transition()));
}

Belief k_step_update(const Arm& arm, const Belief& belief, std::uint64_t k) {
    constexpr std::uint64_t kIterateLimit = 256;
    if (k <= kIterateLimit) {
        Belief b = belief;
        for (std::uint64_t i = 0; i < k; ++i) b = belief_update_passive(arm, b);
        return b;
    }
    return Belief(row_times(belief.probs(), matrix_power(arm.transition(), k)));
}

Belief stationary_distribution(const Arm& arm) { return stationary_distribution(arm.transition()); }

Belief stationary_distribution(const Matrix& p) {
    if (!is_regular(p)) throw InvalidModelError("stationary distribution requires a regular chain");
    const std::size_t k = p.rows();
    // Solve pi (P - I) = 0 with the last balance equation replaced by sum(pi) = 1.
    Matrix a(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) a(i, j) = p(j, i) - (i == j ? 1.0 : 0.0);
    for (std::size_t j = 0; j < k; ++j) a(k - 1, j) = 1.0;
    Vector rhs(k, 0.0);
    rhs[k - 1] = 1.0;
    Vector pi = LuFactorization(std::move(a)).solve(rhs);
    for (double& x : pi) {
        if (x < 0.0 && x > -1e-12) x = 0.0;
    }
    return Belief(std::move(pi));
}

}  // namespace rmab
