#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace oracle {

Mat multiply(const Mat& a, const Mat& b) {
    Mat out(a.size(), Vec(b[0].size(), 0.0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t k = 0; k < b.size(); ++k)
            for (std::size_t j = 0; j < b[0].size(); ++j) out[i][j] += a[i][k] * b[k][j];
    return out;
}

Vec left_multiply(const Vec& v, const Mat& m) {
    Vec out(m[0].size(), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = 0; j < out.size(); ++j) out[j] += v[i] * m[i][j];
    return out;
}

double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

Mat power(const Mat& m, std::size_t k) {
    Mat out(m.size(), Vec(m.size(), 0.0));
    for (std::size_t i = 0; i < m.size(); ++i) out[i][i] = 1.0;
    for (std::size_t step = 0; step < k; ++step) out = multiply(out, m);
    return out;
}

Vec solve(Mat a, Vec b) {
    const std::size_t n = a.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        if (a[pivot][col] == 0.0) throw std::runtime_error("oracle::solve: singular system");
        std::swap(a[pivot], a[col]);
        std::swap(b[pivot], b[col]);
        const double d = a[col][col];
        for (std::size_t j = 0; j < n; ++j) a[col][j] /= d;
        b[col] /= d;
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || a[r][col] == 0.0) continue;
            const double f = a[r][col];
            for (std::size_t j = 0; j < n; ++j) a[r][j] -= f * a[col][j];
            b[r] -= f * b[col];
        }
    }
    return b;
}

Vec stationary_by_power_iteration(const Mat& p, std::size_t iterations) {
    Vec v(p.size(), 1.0 / static_cast<double>(p.size()));
    for (std::size_t i = 0; i < iterations; ++i) {
        Vec next = left_multiply(v, p);
        double diff = 0.0;
        for (std::size_t j = 0; j < v.size(); ++j) diff += std::abs(next[j] - v[j]);
        v = std::move(next);
        if (diff < 1e-16) break;
    }
    return v;
}

double reward_after(const Mat& p, const Vec& start, const Vec& rewards, std::size_t k) {
    return dot(left_multiply(start, power(p, k)), rewards);
}

std::optional<std::size_t> first_crossing(const Mat& p, const Vec& start, const Vec& rewards, double threshold,
                                          std::size_t limit, double margin) {
    Vec b = start;
    for (std::size_t k = 0; k <= limit; ++k) {
        if (dot(b, rewards) > threshold + margin) return k;
        b = left_multiply(b, p);
    }
    return std::nullopt;
}

namespace {

// Chain states: for each source (rows of P, then omega P) the beliefs up to
// and including the first crossing; a source that never crosses gets a single
// absorbing passive state.
struct Segment {
    Vec start;
    std::optional<std::size_t> crossing;
    std::size_t first_state = 0;
};

struct ThresholdChain {
    std::vector<Segment> segments;  // K rows, then omega P
    std::size_t states = 0;
};

ThresholdChain build_chain(const Mat& p, const Vec& rewards, const Vec& omega, std::size_t limit) {
    const double r = dot(omega, rewards);
    ThresholdChain chain;
    for (std::size_t i = 0; i <= p.size(); ++i) {
        Segment s;
        s.start = i < p.size() ? p[i] : left_multiply(omega, p);
        s.crossing = first_crossing(p, s.start, rewards, r, limit);
        s.first_state = chain.states;
        chain.states += s.crossing ? *s.crossing + 1 : 1;
        chain.segments.push_back(std::move(s));
    }
    return chain;
}

// Values of all chain states under subsidy m.
Vec chain_values(const ThresholdChain& chain, const Mat& p, const Vec& rewards, double discount, double subsidy) {
    const std::size_t n = chain.states;
    Mat a(n, Vec(n, 0.0));
    Vec rhs(n, 0.0);
    for (const Segment& s : chain.segments) {
        if (!s.crossing) {
            const std::size_t at = s.first_state;
            a[at][at] = 1.0 - discount;
            rhs[at] = subsidy;
            continue;
        }
        Vec b = s.start;
        for (std::size_t j = 0; j <= *s.crossing; ++j) {
            const std::size_t at = s.first_state + j;
            a[at][at] += 1.0;
            if (j < *s.crossing) {
                rhs[at] = subsidy;
                a[at][at + 1] -= discount;
                b = left_multiply(b, p);
            } else {
                rhs[at] = dot(b, rewards);
                for (std::size_t k = 0; k < p.size(); ++k) a[at][chain.segments[k].first_state] -= discount * b[k];
            }
        }
    }
    return solve(a, rhs);
}

}  // namespace

double threshold_residual(const Mat& p, const Vec& rewards, const Vec& omega, double discount, double subsidy,
                          std::size_t crossing_limit) {
    const ThresholdChain chain = build_chain(p, rewards, omega, crossing_limit);
    const Vec v = chain_values(chain, p, rewards, discount, subsidy);
    double active = dot(omega, rewards);
    for (std::size_t k = 0; k < p.size(); ++k) active += discount * omega[k] * v[chain.segments[k].first_state];
    const double passive = subsidy + discount * v[chain.segments.back().first_state];
    return active - passive;
}

double threshold_index(const Mat& p, const Vec& rewards, const Vec& omega, double discount,
                       std::size_t crossing_limit) {
    const double r0 = threshold_residual(p, rewards, omega, discount, 0.0, crossing_limit);
    const double r1 = threshold_residual(p, rewards, omega, discount, 1.0, crossing_limit);
    return r0 / (r0 - r1);
}

namespace {

struct ArmRecursion {
    const Mat& p;
    const Vec& rewards;
    double discount;
    double subsidy;
    std::map<std::pair<std::size_t, Vec>, double> memo;

    ArmValues both(const Vec& b, std::size_t horizon) {
        double active = dot(b, rewards);
        for (std::size_t k = 0; k < p.size(); ++k) {
            if (b[k] > 0.0) active += discount * b[k] * value(p[k], horizon - 1);
        }
        const double passive = subsidy + discount * value(left_multiply(b, p), horizon - 1);
        return {std::max(active, passive), active, passive};
    }

    double value(const Vec& b, std::size_t horizon) {
        if (horizon == 0) return 0.0;
        const auto key = std::make_pair(horizon, b);
        if (auto it = memo.find(key); it != memo.end()) return it->second;
        const double v = both(b, horizon).value;
        memo.emplace(key, v);
        return v;
    }
};

std::vector<std::vector<std::size_t>> subsets(std::size_t n, std::size_t m) {
    std::vector<std::vector<std::size_t>> out;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        std::vector<std::size_t> s;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (1u << i)) s.push_back(i);
        if (s.size() == m) out.push_back(s);
    }
    return out;
}

// Expected reward now plus discounted continuation for one action.
template <class Continue>
double action_value(const std::vector<ToyArm>& arms, const std::vector<std::size_t>& action, double discount,
                    const std::vector<Vec>& beliefs, Continue&& next_value) {
    double now = 0.0;
    for (std::size_t n : action) now += dot(beliefs[n], arms[n].rewards);
    std::vector<Vec> next(beliefs.size());
    for (std::size_t n = 0; n < beliefs.size(); ++n) next[n] = left_multiply(beliefs[n], arms[n].p);

    // Recurse over every combination of observed states of the active arms.
    double expected = 0.0;
    std::function<void(std::size_t, double)> expand = [&](std::size_t idx, double prob) {
        if (idx == action.size()) {
            expected += prob * next_value(next);
            return;
        }
        const std::size_t n = action[idx];
        for (std::size_t s = 0; s < beliefs[n].size(); ++s) {
            if (beliefs[n][s] == 0.0) continue;
            next[n] = arms[n].p[s];
            expand(idx + 1, prob * beliefs[n][s]);
        }
        next[n] = left_multiply(beliefs[n], arms[n].p);
    };
    expand(0, 1.0);
    return now + discount * expected;
}

}  // namespace

ArmValues finite_horizon_arm_value(const Mat& p, const Vec& rewards, const Vec& omega, double discount,
                                   double subsidy, std::size_t horizon) {
    ArmRecursion rec{p, rewards, discount, subsidy, {}};
    if (horizon == 0) return {0.0, 0.0, 0.0};
    return rec.both(omega, horizon);
}

double optimal_tree_value(const std::vector<ToyArm>& arms, std::size_t select_count, double discount,
                          const std::vector<Vec>& beliefs, std::size_t horizon) {
    if (horizon == 0) return 0.0;
    double best = -1e300;
    for (const auto& action : subsets(arms.size(), select_count)) {
        best = std::max(best, action_value(arms, action, discount, beliefs, [&](const std::vector<Vec>& next) {
                            return optimal_tree_value(arms, select_count, discount, next, horizon - 1);
                        }));
    }
    return best;
}

double policy_tree_value(const std::vector<ToyArm>& arms, const SelectionRule& rule, double discount,
                         const std::vector<Vec>& beliefs, std::size_t horizon) {
    if (horizon == 0) return 0.0;
    return action_value(arms, rule(beliefs), discount, beliefs, [&](const std::vector<Vec>& next) {
        return policy_tree_value(arms, rule, discount, next, horizon - 1);
    });
}

}  // namespace oracle
