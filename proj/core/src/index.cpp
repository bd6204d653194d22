#include "rmab/index.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>

namespace rmab {

namespace {

// (1 - beta^L) / (1 - beta), with L = Never giving the limit 1/(1 - beta).
double passive_annuity(const CrossingTime& l, double discount) {
    if (l.is_never()) return 1.0 / (1.0 - discount);
    return -std::expm1(static_cast<double>(l.steps()) * std::log(discount)) / (1.0 - discount);
}

// beta^L T^L(start), or the zero row for L = Never.
Vector restart_row(const Arm& arm, const Belief& start, const CrossingTime& l, double discount) {
    if (l.is_never()) return Vector(arm.states(), 0.0);
    const double weight = std::pow(discount, static_cast<double>(l.steps()));
    Vector row = k_step_update(arm, start, l.steps()).values();
    for (double& x : row) x *= weight;
    return row;
}

void check_inputs(const Arm& arm, const Belief& omega, double discount) {
    if (!(discount > 0.0 && discount < 1.0)) throw std::invalid_argument("discount must lie in (0,1)");
    if (omega.size() != arm.states()) {
        throw std::invalid_argument("belief has " + std::to_string(omega.size()) + " entries but arm '" +
                                    arm.label() + "' has " + std::to_string(arm.states()) + " states");
    }
}

}  // namespace

double denominator_tolerance(double discount) { return 1e-10 * (1.0 + 1.0 / (1.0 - discount)); }

IndexIngredients build_ingredients(const Arm& arm, const Belief& omega, double discount, const IndexOptions& options) {
    check_inputs(arm, omega, discount);
    const std::size_t k = arm.states();
    IndexIngredients out;
    out.discount = discount;
    out.threshold_reward = arm.expected_reward(omega);

    const bool analytic = options.method == CrossingMethod::Auto && k == 3;
    std::optional<ChainSpectrum> chain;
    if (analytic) chain = analyze_chain(arm);
    const auto crossing = [&](const Belief& start) {
        if (analytic) return first_crossing_analytic_k3(classify_spectrum(*chain, arm, start), out.threshold_reward);
        return first_crossing_scan(arm, start, out.threshold_reward, options.l_max);
    };

    out.crossing_rows.reserve(k);
    out.f_values.resize(k);
    out.g_rows = Matrix(k, k);
    for (std::size_t i = 0; i < k; ++i) {
        const Belief p = arm.row(i);
        const CrossingTime l = crossing(p);
        out.crossing_rows.push_back(l);
        out.f_values[i] = passive_annuity(l, discount);
        const Vector g = restart_row(arm, p, l, discount);
        std::copy(g.begin(), g.end(), out.g_rows.row(i).begin());
    }

    const Belief next = belief_update_passive(arm, omega);
    out.crossing_next = crossing(next);
    out.f_next = passive_annuity(out.crossing_next, discount);
    out.g_next = restart_row(arm, next, out.crossing_next, discount);

    const Matrix a = Matrix::identity(k) - discount * out.g_rows;
    out.h_matrix = LuFactorization(a).inverse();
    out.condition_estimate = norm_inf(a) * norm_inf(out.h_matrix);
    return out;
}

ThresholdValueSolution solve_threshold_values(const IndexIngredients& ingredients, const Arm& arm) {
    const std::size_t k = arm.states();
    if (ingredients.f_values.size() != k) throw std::invalid_argument("ingredients do not match the arm");
    const LuFactorization lu(Matrix::identity(k) - ingredients.discount * ingredients.g_rows);
    ThresholdValueSolution out;
    out.slopes = lu.solve(ingredients.f_values);
    out.intercepts = lu.solve(times_column(ingredients.g_rows, arm.rewards()));
    return out;
}

IndexResult approximate_whittle_index(const IndexIngredients& ing, const Arm& arm, const Belief& omega) {
    const double beta = ing.discount;
    const Vector& b = arm.rewards();
    const Vector hgb = times_column(ing.h_matrix, times_column(ing.g_rows, b));
    const Vector hf = times_column(ing.h_matrix, ing.f_values);

    Vector shifted(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) shifted[i] = b[i] + beta * hgb[i];
    const double reward_now = dot(omega.probs(), b);
    const double numerator = reward_now - beta * dot(ing.g_next, shifted) + beta * dot(omega.probs(), hgb);

    Vector weights(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) weights[i] = beta * ing.g_next[i] - omega[i];
    const double denominator = 1.0 + beta * ing.f_next + beta * dot(weights, hf);

    IndexResult out;
    out.denominator = denominator;
    if (std::abs(denominator) < denominator_tolerance(beta)) {
        out.fallback_used = true;
        out.value = reward_now;
    } else {
        out.value = numerator / denominator;
    }
    return out;
}

IndexResult approximate_whittle_index(const Arm& arm, const Belief& omega, double discount,
                                      const IndexOptions& options) {
    return approximate_whittle_index(build_ingredients(arm, omega, discount, options), arm, omega);
}

double indifference_residual(const IndexIngredients& ing, const ThresholdValueSolution& solution, const Arm& arm,
                             const Belief& omega, double subsidy) {
    const double beta = ing.discount;
    const std::size_t k = arm.states();
    Vector values(k);
    for (std::size_t i = 0; i < k; ++i) values[i] = solution.value_at(i, subsidy);
    const double active = arm.expected_reward(omega) + beta * dot(omega.probs(), values);
    const double rest = ing.f_next * subsidy + dot(ing.g_next, arm.rewards()) + beta * dot(ing.g_next, values);
    const double passive = subsidy + beta * rest;
    return active - passive;
}

double indifference_residual(const Arm& arm, const Belief& omega, double discount, double subsidy,
                             const IndexOptions& options) {
    const IndexIngredients ing = build_ingredients(arm, omega, discount, options);
    return indifference_residual(ing, solve_threshold_values(ing, arm), arm, omega, subsidy);
}

}  // namespace rmab
