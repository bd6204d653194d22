#pragma once

#include <cstddef>
#include <vector>

#include "rmab/crossing.hpp"
#include "rmab/linalg.hpp"
#include "rmab/model.hpp"

namespace rmab {

struct IndexOptions {
    std::size_t l_max = kDefaultScanHorizon;
    CrossingMethod method = CrossingMethod::Auto;
};

// Everything the threshold policy needs when the belief omega sits on the
// threshold: crossing times from each p_k and from omega P, the passive
// annuities f and discounted restart rows g, and H = (I - beta G)^-1.
struct IndexIngredients {
    double discount = 0.0;
    double threshold_reward = 0.0;      // r* = omega B'
    std::vector<CrossingTime> crossing_rows;  // L(p_k, omega)
    CrossingTime crossing_next = CrossingTime::never();  // L(omega P, omega)
    Vector f_values;                    // F(P)
    Matrix g_rows;                      // G(P)
    double f_next = 0.0;                // f(omega P)
    Vector g_next;                      // g(omega P)
    Matrix h_matrix;                    // H(P)
    double condition_estimate = 0.0;    // inf-norm condition number of I - beta G
};

// A_k(m) = intercepts[k] + slopes[k] m is the threshold-policy value from p_k.
struct ThresholdValueSolution {
    Vector intercepts;
    Vector slopes;  // passive times from each p_k

    double value_at(std::size_t k, double subsidy) const { return intercepts[k] + slopes[k] * subsidy; }
};

struct IndexResult {
    double value = 0.0;
    double denominator = 0.0;
    bool fallback_used = false;
};

// Zero test for the index denominator; scales with the passive-time magnitude 1/(1 - beta).
double denominator_tolerance(double discount);

IndexIngredients build_ingredients(const Arm& arm, const Belief& omega, double discount,
                                   const IndexOptions& options = {});
ThresholdValueSolution solve_threshold_values(const IndexIngredients& ingredients, const Arm& arm);

IndexResult approximate_whittle_index(const Arm& arm, const Belief& omega, double discount,
                                      const IndexOptions& options = {});
IndexResult approximate_whittle_index(const IndexIngredients& ingredients, const Arm& arm, const Belief& omega);

// Threshold-policy value of acting minus value of resting at omega, under subsidy m.
double indifference_residual(const Arm& arm, const Belief& omega, double discount, double subsidy,
                             const IndexOptions& options = {});
double indifference_residual(const IndexIngredients& ingredients, const ThresholdValueSolution& solution,
                             const Arm& arm, const Belief& omega, double subsidy);

}  // namespace rmab
