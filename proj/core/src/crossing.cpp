#include "rmab/crossing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace rmab {

std::string CrossingTime::to_string() const { return is_finite() ? std::to_string(steps_) : "never"; }

CrossingTime first_crossing_scan(const Arm& arm, const Belief& start, double threshold_reward, std::size_t l_max) {
    if (l_max < 1) throw std::invalid_argument("first_crossing_scan: l_max must be positive");
    if (start.size() != arm.states()) throw std::invalid_argument("first_crossing_scan: belief size mismatch");
    const double target = threshold_reward + kCrossingMargin;
    Belief belief = start;
    for (std::size_t k = 0;; ++k) {
        if (arm.expected_reward(belief) > target) return CrossingTime::finite(k);
        if (k == l_max) break;
        belief = belief_update_passive(arm, belief);
    }
    return CrossingTime::never();
}

namespace {

constexpr double kPi = std::numbers::pi;
// Ratios of eigenvalue moduli this close to 1 are treated as equal moduli.
constexpr double kEqualModulusTolerance = 1e-9;
// Bounded windows are widened by this many steps to absorb rounding in the
// logarithms; the extra steps lie past the peak and cannot cross.
constexpr std::uint64_t kWindowSlack = 2;
constexpr double kWindowCeiling = 1e9;
// The case table below resolves k = 0, 1, 2 through the base case first.
constexpr std::uint64_t kFirstTailStep = 3;

enum class VerdictKind { Never, Window, UntilCrossing, Monotone, Exact };

struct Verdict {
    std::string_view id;
    VerdictKind kind;
    double bound = 0.0;  // window end (Window) or closed-form estimate (Monotone, Exact)
};

Verdict never(std::string_view id) { return {id, VerdictKind::Never}; }
Verdict window(std::string_view id, double end) { return {id, VerdictKind::Window, end}; }
Verdict until_crossing(std::string_view id) { return {id, VerdictKind::UntilCrossing}; }
Verdict monotone(std::string_view id, double estimate) { return {id, VerdictKind::Monotone, estimate}; }
Verdict exact(std::string_view id, double k) { return {id, VerdictKind::Exact, k}; }

double floor_even(double x) { return 2.0 * std::floor(x / 2.0); }
double floor_odd(double x) { return 2.0 * std::floor((x - 1.0) / 2.0) + 1.0; }

// For h(k) = a b^k + c with 0 < b < 1, a < 0: first k with h(k) > r.
double monotone_rise_estimate(double a, double b, double c, double r) {
    return std::floor(std::log((c - r) / -a) / std::log(b)) + 1.0;
}

bool equal_modulus(double x, double y) { return std::abs(std::abs(x) / std::abs(y) - 1.0) < kEqualModulusTolerance; }

Verdict dispatch_real_pair(RealPairCoefficients q, double r) {
    const double c = q.c;
    const bool below_limit = r < c;

    if (q.b1 == q.b2 && q.b1 != 0.0) {
        const double s = q.a1 + q.a2;
        if (q.b1 > 0.0 && s < 0.0) {
            return below_limit ? monotone("1.1", monotone_rise_estimate(s, q.b1, c, r)) : never("1.1");
        }
        return never("1.2");
    }
    if (q.a1 * q.b1 == 0.0) {
        if (q.b2 > 0.0 && q.a2 < 0.0) {
            return below_limit ? monotone("1.3", monotone_rise_estimate(q.a2, q.b2, c, r)) : never("1.3");
        }
        return never("1.4");
    }
    if (q.a2 * q.b2 == 0.0) {
        if (q.b1 > 0.0 && q.a1 < 0.0) {
            return below_limit ? monotone("1.5", monotone_rise_estimate(q.a1, q.b1, c, r)) : never("1.5");
        }
        return never("1.6");
    }

    auto swap_terms = [&q] {
        std::swap(q.a1, q.a2);
        std::swap(q.b1, q.b2);
    };

    if (q.b1 > 0.0 && q.b2 > 0.0) {
        if (q.a1 > 0.0 && q.a2 > 0.0) return never("1.7");
        if (q.a1 < 0.0 && q.a2 < 0.0) return below_limit ? until_crossing("1.16") : never("1.16");
        if (q.a1 > 0.0) swap_terms();  // now a1 < 0 < a2
        if (q.b1 > q.b2) return below_limit ? until_crossing("1.8") : never("1.8");
        const double z0 = -q.a2 * (1.0 - q.b2) / (q.a1 * (1.0 - q.b1));
        if (z0 >= 1.0) return never("1.9");
        return window("1.9", std::floor(std::log(z0) / std::log(q.b1 / q.b2)) + 1.0);
    }

    if ((q.b1 < 0.0) != (q.b2 < 0.0)) {
        if (q.b1 > 0.0) swap_terms();  // now b1 < 0 < b2
        const bool same_modulus = equal_modulus(q.b1, q.b2);
        const double ratio = -q.b1 / q.b2;
        if (q.a1 > 0.0 && q.a2 > 0.0) return never("1.10");
        if (q.a1 < 0.0 && q.a2 > 0.0) return never("1.11");
        if (q.a1 > 0.0) {  // a2 < 0
            if (same_modulus) return below_limit ? until_crossing("1.14") : never("1.14");
            if (ratio < 1.0) return below_limit ? until_crossing("1.13") : never("1.13");
            const double z1 = -q.a2 * (1.0 - q.b2 * q.b2) / (q.a1 * (1.0 - q.b1 * q.b1));
            if (z1 <= 1.0) return never("1.12");
            return window("1.12", std::floor(std::log(z1) / std::log(ratio)) + 2.0);
        }
        // a1 < 0, a2 < 0
        if (same_modulus) return below_limit ? until_crossing("1.19") : never("1.19");
        if (ratio < 1.0) return below_limit ? until_crossing("1.18") : never("1.18");
        const double z2 = q.a2 * (q.b2 * q.b2 - 1.0) / (q.a1 * (q.b1 * q.b1 - 1.0));
        const double x = std::log(z2) / std::log(ratio);
        if (!(x > 0.0)) return never("1.17");
        return window("1.17", std::floor(x) + 2.0);
    }

    // Both eigenvalues negative.
    if (q.a1 > 0.0 && q.a2 > 0.0) return never("1.15");
    if (q.a1 < 0.0 && q.a2 < 0.0) return never("1.22");
    if (q.a1 < 0.0) swap_terms();  // now a1 > 0 > a2
    const double ratio = q.b1 / q.b2;
    const double z1 = -q.a2 * (1.0 - q.b2 * q.b2) / (q.a1 * (1.0 - q.b1 * q.b1));
    if (ratio > 1.0) {
        if (z1 <= 1.0) return never("1.20");
        return window("1.20", floor_even(std::log(z1) / std::log(ratio)) + 2.0);
    }
    const double x = std::log(z1) / std::log(ratio);
    if (!(x > 1.0)) return never("1.21");
    return window("1.21", floor_odd(x) + 2.0);
}

Verdict dispatch_defective(const DefectiveCoefficients& q, double r) {
    const double d = q.d;
    if (q.b == 0.0 || q.c == 0.0) {
        // Reduces to a single geometric term (c = 0) or to a chain that is
        // constant from k = 2 on (b = 0).
        if (q.c == 0.0 && q.b > 0.0 && q.a < 0.0) {
            return r < d ? monotone("2.5", monotone_rise_estimate(q.a, q.b, d, r)) : never("2.5");
        }
        return never("2.5");
    }
    const double a = q.a;
    const double b = q.b;
    const double c = q.c;
    if (b > 0.0 && c > 0.0) {
        const double z3 = (a * b - a * b * b - c * b) / (c * (b - 1.0));
        if (!(z3 > 0.0)) return never("2.1");
        return window("2.1", std::ceil(z3) + 1.0);
    }
    if (b > 0.0) return r < d ? until_crossing("2.2") : never("2.2");
    const double z4 = (a * b - a * b * b * b - 2.0 * c * b * b) / (c * (b * b - 1.0));
    if (c < 0.0) {
        if (!(z4 > 0.0)) return never("2.3");
        return window("2.3", floor_even(z4) + 2.0);
    }
    if (!(z4 > 1.0)) return never("2.4");
    return window("2.4", floor_odd(z4) + 2.0);
}

Verdict dispatch_complex(const ComplexCoefficients& q, double r) {
    if (q.amplitude == 0.0) return never("3.0");
    const double d = (r - q.offset) / q.amplitude;
    if (d > 0.0) {
        if (d >= 1.0) return never("3.1");
        // A^k sin(.) > d needs A^k > d, i.e. k < log_A d.
        return window("3.1", std::ceil(std::log(d) / std::log(q.modulus)));
    }
    if (d < 0.0) return until_crossing("3.2");
    // h(k) > r reduces to sin(k theta + b') > 0 with theta in (0, pi).
    const double theta = q.angle;
    const double phase = q.phase;
    if (phase > 0.0 && phase < kPi) return exact("3.3", 0.0);
    if (phase == 0.0) return exact("3.5", std::floor(kPi / (2.0 * kPi - theta)) + 1.0);
    if (phase == kPi) return exact("3.6", std::floor(kPi / theta) + 1.0);
    return exact("3.7", std::floor((2.0 * kPi - phase) / theta) + 1.0);
}

// Sum of transient magnitudes at step k; h(k) lies within this of the limit.
double transient_envelope(const SpectrumClass& spectrum, std::uint64_t k) {
    const double kk = static_cast<double>(k);
    if (const auto* q = std::get_if<RealPairCoefficients>(&spectrum.coefficients)) {
        return std::abs(q->a1) * std::pow(std::abs(q->b1), kk) + std::abs(q->a2) * std::pow(std::abs(q->b2), kk);
    }
    if (const auto* q = std::get_if<DefectiveCoefficients>(&spectrum.coefficients)) {
        const double mb = std::abs(q->b);
        return std::abs(q->a) * std::pow(mb, kk) + std::abs(q->c) * kk * std::pow(mb, kk - 1.0);
    }
    const auto& q = std::get<ComplexCoefficients>(spectrum.coefficients);
    return q.amplitude * std::pow(q.modulus, kk);
}

// Smallest k >= 3 from which the envelope stays below delta.
std::uint64_t settle_step(const SpectrumClass& spectrum, double delta) {
    std::uint64_t k = kFirstTailStep;
    if (const auto* q = std::get_if<DefectiveCoefficients>(&spectrum.coefficients)) {
        // k |b|^(k-1) decreases once k > |b| / (1 - |b|).
        const double mb = std::abs(q->b);
        if (mb > 0.0) k = std::max(k, static_cast<std::uint64_t>(std::ceil(mb / (1.0 - mb))) + 1);
    }
    std::uint64_t step = 1;
    while (transient_envelope(spectrum, k) >= delta) {
        k += step;
        step *= 2;
        if (static_cast<double>(k) > kWindowCeiling) return static_cast<std::uint64_t>(kWindowCeiling);
    }
    // Walk back over the last doubling to the first settled step.
    std::uint64_t lo = k - step / 2 > kFirstTailStep ? k - step / 2 : kFirstTailStep;
    while (lo < k) {
        const std::uint64_t mid = lo + (k - lo) / 2;
        if (transient_envelope(spectrum, mid) < delta) {
            k = mid;
        } else {
            lo = mid + 1;
        }
    }
    return k;
}

std::uint64_t to_step(double x) {
    if (!(x > 0.0)) return 0;
    return static_cast<std::uint64_t>(std::min(x, kWindowCeiling));
}

CrossingTime search(const SpectrumClass& spectrum, double r, std::uint64_t from, std::uint64_t to) {
    for (std::uint64_t k = from; k <= to; ++k) {
        if (spectrum.reward_at(k) > r) return CrossingTime::finite(k);
    }
    return CrossingTime::never();
}

}  // namespace

CrossingDiagnosis diagnose_crossing_k3(const SpectrumClass& spectrum, double threshold_reward) {
    const double r = threshold_reward + kCrossingMargin;
    for (std::uint64_t k = 0; k < kFirstTailStep; ++k) {
        if (spectrum.reward_at(k) > r) return {"base", CrossingTime::finite(k)};
    }

    Verdict verdict;
    if (const auto* q = std::get_if<RealPairCoefficients>(&spectrum.coefficients)) {
        verdict = dispatch_real_pair(*q, r);
    } else if (const auto* q = std::get_if<DefectiveCoefficients>(&spectrum.coefficients)) {
        verdict = dispatch_defective(*q, r);
    } else {
        verdict = dispatch_complex(std::get<ComplexCoefficients>(spectrum.coefficients), r);
    }

    const double limit = spectrum.limit();
    switch (verdict.kind) {
        case VerdictKind::Never:
            return {verdict.id, CrossingTime::never()};
        case VerdictKind::Exact:
            return {verdict.id, CrossingTime::finite(to_step(verdict.bound))};
        case VerdictKind::Window: {
            std::uint64_t end = to_step(verdict.bound) + kWindowSlack;
            if (r > limit) end = std::min(end, settle_step(spectrum, r - limit));
            return {verdict.id, search(spectrum, r, kFirstTailStep, end)};
        }
        case VerdictKind::UntilCrossing: {
            // r < limit: the tail settles above r, so the crossing is certain.
            const std::uint64_t end = settle_step(spectrum, limit - r);
            return {verdict.id, search(spectrum, r, kFirstTailStep, end)};
        }
        case VerdictKind::Monotone: {
            // h increases from k = 1 on; correct the closed form for rounding.
            const std::uint64_t end = settle_step(spectrum, limit - r);
            std::uint64_t k = std::clamp(to_step(verdict.bound), kFirstTailStep, end);
            while (k < end && spectrum.reward_at(k) <= r) ++k;
            while (k > kFirstTailStep && spectrum.reward_at(k - 1) > r) --k;
            return {verdict.id, spectrum.reward_at(k) > r ? CrossingTime::finite(k) : CrossingTime::never()};
        }
    }
    throw std::logic_error("unhandled crossing case");
}

CrossingTime first_crossing_analytic_k3(const SpectrumClass& spectrum, double threshold_reward) {
    return diagnose_crossing_k3(spectrum, threshold_reward).time;
}

CrossingTime first_crossing(const Arm& arm, const Belief& start, double threshold_reward, std::size_t l_max,
                            CrossingMethod method) {
    if (method == CrossingMethod::Auto && arm.states() == 3) {
        return first_crossing_analytic_k3(classify_spectrum(arm, start), threshold_reward);
    }
    return first_crossing_scan(arm, start, threshold_reward, l_max);
}

}  // namespace rmab
