#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rmab/crossing.hpp"

namespace rmab {

namespace {

double truncate(double x) { return std::abs(x) < kCoefficientTruncation ? 0.0 : x; }

// b^k with 0^0 = 1.
double power(double b, std::uint64_t k) { return k == 0 ? 1.0 : std::pow(b, static_cast<double>(k)); }

double determinant3(const Matrix& p) {
    return p(0, 0) * (p(1, 1) * p(2, 2) - p(1, 2) * p(2, 1)) -
           p(0, 1) * (p(1, 0) * p(2, 2) - p(1, 2) * p(2, 0)) +
           p(0, 2) * (p(1, 0) * p(2, 1) - p(1, 1) * p(2, 0));
}

}  // namespace

std::string_view to_string(SpectrumForm form) {
    switch (form) {
        case SpectrumForm::TwoRealDistinct: return "TwoRealDistinct";
        case SpectrumForm::RealRepeated: return "RealRepeated";
        case SpectrumForm::RealDefective: return "RealDefective";
        case SpectrumForm::ComplexPair: return "ComplexPair";
        case SpectrumForm::RankDegenerate: return "RankDegenerate";
    }
    return "unknown";
}

double SpectrumClass::reward_at(std::uint64_t k) const {
    if (const auto* q = std::get_if<RealPairCoefficients>(&coefficients)) {
        return q->a1 * power(q->b1, k) + q->a2 * power(q->b2, k) + q->c;
    }
    if (const auto* q = std::get_if<DefectiveCoefficients>(&coefficients)) {
        const double drift = k == 0 ? 0.0 : q->c * static_cast<double>(k) * power(q->b, k - 1);
        return q->a * power(q->b, k) + drift + q->d;
    }
    const auto& q = std::get<ComplexCoefficients>(coefficients);
    const double kk = static_cast<double>(k);
    return q.amplitude * power(q.modulus, k) * std::sin(kk * q.angle + q.phase) + q.offset;
}

double SpectrumClass::limit() const {
    if (const auto* q = std::get_if<RealPairCoefficients>(&coefficients)) return q->c;
    if (const auto* q = std::get_if<DefectiveCoefficients>(&coefficients)) return q->d;
    return std::get<ComplexCoefficients>(coefficients).offset;
}

ChainSpectrum analyze_chain(const Arm& arm) {
    if (arm.states() != 3) {
        throw std::invalid_argument("spectral classification needs K = 3; arm '" + arm.label() + "' has K = " +
                                    std::to_string(arm.states()));
    }
    const Matrix& p = arm.transition();
    // Non-unit eigenvalues are the roots of x^2 - (tr - 1) x + det.
    const double s = p(0, 0) + p(1, 1) + p(2, 2) - 1.0;
    const double det = determinant3(p);
    const double disc = s * s - 4.0 * det;

    ChainSpectrum out{};
    out.stationary_reward = arm.expected_reward(stationary_distribution(arm));

    if (std::abs(disc) < kDiscriminantTolerance) {
        const double lambda = s / 2.0;
        Matrix shifted = p;
        for (std::size_t i = 0; i < 3; ++i) shifted(i, i) -= lambda;
        if (numerical_rank(shifted, kDefectiveRankTolerance) >= 2) {
            out.form = SpectrumForm::RealDefective;
        } else if (std::abs(lambda) < kCoefficientTruncation) {
            out.form = SpectrumForm::RankDegenerate;
        } else {
            out.form = SpectrumForm::RealRepeated;
        }
        out.eigenvalues = {std::complex<double>(lambda, 0.0), std::complex<double>(lambda, 0.0)};
        return out;
    }
    if (disc > 0.0) {
        // Cancellation-free root pair.
        const double root = std::sqrt(disc);
        const double big = (s >= 0.0) ? (s + root) / 2.0 : (s - root) / 2.0;
        const double small = big != 0.0 ? det / big : 0.0;
        const double b1 = std::max(big, small);
        const double b2 = std::min(big, small);
        out.form = SpectrumForm::TwoRealDistinct;
        out.eigenvalues = {std::complex<double>(b1, 0.0), std::complex<double>(b2, 0.0)};
        return out;
    }
    const double modulus = std::sqrt(det);
    const double angle = std::atan2(std::sqrt(-disc) / 2.0, s / 2.0);
    out.form = SpectrumForm::ComplexPair;
    out.eigenvalues = {std::polar(modulus, angle), std::polar(modulus, -angle)};
    return out;
}

SpectrumClass classify_spectrum(const ChainSpectrum& chain, const Arm& arm, const Belief& start) {
    if (start.size() != 3) throw std::invalid_argument("classify_spectrum: start belief must have 3 entries");
    const double c = chain.stationary_reward;
    const double h0 = dot(start.probs(), arm.rewards());
    const double h1 = dot(row_times(start.probs(), arm.transition()), arm.rewards());
    const double u0 = h0 - c;
    const double u1 = h1 - c;

    SpectrumClass out{chain.form, chain.eigenvalues, RealPairCoefficients{}};
    switch (chain.form) {
        case SpectrumForm::TwoRealDistinct: {
            const double b1 = chain.eigenvalues[0].real();
            const double b2 = chain.eigenvalues[1].real();
            const double a1 = (u1 - b2 * u0) / (b1 - b2);
            const double a2 = u0 - a1;
            out.coefficients = RealPairCoefficients{truncate(a1), truncate(b1), truncate(a2), truncate(b2), c};
            break;
        }
        case SpectrumForm::RealRepeated: {
            const double b = truncate(chain.eigenvalues[0].real());
            const double half = truncate(u0 / 2.0);
            out.coefficients = RealPairCoefficients{half, b, half, b, c};
            break;
        }
        case SpectrumForm::RankDegenerate:
            out.coefficients = RealPairCoefficients{truncate(u0), 0.0, 0.0, 0.0, c};
            break;
        case SpectrumForm::RealDefective: {
            const double b = chain.eigenvalues[0].real();
            const double drift = u1 - u0 * b;
            out.coefficients = DefectiveCoefficients{truncate(u0), truncate(b), truncate(drift), c};
            break;
        }
        case SpectrumForm::ComplexPair: {
            const double modulus = std::abs(chain.eigenvalues[0]);
            const double angle = std::arg(chain.eigenvalues[0]);
            // h(k) - c = A^k (alpha cos k theta + gamma sin k theta)
            const double alpha = u0;
            const double gamma = (u1 / modulus - alpha * std::cos(angle)) / std::sin(angle);
            const double amplitude = truncate(std::hypot(alpha, gamma));
            double phase = 0.0;
            if (amplitude > 0.0) {
                phase = std::atan2(alpha, gamma);
                if (phase < 0.0) phase += 2.0 * std::numbers::pi;
                if (phase >= 2.0 * std::numbers::pi) phase = 0.0;
            }
            out.coefficients = ComplexCoefficients{amplitude, modulus, phase, c, angle};
            break;
        }
    }
    return out;
}

SpectrumClass classify_spectrum(const Arm& arm, const Belief& start) {
    return classify_spectrum(analyze_chain(arm), arm, start);
}

}  // namespace rmab
