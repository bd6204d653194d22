#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <variant>

#include "rmab/model.hpp"

namespace rmab {

// Crossing requires h(k) > threshold + kCrossingMargin on both the scan and
// the analytic path.
inline constexpr double kCrossingMargin = 1e-12;
inline constexpr std::size_t kDefaultScanHorizon = 500;
inline constexpr double kDiscriminantTolerance = 1e-10;
inline constexpr double kDefectiveRankTolerance = 1e-10;
inline constexpr double kCoefficientTruncation = 1e-12;

class CrossingTime {
public:
    static constexpr CrossingTime finite(std::uint64_t k) { return CrossingTime(k); }
    static constexpr CrossingTime never() { return CrossingTime(kNever); }

    constexpr bool is_finite() const noexcept { return steps_ != kNever; }
    constexpr bool is_never() const noexcept { return steps_ == kNever; }
    // Only meaningful when is_finite().
    constexpr std::uint64_t steps() const noexcept { return steps_; }

    std::string to_string() const;

    // Never orders after every finite value.
    constexpr auto operator<=>(const CrossingTime&) const = default;

private:
    static constexpr std::uint64_t kNever = std::numeric_limits<std::uint64_t>::max();
    constexpr explicit CrossingTime(std::uint64_t steps) : steps_(steps) {}
    std::uint64_t steps_;
};

// Least k in [0, l_max] with T^k(start) B' > threshold + margin, else Never.
CrossingTime first_crossing_scan(const Arm& arm, const Belief& start, double threshold_reward,
                                 std::size_t l_max);

// RealRepeated is a semisimple double eigenvalue (form 1 with b1 = b2);
// RankDegenerate is the special case where that eigenvalue is zero.
enum class SpectrumForm { TwoRealDistinct, RealRepeated, RealDefective, ComplexPair, RankDegenerate };
std::string_view to_string(SpectrumForm form);

// h(k) = a1 b1^k + a2 b2^k + c, with b1 >= b2 as classified.
struct RealPairCoefficients {
    double a1, b1, a2, b2, c;
};
// h(k) = a b^k + c k b^(k-1) + d.
struct DefectiveCoefficients {
    double a, b, c, d;
};
// h(k) = amplitude * modulus^k * sin(k angle + phase) + offset.
struct ComplexCoefficients {
    double amplitude;  // a' >= 0
    double modulus;    // A in (0,1)
    double phase;      // b' in [0, 2pi)
    double offset;     // c'
    double angle;      // theta in (0, pi)
};

struct SpectrumClass {
    SpectrumForm form;
    std::array<std::complex<double>, 2> eigenvalues;
    std::variant<RealPairCoefficients, DefectiveCoefficients, ComplexCoefficients> coefficients;

    double reward_at(std::uint64_t k) const;
    // Limit of h(k): the stationary expected reward.
    double limit() const;
};

// Start-independent part of the classification of a 3x3 chain.
struct ChainSpectrum {
    SpectrumForm form;
    std::array<std::complex<double>, 2> eigenvalues;
    double stationary_reward;
};

ChainSpectrum analyze_chain(const Arm& arm);
SpectrumClass classify_spectrum(const ChainSpectrum& chain, const Arm& arm, const Belief& start);
SpectrumClass classify_spectrum(const Arm& arm, const Belief& start);

struct CrossingDiagnosis {
    std::string_view case_id;
    CrossingTime time;
};

// Crossing time together with the case of the closed-form table that decided it.
CrossingDiagnosis diagnose_crossing_k3(const SpectrumClass& spectrum, double threshold_reward);
CrossingTime first_crossing_analytic_k3(const SpectrumClass& spectrum, double threshold_reward);

enum class CrossingMethod { Auto, Scan };

// Analytic for K = 3 under Auto, scan otherwise.
CrossingTime first_crossing(const Arm& arm, const Belief& start, double threshold_reward, std::size_t l_max,
                            CrossingMethod method = CrossingMethod::Auto);

}  // namespace rmab
