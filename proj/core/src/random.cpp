#include "rmab/random.hpp"

#include <algorithm>
#include <numeric>

namespace rmab {

Rng make_stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t salt) {
    const auto lo = [](std::uint64_t x) { return static_cast<std::uint32_t>(x); };
    const auto hi = [](std::uint64_t x) { return static_cast<std::uint32_t>(x >> 32); };
    std::seed_seq seq{lo(seed), hi(seed), lo(stream), hi(stream), lo(salt), hi(salt)};
    return Rng(seq);
}

double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t sample_categorical(Rng& rng, std::span<const double> probs) {
    const double u = uniform01(rng);
    double cumulative = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        cumulative += probs[i];
        if (u < cumulative) return i;
    }
    // Rounding left u above the total; take the last state with mass.
    for (std::size_t i = probs.size(); i-- > 0;) {
        if (probs[i] > 0.0) return i;
    }
    return probs.size() - 1;
}

std::vector<double> sample_dirichlet(Rng& rng, std::size_t k, double alpha) {
    std::gamma_distribution<double> gamma(alpha, 1.0);
    std::vector<double> out(k);
    double sum = 0.0;
    do {
        sum = 0.0;
        for (double& x : out) {
            x = gamma(rng);
            sum += x;
        }
    } while (!(sum > 0.0));
    for (double& x : out) x /= sum;
    return out;
}

Belief random_belief(Rng& rng, std::size_t k, double concentration) {
    return Belief(sample_dirichlet(rng, k, concentration));
}

Arm random_arm(Rng& rng, std::size_t k, const RandomArmOptions& options, std::string label) {
    for (;;) {
        const double weight = options.max_permutation_weight * uniform01(rng);
        std::vector<std::size_t> perm(k);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::shuffle(perm.begin(), perm.end(), rng);
        Matrix p(k, k);
        for (std::size_t i = 0; i < k; ++i) {
            std::vector<double> row = sample_dirichlet(rng, k, options.row_concentration);
            for (double& x : row) x *= 1.0 - weight;
            row[perm[i]] += weight;
            const double sum = std::accumulate(row.begin(), row.end(), 0.0);
            for (std::size_t j = 0; j < k; ++j) p(i, j) = row[j] / sum;
        }
        if (!is_regular(p)) continue;

        std::vector<double> rewards(k, 0.0);
        for (std::size_t i = 1; i < k; ++i) rewards[i] = options.reward_scale * uniform01(rng);
        std::sort(rewards.begin(), rewards.end());
        std::vector<double> belief = sample_dirichlet(rng, k, 1.0);
        return Arm(label, std::move(p), std::move(rewards), std::move(belief));
    }
}

}  // namespace rmab
