#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "rmab/model.hpp"

namespace rmab {

using Rng = std::mt19937_64;

// Independent stream for (seed, stream) under a purpose-specific salt.
Rng make_stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t salt);

// Uniform on [0, 1) with 53 random bits.
double uniform01(Rng& rng);
std::size_t sample_categorical(Rng& rng, std::span<const double> probs);
std::vector<double> sample_dirichlet(Rng& rng, std::size_t k, double alpha);

struct RandomArmOptions {
    double row_concentration = 1.0;
    // Rows are mixed with a random permutation with weight drawn from
    // [0, max_permutation_weight]; this reaches negative and complex spectra.
    double max_permutation_weight = 0.0;
    double reward_scale = 1.0;
};

Belief random_belief(Rng& rng, std::size_t k, double concentration = 1.0);
// Regular arm with ascending rewards, B_0 = 0 and a random initial belief.
Arm random_arm(Rng& rng, std::size_t k, const RandomArmOptions& options = {}, std::string label = "random");

}  // namespace rmab
