#pragma once

#include <cstdint>
#include <vector>

#include "otail/counting.hpp"
#include "otail/sequence.hpp"

namespace otail {

struct McOptions {
    long max_count_per_draw = 100000;  // refusal threshold on a single eta draw
};

struct McTailResult {
    std::vector<double> xs;
    std::vector<double> estimate;
    std::vector<double> se;  // binomial sqrt(p(1-p)/n)
    long samples = 0;
    std::uint64_t seed = 0;
};

// Empirical tail of S_eta over xs. Replicate r draws from its own
// (seed, r) stream, so results are bit-reproducible regardless of scheduling.
McTailResult simulate_random_sum(const SequenceSpec& spec, const CountingDist& counting,
                                 long n_samples, std::uint64_t seed,
                                 const std::vector<double>& xs, const McOptions& opts = {});

struct McConcentration {
    double estimate = 0;
    double se = 0;
    long samples = 0;
};

// Concentration of Z_n = xi_1 + ... + xi_n estimated by the maximal empirical
// mass of a width-window slid on a width/16 lattice.
McConcentration estimate_concentration(const SequenceSpec& spec, long n_terms, double width,
                                       long n_samples, std::uint64_t seed);

}
