#pragma once

#include <vector>

#include "otail/convolve.hpp"
#include "otail/counting.hpp"
#include "otail/sequence.hpp"
#include "otail/tail_grid.hpp"

namespace otail {

struct RandomSumOptions {
    double tol = 1e-6;
    long truncation_cap = 100000;  // refusal threshold for the counting quantile
    ConvOptions conv;
};

struct RandomSumResult {
    TailGrid grid;
    long truncation = 0;         // N: terms S_1..S_N entered the mixture
    double counting_remainder = 0;  // P(eta > N), part of abs_error_bound
};

// Tail of S_eta as the eta-mixture of partial-sum tails, truncated at
// N = quantile(1 - tol/2) with the discarded mass bounded by P(eta > N).
// Throws BudgetExceeded when the counting quantile exceeds truncation_cap.
RandomSumResult random_sum_tail(const SequenceSpec& spec, const CountingDist& counting,
                                const std::vector<double>& xs, const RandomSumOptions& opts = {});

// The four-way split of P(S_eta > x - 1): prefix terms up to kappa, the
// moderate-index block, the interval term, and the excess term. The pieces
// sum to the mixture tail at x - 1 by construction.
struct DecompositionTrace {
    double k1 = 0, k2 = 0, k3 = 0, k4 = 0;
    double total() const { return k1 + k2 + k3 + k4; }
    double err_bound = 0;
    long truncation = 0;
};

DecompositionTrace decomposition_trace(const SequenceSpec& spec, const CountingDist& counting,
                                       long kappa, double K, double x,
                                       const RandomSumOptions& opts = {});

}
