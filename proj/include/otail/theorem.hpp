#pragma once

#include <string>
#include <utility>
#include <vector>

#include "otail/classify.hpp"
#include "otail/counting.hpp"
#include "otail/sequence.hpp"

namespace otail {

struct CheckOptions {
    double x_max = 200.0;
    long k_max = 10000;
    std::vector<double> delta_set = {0.1, 0.25, 0.5, 0.75, 0.9};
    ClassifyOptions classify;
};

enum class CondVerdict { pass, fail, inconclusive };
enum class Applicability { applies, does_not_apply, inconclusive };

std::string to_string(CondVerdict v);
std::string to_string(Applicability a);

struct ConditionOutcome {
    std::string label;
    CondVerdict verdict = CondVerdict::inconclusive;
    std::string summary;
    std::vector<std::pair<std::string, double>> evidence;
};

struct ConditionReport {
    std::string theorem;  // "T4", "T5", "T6"
    long kappa = 0;
    std::vector<ConditionOutcome> conditions;
    Applicability overall = Applicability::inconclusive;

    void finalize();  // derives overall from the condition verdicts
};

// Sufficient-condition checkers for O-exponentiality of the random sum.
// T4: uniform successor-ratio bound over all x >= 0.
// T5: counting variable with bounded support.
// T6: asymptotic successor-ratio bound + unit-window Cesaro margin +
//     counting-tail domination.
ConditionReport check_theorem4(const SequenceSpec& spec, const CountingDist& counting, long kappa,
                               const CheckOptions& opts = {});
ConditionReport check_theorem5(const SequenceSpec& spec, const CountingDist& counting, long kappa,
                               long D, const CheckOptions& opts = {});
ConditionReport check_theorem6(const SequenceSpec& spec, const CountingDist& counting, long kappa,
                               const CheckOptions& opts = {});

// sup over x in [x_lo, x_hi] and k in [k_lo, k_hi] of the unit-shift ratio
// sf_{kappa+k}(x-1) / sf_{kappa+k}(x)
double successor_ratio_sup(const SequenceSpec& spec, long kappa, double x_lo, double x_hi,
                           long k_lo, long k_hi);

// Cesaro average of per-successor unit-window sups. `value` is the limsup
// estimate: index sets of vanishing density (finite ranges, perfect squares)
// average out, so the limit is driven by the catch-all rule's large-index
// behaviour; the finite averages at k_max/4, k_max/2, k_max are reported as
// evidence.
struct CesaroResult {
    double value = 1.0;
    double finite_avg[3] = {1, 1, 1};
    bool stabilized = false;
};
CesaroResult cesaro_condition(const SequenceSpec& spec, long kappa, long k_max);

// max of the two shifted-ratio sups of the convolution-ratio inequality;
// divergent sups (tails beyond every exponential, or vanishing tails) yield
// +inf with the flag set
struct Lemma1Bound {
    double value = 0;
    bool divergent = false;
    double sup_f = 0, sup_g = 0;
};
Lemma1Bound lemma1_bound(const TailModel& f, const TailModel& g, double x, double v, double t);

// Kolmogorov-Rogozin concentration bound A * lambda / sqrt(sum lambda_k^2 (1 - Q_k(lambda_k)))
double rogozin_bound(const std::vector<TailModel>& models, double lambda,
                     const std::vector<double>& lambda_k, double A);

}
