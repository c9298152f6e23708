#include "otail/theorem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "otail/grid.hpp"

namespace otail {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// unit-shift ratio sf(x-1)/sf(x); +inf past bounded support
double unit_ratio(const TailModel& m, double x) {
    const double den = m.log_survival(x);
    const double num = m.log_survival(x - 1.0);
    if (std::isinf(den) && den < 0) {
        return (std::isinf(num) && num < 0) ? 1.0 : kInf;
    }
    return std::exp(num - den);
}

// evaluation abscissas for one successor model: shared grid plus the model's
// own kink points (and their unit shifts), where ratio sups live
std::vector<double> ratio_eval_points(const TailModel& m, const std::vector<double>& base,
                                      double x_lo, double x_hi) {
    std::vector<double> xs;
    xs.reserve(base.size() + 8);
    for (double x : base) {
        if (x >= x_lo && x <= x_hi) xs.push_back(x);
    }
    for (double k : m.shape_knots()) {
        for (double cand : {k, k + 1.0}) {
            if (cand >= x_lo && cand <= x_hi) xs.push_back(cand);
        }
    }
    return xs;
}

struct KScanResult {
    double global_sup = 0;
    long argmax_k = 0;
    double kwin_sup[3] = {0, 0, 0};   // per dyadic k-window sups of s_k
    double xwin_sup[3] = {0, 0, 0};   // per dyadic x-window sups over all k
    bool any_inf = false;
};

KScanResult scan_successor_ratios(const SequenceSpec& spec, long kappa, double x_lo, double x_hi,
                                  long k_max) {
    const std::vector<double> base = make_hybrid_grid(x_hi);
    const DyadicWindows xwin = DyadicWindows::over(x_hi);
    const DyadicWindows kwin = DyadicWindows::over(static_cast<double>(k_max));
    KScanResult res;
    for (long k = 1; k <= k_max; ++k) {
        const TailModel m = spec.resolve(kappa + k);
        double sk = 0;
        for (double x : ratio_eval_points(m, base, x_lo, x_hi)) {
            const double r = unit_ratio(m, x);
            sk = std::max(sk, r);
            const int w = xwin.which(x);
            if (w >= 0) res.xwin_sup[w] = std::max(res.xwin_sup[w], r);
        }
        if (std::isinf(sk)) res.any_inf = true;
        if (sk > res.global_sup) {
            res.global_sup = sk;
            res.argmax_k = k;
        }
        const int kw = kwin.which(static_cast<double>(k));
        if (kw >= 0) res.kwin_sup[kw] = std::max(res.kwin_sup[kw], sk);
    }
    return res;
}

ConditionOutcome kappa_in_ol(const SequenceSpec& spec, long kappa, const CheckOptions& opts) {
    ConditionOutcome c;
    c.label = "kappa_tail_O_exponential";
    const TailModel m = spec.resolve(kappa);
    const ClassVerdict cv = classify(TailRef(m), TailClass::OL, opts.classify);
    switch (cv.verdict) {
        case Verdict::member: c.verdict = CondVerdict::pass; break;
        case Verdict::non_member: c.verdict = CondVerdict::fail; break;
        default: c.verdict = CondVerdict::inconclusive; break;
    }
    c.summary = "classify(" + m.family_name() + ", OL) = " + to_string(cv.verdict);
    c.evidence.emplace_back("ratio_windowed_sup", cv.ratio.windowed_sup);
    c.evidence.emplace_back("ratio_global_sup", cv.ratio.global_sup);
    return c;
}

ConditionOutcome prefix_comparable(const SequenceSpec& spec, const CountingDist& counting,
                                   long kappa, long k_hi, bool restrict_to_support,
                                   const CheckOptions& opts) {
    ConditionOutcome c;
    c.label = "prefix_vanishing_or_O_exponential";
    const TailModel ref = spec.resolve(kappa);
    c.verdict = CondVerdict::pass;
    long checked = 0;
    for (long k = 1; k <= k_hi; ++k) {
        if (restrict_to_support && !counting.in_support(k)) continue;
        if (k == kappa) continue;  // covered by the kappa condition
        const TailModel m = spec.resolve(k);
        const Comparability cmp = comparability(TailRef(m), TailRef(ref), opts.x_max);
        ++checked;
        if (cmp == Comparability::vanishing) {
            c.evidence.emplace_back("k" + std::to_string(k) + "_vanishing", 1.0);
            continue;
        }
        const ClassVerdict cv = classify(TailRef(m), TailClass::OL, opts.classify);
        if (cv.verdict == Verdict::member) {
            c.evidence.emplace_back("k" + std::to_string(k) + "_O_exponential", 1.0);
            continue;
        }
        if (cv.verdict == Verdict::non_member && cmp != Comparability::inconclusive) {
            c.verdict = CondVerdict::fail;
            c.summary = "index " + std::to_string(k) + ": neither vanishing against the kappa tail nor O-exponential";
            return c;
        }
        c.verdict = CondVerdict::inconclusive;
        c.summary = "index " + std::to_string(k) + ": evidence inconclusive";
    }
    if (c.verdict == CondVerdict::pass) {
        c.summary = std::to_string(checked) + " prefix indices checked";
    }
    return c;
}

}  // namespace

std::string to_string(CondVerdict v) {
    switch (v) {
        case CondVerdict::pass: return "pass";
        case CondVerdict::fail: return "fail";
        default: return "inconclusive";
    }
}

std::string to_string(Applicability a) {
    switch (a) {
        case Applicability::applies: return "applies";
        case Applicability::does_not_apply: return "does_not_apply";
        default: return "inconclusive";
    }
}

void ConditionReport::finalize() {
    overall = Applicability::applies;
    for (const auto& c : conditions) {
        if (c.verdict == CondVerdict::fail) {
            overall = Applicability::does_not_apply;
            return;
        }
        if (c.verdict == CondVerdict::inconclusive) overall = Applicability::inconclusive;
    }
}

double successor_ratio_sup(const SequenceSpec& spec, long kappa, double x_lo, double x_hi,
                           long k_lo, long k_hi) {
    const std::vector<double> base = make_hybrid_grid(x_hi);
    double sup = 0;
    for (long k = k_lo; k <= k_hi; ++k) {
        const TailModel m = spec.resolve(kappa + k);
        for (double x : ratio_eval_points(m, base, x_lo, x_hi)) {
            sup = std::max(sup, unit_ratio(m, x));
        }
    }
    return sup;
}

ConditionReport check_theorem4(const SequenceSpec& spec, const CountingDist& counting, long kappa,
                               const CheckOptions& opts) {
    if (kappa < 1 || !counting.in_support(kappa)) {
        throw std::invalid_argument("check_theorem4: kappa not in supp(eta)");
    }
    ConditionReport rep;
    rep.theorem = "T4";
    rep.kappa = kappa;
    rep.conditions.push_back(kappa_in_ol(spec, kappa, opts));
    rep.conditions.push_back(prefix_comparable(spec, counting, kappa, kappa, true, opts));

    ConditionOutcome c3;
    c3.label = "uniform_successor_ratio_bounded";
    const KScanResult scan = scan_successor_ratios(spec, kappa, 0.0, opts.x_max, opts.k_max);
    const Boundedness b = scan.any_inf
                              ? Boundedness::unbounded
                              : judge_boundedness(scan.kwin_sup);
    switch (b) {
        case Boundedness::bounded: c3.verdict = CondVerdict::pass; break;
        case Boundedness::unbounded: c3.verdict = CondVerdict::fail; break;
        default: c3.verdict = CondVerdict::inconclusive; break;
    }
    c3.evidence.emplace_back("sup", scan.global_sup);
    c3.evidence.emplace_back("argmax_k", static_cast<double>(scan.argmax_k));
    for (int i = 0; i < 3; ++i) {
        c3.evidence.emplace_back("k_window_sup_" + std::to_string(i), scan.kwin_sup[i]);
    }
    if (c3.verdict == CondVerdict::fail) {
        c3.summary = "per-successor sups diverge in k (worst at k = " + std::to_string(scan.argmax_k) +
                     (is_perfect_square(scan.argmax_k) ? ", on the perfect-square subsequence)" : ")");
    } else {
        c3.summary = "sup over x and k = " + std::to_string(scan.global_sup);
    }
    rep.conditions.push_back(std::move(c3));
    rep.finalize();
    return rep;
}

ConditionReport check_theorem5(const SequenceSpec& spec, const CountingDist& counting, long kappa,
                               long D, const CheckOptions& opts) {
    ConditionReport rep;
    rep.theorem = "T5";
    rep.kappa = kappa;

    ConditionOutcome c1;
    c1.label = "counting_bounded_by_D";
    const double tail_at_D = counting.tail(D);
    c1.verdict = tail_at_D == 0.0 ? CondVerdict::pass : CondVerdict::fail;
    c1.summary = "P(eta > " + std::to_string(D) + ") = " + std::to_string(tail_at_D);
    c1.evidence.emplace_back("tail_at_D", tail_at_D);
    rep.conditions.push_back(std::move(c1));

    ConditionOutcome c2 = kappa_in_ol(spec, kappa, opts);
    if (kappa < 1 || !counting.in_support(kappa)) {
        c2.verdict = CondVerdict::fail;
        c2.summary = "kappa not in supp(eta)";
    }
    rep.conditions.push_back(std::move(c2));

    rep.conditions.push_back(prefix_comparable(spec, counting, kappa, D, false, opts));
    rep.finalize();
    return rep;
}

ConditionReport check_theorem6(const SequenceSpec& spec, const CountingDist& counting, long kappa,
                               const CheckOptions& opts) {
    if (kappa < 1 || !counting.in_support(kappa)) {
        throw std::invalid_argument("check_theorem6: kappa not in supp(eta)");
    }
    ConditionReport rep;
    rep.theorem = "T6";
    rep.kappa = kappa;
    rep.conditions.push_back(kappa_in_ol(spec, kappa, opts));
    rep.conditions.push_back(prefix_comparable(spec, counting, kappa, kappa, true, opts));

    // condition 3: limsup-in-x of the sup-over-k successor ratios
    ConditionOutcome c3;
    c3.label = "asymptotic_successor_ratio_bounded";
    const KScanResult scan = scan_successor_ratios(spec, kappa, 0.0, opts.x_max, opts.k_max);
    const Boundedness b = judge_boundedness(scan.xwin_sup);
    switch (b) {
        case Boundedness::bounded: c3.verdict = CondVerdict::pass; break;
        case Boundedness::unbounded: c3.verdict = CondVerdict::fail; break;
        default: c3.verdict = CondVerdict::inconclusive; break;
    }
    for (int i = 0; i < 3; ++i) {
        c3.evidence.emplace_back("x_window_sup_" + std::to_string(i), scan.xwin_sup[i]);
    }
    c3.summary = "late-window sup over k = " + std::to_string(scan.xwin_sup[2]);
    rep.conditions.push_back(std::move(c3));

    // condition 4: Cesaro unit-window margin strictly below 1
    ConditionOutcome c4;
    c4.label = "cesaro_unit_window_below_one";
    const CesaroResult ces = cesaro_condition(spec, kappa, opts.k_max);
    if (!ces.stabilized) {
        c4.verdict = CondVerdict::inconclusive;
        c4.summary = "per-successor unit-window sups did not stabilize";
    } else if (ces.value < 1.0 - 1e-9) {
        c4.verdict = CondVerdict::pass;
        c4.summary = "limsup estimate " + std::to_string(ces.value) + " with margin " +
                     std::to_string(1.0 - ces.value);
    } else {
        c4.verdict = CondVerdict::fail;
        c4.summary = "unit-window average reaches 1";
    }
    c4.evidence.emplace_back("limsup_estimate", ces.value);
    for (int i = 0; i < 3; ++i) {
        c4.evidence.emplace_back("finite_avg_" + std::to_string(i), ces.finite_avg[i]);
    }
    rep.conditions.push_back(std::move(c4));

    // condition 5: counting tail dominated by sqrt(x) * kappa tail
    ConditionOutcome c5;
    c5.label = "counting_tail_dominated";
    c5.verdict = CondVerdict::pass;
    const TailModel ref = spec.resolve(kappa);
    const std::vector<double> xs = make_hybrid_grid(opts.x_max);
    const DyadicWindows win = DyadicWindows::over(opts.x_max);
    for (double delta : opts.delta_set) {
        double sums[3] = {0, 0, 0};
        long counts[3] = {0, 0, 0};
        bool vanished = false;
        for (double x : xs) {
            const int w = win.which(x);
            if (w < 0) continue;
            const double eta_tail = counting.tail(static_cast<long>(std::floor(delta * x)));
            if (eta_tail <= 0) {
                vanished = true;
                continue;
            }
            const double log_ratio =
                std::log(eta_tail) - 0.5 * std::log(x) - ref.log_survival(x);
            sums[w] += log_ratio;
            ++counts[w];
        }
        double m[3];
        bool have_all = true;
        for (int i = 0; i < 3; ++i) {
            if (counts[i] > 0) m[i] = sums[i] / counts[i];
            else have_all = false;
        }
        CondVerdict dv;
        if (!have_all) {
            dv = vanished ? CondVerdict::pass : CondVerdict::inconclusive;
        } else if (m[1] - m[0] >= 1.0 && m[2] - m[1] >= 1.0) {
            dv = CondVerdict::fail;
        } else if (m[2] <= m[1] + 0.1 && m[1] <= m[0] + 0.1) {
            dv = CondVerdict::pass;
        } else {
            dv = CondVerdict::inconclusive;
        }
        c5.evidence.emplace_back("delta_" + std::to_string(delta),
                                 dv == CondVerdict::pass ? 1.0 : (dv == CondVerdict::fail ? -1.0 : 0.0));
        if (dv == CondVerdict::fail) {
            c5.verdict = CondVerdict::fail;
            c5.summary = "counting tail dominates at delta = " + std::to_string(delta);
            break;
        }
        if (dv == CondVerdict::inconclusive && c5.verdict == CondVerdict::pass) {
            c5.verdict = CondVerdict::inconclusive;
            c5.summary = "domination trend inconclusive at delta = " + std::to_string(delta);
        }
    }
    if (c5.verdict == CondVerdict::pass) c5.summary = "dominated for every delta";
    rep.conditions.push_back(std::move(c5));
    rep.finalize();
    return rep;
}

CesaroResult cesaro_condition(const SequenceSpec& spec, long kappa, long k_max) {
    if (k_max < 4) throw std::invalid_argument("cesaro_condition: k_max must be >= 4");
    CesaroResult res;
    double running = 0;
    const long q1 = k_max / 4, q2 = k_max / 2;
    for (long l = 1; l <= k_max; ++l) {
        running += spec.resolve(kappa + l).unit_window_sup();
        if (l == q1) res.finite_avg[0] = running / static_cast<double>(q1);
        if (l == q2) res.finite_avg[1] = running / static_cast<double>(q2);
    }
    res.finite_avg[2] = running / static_cast<double>(k_max);

    // limsup: zero-density rules (finite ranges, perfect squares) average out
    // since each term is at most 1; the catch-all rule's large-index limit is
    // what survives
    const std::size_t otherwise_id = spec.rules().size() - 1;
    auto otherwise_sup_near = [&](long idx) {
        long j = idx;
        while (spec.matching_rule_id(j) != otherwise_id && j < idx + 100000) ++j;
        return spec.resolve(j).unit_window_sup();
    };
    const double s1 = otherwise_sup_near(kappa + k_max);
    const double s2 = otherwise_sup_near(kappa + 2 * k_max);
    const double s3 = otherwise_sup_near(kappa + 4 * k_max);
    res.stabilized = std::abs(s2 - s1) <= std::max(1e-9, 1e-6 * std::abs(s2)) &&
                     std::abs(s3 - s2) <= std::max(1e-9, 1e-6 * std::abs(s3));
    if (!res.stabilized) {
        // still decaying: extrapolate with the final value, flag via stabilized
        const double d = std::abs(s3 - s2);
        res.stabilized = d <= 0.9 * std::abs(s2 - s1) && d < 0.01;
    }
    res.value = s3;
    return res;
}

Lemma1Bound lemma1_bound(const TailModel& f, const TailModel& g, double x, double v, double t) {
    if (!(t > 0)) throw std::invalid_argument("lemma1_bound: t must be > 0");
    auto ratio_sup_from = [&](const TailModel& m, double start) {
        const double span = std::max({50.0, 8 * t, x - start});
        const std::vector<double> offs = make_hybrid_grid(span);
        const DyadicWindows win = DyadicWindows::over(span);
        double sup = 0;
        double wins[3] = {0, 0, 0};
        for (double o : offs) {
            const double y = start + o;
            const double den = m.log_survival(y);
            const double num = m.log_survival(y - t);
            double r;
            if (std::isinf(den) && den < 0) {
                r = (std::isinf(num) && num < 0) ? 1.0 : kInf;
            } else {
                r = std::exp(num - den);
            }
            sup = std::max(sup, r);
            const int w = win.which(o);
            if (w >= 0) wins[w] = std::max(wins[w], r);
        }
        const bool div = std::isinf(sup) || judge_boundedness(wins) == Boundedness::unbounded;
        return std::make_pair(div ? kInf : sup, div);
    };
    Lemma1Bound out;
    const auto [sf, df] = ratio_sup_from(f, v);
    const auto [sg, dg] = ratio_sup_from(g, x - v + t);
    out.sup_f = sf;
    out.sup_g = sg;
    out.divergent = df || dg;
    out.value = std::max(sf, sg);
    return out;
}

double rogozin_bound(const std::vector<TailModel>& models, double lambda,
                     const std::vector<double>& lambda_k, double A) {
    if (models.empty() || models.size() != lambda_k.size()) {
        throw std::invalid_argument("rogozin_bound: models and lambda_k must match");
    }
    if (!(lambda > 0) || !(A > 0)) throw std::invalid_argument("rogozin_bound: lambda and A must be > 0");
    double denom = 0;
    for (std::size_t i = 0; i < models.size(); ++i) {
        const double lk = lambda_k[i];
        if (!(lk > 0) || !(lk <= lambda)) {
            throw std::invalid_argument("rogozin_bound: need 0 < lambda_k <= lambda");
        }
        denom += lk * lk * (1.0 - models[i].concentration(lk));
    }
    if (denom <= 0) return kInf;
    return A * lambda / std::sqrt(denom);
}

}
