#include "otail/random_sum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "otail/grid.hpp"

namespace otail {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Step budgets weighted by how much counting mass each step can touch: the
// error of step i enters every term n >= i, so budget_i * P(eta >= i) shares
// tol/2 evenly across steps.
std::function<double(long)> weighted_budgets(const CountingDist& counting, long N, double tol) {
    return [&counting, N, tol](long i) {
        const double reach = std::max(counting.tail(i - 1), 1e-300);
        const double b = (tol / 2) / (static_cast<double>(N) * reach);
        return std::min(b, 0.1);
    };
}

struct MixtureOut {
    TailGrid grid;
    double bound;
};

MixtureOut assemble_mixture(const ChainBuilder& chain, const CountingDist& counting, long N,
                            double remainder, bool tol_met) {
    const std::vector<double>& xs = chain.grid();
    std::vector<double> values(xs.size(), 0.0);
    double bound = remainder;
    for (long n = 1; n <= N; ++n) {
        const double p = counting.pmf(n);
        if (p <= 0) continue;
        const ChainBuilder::Term& t = chain.term(n);
        for (std::size_t i = 0; i < xs.size(); ++i) values[i] += p * t.sf(xs[i]);
        bound += p * t.err;
    }
    double prev = 1.0;
    for (auto& v : values) {
        v = std::clamp(v, 0.0, prev);
        prev = v;
    }
    TailGrid g;
    g.xs = xs;
    g.log_sf.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        g.log_sf[i] = values[i] > 0 ? std::log(values[i]) : kNegInf;
    }
    g.abs_error_bound = bound;
    g.tol_met = tol_met;
    g.validate();
    return {std::move(g), bound};
}

}  // namespace

RandomSumResult random_sum_tail(const SequenceSpec& spec, const CountingDist& counting,
                                const std::vector<double>& xs, const RandomSumOptions& opts) {
    if (!(opts.tol > 0)) throw std::invalid_argument("random_sum_tail: tol must be > 0");
    const long N = counting.quantile(1.0 - opts.tol / 2, opts.truncation_cap);
    const double remainder = counting.tail(N);

    RandomSumResult res;
    res.truncation = N;
    res.counting_remainder = remainder;
    if (N == 0) {
        // all mass at eta = 0: S_eta = 0, survival 0 on x >= 0
        TailGrid g;
        g.xs = xs;
        g.log_sf.assign(xs.size(), kNegInf);
        g.abs_error_bound = remainder;
        res.grid = std::move(g);
        return res;
    }

    ChainBuilder chain(spec, xs, opts.conv);
    chain.extend(N, weighted_budgets(counting, N, opts.tol));
    MixtureOut mix = assemble_mixture(chain, counting, N, remainder, chain.tol_met());
    res.grid = std::move(mix.grid);
    return res;
}

DecompositionTrace decomposition_trace(const SequenceSpec& spec, const CountingDist& counting,
                                       long kappa, double K, double x,
                                       const RandomSumOptions& opts) {
    if (!(K > 2)) throw std::invalid_argument("decomposition_trace: K must be > 2");
    if (!(x >= 2 * K)) throw std::invalid_argument("decomposition_trace: x must be >= 2K");
    if (kappa < 1 || !counting.in_support(kappa)) {
        throw std::invalid_argument("decomposition_trace: kappa not in supp(eta)");
    }
    const long N = counting.quantile(1.0 - opts.tol / 2, opts.truncation_cap);
    std::vector<double> xs = make_hybrid_grid(std::max(x + 2.0, 20.0));

    ChainBuilder chain(spec, xs, opts.conv);
    chain.extend(N, weighted_budgets(counting, N, opts.tol));

    const double k_cut = (x - 1.0) / (K - 1.0);
    DecompositionTrace tr;
    tr.truncation = N;
    double bound = counting.tail(N);
    for (long n = 1; n <= N; ++n) {
        const double p = counting.pmf(n);
        if (p <= 0) continue;
        const ChainBuilder::Term& t = chain.term(n);
        bound += p * t.err;
        if (n <= kappa) {
            tr.k1 += p * t.sf(x - 1.0);
        } else {
            const long k = n - kappa;
            if (static_cast<double>(k) <= k_cut) {
                tr.k2 += p * t.sf(x - 1.0);
            } else {
                const double at_xm1 = t.sf(x - 1.0);
                const double at_x = t.sf(x);
                tr.k3 += p * std::max(at_xm1 - at_x, 0.0);
                tr.k4 += p * at_x;
            }
        }
    }
    tr.err_bound = bound;
    return tr;
}

}
