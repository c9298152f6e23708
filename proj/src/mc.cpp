#include "otail/mc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "otail/errors.hpp"
#include "otail/rng.hpp"

namespace otail {

namespace {

// resolve() results for indices seen so far; replicate loops hit the same
// low indices constantly
class ModelCache {
  public:
    explicit ModelCache(const SequenceSpec& spec) : spec_(&spec) {}
    const TailModel& at(long index) {
        while (static_cast<long>(models_.size()) < index) {
            models_.push_back(spec_->resolve(static_cast<long>(models_.size()) + 1));
        }
        return models_[static_cast<std::size_t>(index - 1)];
    }

  private:
    const SequenceSpec* spec_;
    std::vector<TailModel> models_;
};

std::vector<double> draw_sums(const SequenceSpec& spec, const CountingDist* counting, long n_terms,
                              long n_samples, std::uint64_t seed, long max_count) {
    if (n_samples < 1000) throw std::invalid_argument("monte carlo: need at least 1000 samples");
    ModelCache cache(spec);
    std::vector<double> sums(static_cast<std::size_t>(n_samples));
    for (long r = 0; r < n_samples; ++r) {
        RngStream rng = RngStream::make(seed, static_cast<std::uint64_t>(r));
        const long n = counting ? counting->sample(rng) : n_terms;
        if (n > max_count) {
            throw BudgetExceeded("monte carlo: counting draw exceeded the per-draw cap", 0.0);
        }
        double s = 0;
        for (long i = 1; i <= n; ++i) s += cache.at(i).sample(rng);
        sums[static_cast<std::size_t>(r)] = s;
    }
    std::sort(sums.begin(), sums.end());
    return sums;
}

}  // namespace

McTailResult simulate_random_sum(const SequenceSpec& spec, const CountingDist& counting,
                                 long n_samples, std::uint64_t seed,
                                 const std::vector<double>& xs, const McOptions& opts) {
    const std::vector<double> sums =
        draw_sums(spec, &counting, 0, n_samples, seed, opts.max_count_per_draw);
    McTailResult res;
    res.xs = xs;
    res.samples = n_samples;
    res.seed = seed;
    const double n = static_cast<double>(n_samples);
    res.estimate.reserve(xs.size());
    res.se.reserve(xs.size());
    for (double x : xs) {
        const auto it = std::upper_bound(sums.begin(), sums.end(), x);
        const double exceed = static_cast<double>(sums.end() - it);
        const double p = exceed / n;
        res.estimate.push_back(p);
        res.se.push_back(std::sqrt(p * (1.0 - p) / n));
    }
    return res;
}

McConcentration estimate_concentration(const SequenceSpec& spec, long n_terms, double width,
                                       long n_samples, std::uint64_t seed) {
    if (!(width > 0)) throw std::invalid_argument("estimate_concentration: width must be > 0");
    if (n_terms < 1) throw std::invalid_argument("estimate_concentration: n_terms must be >= 1");
    const std::vector<double> sums = draw_sums(spec, nullptr, n_terms, n_samples, seed, n_terms);
    const double step = width / 16.0;
    const double lo = sums.front();
    const double hi = sums.back();
    double best = 0;
    const double span = hi - lo;
    const auto positions = static_cast<long>(span / step) + 1;
    if (positions <= 4000000L) {
        for (long j = 0; j < positions; ++j) {
            const double s = lo + static_cast<double>(j) * step;
            const auto l = std::lower_bound(sums.begin(), sums.end(), s);
            const auto r = std::upper_bound(l, sums.end(), s + width);
            best = std::max(best, static_cast<double>(r - l));
        }
    } else {
        // heavy-tailed range: anchor windows at samples snapped down to the
        // lattice (bias at most one lattice step)
        for (double v : sums) {
            const double s = lo + std::floor((v - lo) / step) * step;
            const auto l = std::lower_bound(sums.begin(), sums.end(), s);
            const auto r = std::upper_bound(l, sums.end(), s + width);
            best = std::max(best, static_cast<double>(r - l));
        }
    }
    McConcentration out;
    const double n = static_cast<double>(n_samples);
    out.estimate = best / n;
    out.se = std::sqrt(out.estimate * (1.0 - out.estimate) / n);
    out.samples = n_samples;
    return out;
}

}
