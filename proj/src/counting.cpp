#include "otail/counting.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "otail/errors.hpp"

namespace otail {

CountingDist::CountingDist(Family family) : family_(std::move(family)) {
    validate();
    if (const auto* t = std::get_if<Table>(&family_)) {
        tail_table_.assign(t->pmf.size() + 1, 0.0);
        for (std::size_t i = t->pmf.size(); i-- > 0;) {
            tail_table_[i] = tail_table_[i + 1] + t->pmf[i];
        }
    }
}

CountingDist CountingDist::degenerate(long n) { return CountingDist(Degenerate{n}); }
CountingDist CountingDist::uniform_range(long upper) { return CountingDist(UniformRange{upper}); }
CountingDist CountingDist::poisson(double mean) { return CountingDist(Poisson{mean}); }
CountingDist CountingDist::geometric(double success) { return CountingDist(Geometric{success}); }
CountingDist CountingDist::table(std::vector<double> pmf) { return CountingDist(Table{std::move(pmf)}); }

void CountingDist::validate() const {
    std::visit(
        [](const auto& f) {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Degenerate>) {
                if (f.n < 1) throw std::invalid_argument("degenerate: n must be >= 1");
            } else if constexpr (std::is_same_v<T, UniformRange>) {
                if (f.upper < 1) throw std::invalid_argument("uniform_range: upper must be >= 1");
            } else if constexpr (std::is_same_v<T, Poisson>) {
                if (!(f.mean > 0)) throw std::invalid_argument("poisson: mean must be > 0");
            } else if constexpr (std::is_same_v<T, Geometric>) {
                if (!(f.success > 0) || !(f.success < 1)) {
                    throw std::invalid_argument("geometric: success must be in (0, 1)");
                }
            } else {  // Table
                if (f.pmf.empty()) throw std::invalid_argument("table: empty pmf");
                double s = 0;
                for (double p : f.pmf) {
                    if (p < 0) throw std::invalid_argument("table: negative pmf entry");
                    s += p;
                }
                if (std::abs(s - 1.0) > 1e-12) throw std::invalid_argument("table: pmf must sum to 1");
            }
        },
        family_);
}

std::string CountingDist::family_name() const {
    return std::visit(
        [](const auto& f) -> std::string {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Degenerate>) return "degenerate";
            else if constexpr (std::is_same_v<T, UniformRange>) return "uniform_range";
            else if constexpr (std::is_same_v<T, Poisson>) return "poisson";
            else if constexpr (std::is_same_v<T, Geometric>) return "geometric";
            else return "table";
        },
        family_);
}

double CountingDist::pmf(long n) const {
    if (n < 0) return 0.0;
    return std::visit(
        [n](const auto& f) -> double {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Degenerate>) {
                return n == f.n ? 1.0 : 0.0;
            } else if constexpr (std::is_same_v<T, UniformRange>) {
                return (n >= 1 && n <= f.upper) ? 1.0 / static_cast<double>(f.upper) : 0.0;
            } else if constexpr (std::is_same_v<T, Poisson>) {
                const double d = static_cast<double>(n);
                return std::exp(d * std::log(f.mean) - f.mean - std::lgamma(d + 1.0));
            } else if constexpr (std::is_same_v<T, Geometric>) {
                return std::exp(std::log(f.success) + static_cast<double>(n) * std::log1p(-f.success));
            } else {  // Table
                return n < static_cast<long>(f.pmf.size()) ? f.pmf[n] : 0.0;
            }
        },
        family_);
}

double CountingDist::tail(long n) const {
    if (n < 0) return 1.0;
    return std::visit(
        [this, n](const auto& f) -> double {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Degenerate>) {
                return n < f.n ? 1.0 : 0.0;
            } else if constexpr (std::is_same_v<T, UniformRange>) {
                if (n >= f.upper) return 0.0;
                return static_cast<double>(f.upper - n) / static_cast<double>(f.upper);
            } else if constexpr (std::is_same_v<T, Poisson>) {
                // exact forward summation from n+1
                const double d = static_cast<double>(n + 1);
                double term = std::exp(d * std::log(f.mean) - f.mean - std::lgamma(d + 1.0));
                double sum = 0;
                for (long j = n + 1; j < n + 4000000L; ++j) {
                    sum += term;
                    term *= f.mean / static_cast<double>(j + 1);
                    if (term < sum * 1e-18 || term < 1e-320) break;
                }
                return std::min(sum, 1.0);
            } else if constexpr (std::is_same_v<T, Geometric>) {
                return std::exp(static_cast<double>(n + 1) * std::log1p(-f.success));
            } else {  // Table
                const auto idx = static_cast<std::size_t>(n + 1);
                return idx < tail_table_.size() ? tail_table_[idx] : 0.0;
            }
        },
        family_);
}

std::optional<long> CountingDist::support_upper() const {
    return std::visit(
        [](const auto& f) -> std::optional<long> {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Degenerate>) return f.n;
            else if constexpr (std::is_same_v<T, UniformRange>) return f.upper;
            else if constexpr (std::is_same_v<T, Table>) {
                for (std::size_t i = f.pmf.size(); i-- > 0;) {
                    if (f.pmf[i] > 0) return static_cast<long>(i);
                }
                return 0;
            } else {
                return std::nullopt;
            }
        },
        family_);
}

long CountingDist::quantile(double p, long cap) const {
    if (!(p >= 0) || !(p <= 1)) throw std::invalid_argument("counting quantile: p must be in [0, 1]");
    const double target = 1.0 - p;  // find smallest n with tail(n) <= target
    long lo = 0;
    if (tail(0) <= target) return 0;
    long hi = 1;
    while (tail(hi) > target) {
        lo = hi;
        hi *= 2;
        if (hi > cap) {
            throw BudgetExceeded("counting quantile exceeds truncation cap", tail(cap));
        }
    }
    while (lo + 1 < hi) {
        const long mid = lo + (hi - lo) / 2;
        if (tail(mid) > target) lo = mid;
        else hi = mid;
    }
    return hi;
}

long CountingDist::sample(RngStream& rng) const {
    return std::visit(
        [&rng](const auto& f) -> long {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Degenerate>) {
                return f.n;
            } else if constexpr (std::is_same_v<T, UniformRange>) {
                const double u = rng.next_unit();
                const long k = 1 + static_cast<long>(u * static_cast<double>(f.upper));
                return std::min(k, f.upper);
            } else if constexpr (std::is_same_v<T, Poisson>) {
                const double u = rng.next_unit();
                double term = std::exp(-f.mean);
                double cum = term;
                long n = 0;
                while (u > cum && n < 10000000L) {
                    ++n;
                    term *= f.mean / static_cast<double>(n);
                    cum += term;
                }
                return n;
            } else if constexpr (std::is_same_v<T, Geometric>) {
                const double u = rng.next_unit();
                const double k = std::floor(std::log(u) / std::log1p(-f.success));
                return static_cast<long>(std::max(0.0, k));
            } else {  // Table
                const double u = rng.next_unit();
                double cum = 0;
                for (std::size_t i = 0; i < f.pmf.size(); ++i) {
                    cum += f.pmf[i];
                    if (u <= cum) return static_cast<long>(i);
                }
                return static_cast<long>(f.pmf.size()) - 1;
            }
        },
        family_);
}

}
