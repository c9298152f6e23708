#include "otail/tail_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace otail {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

void TailGrid::validate() const {
    if (xs.size() != log_sf.size() || xs.size() < 2) {
        throw std::invalid_argument("TailGrid: xs/log_sf size mismatch or too short");
    }
    if (xs.front() < 0) throw std::invalid_argument("TailGrid: negative abscissa");
    if (abs_error_bound < 0) throw std::invalid_argument("TailGrid: negative error bound");
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        if (!(xs[i] < xs[i + 1])) throw std::invalid_argument("TailGrid: xs not strictly increasing");
        if (log_sf[i + 1] > log_sf[i] + 1e-12) {
            throw std::invalid_argument("TailGrid: log_sf not non-increasing");
        }
    }
    for (double v : log_sf) {
        if (v > 1e-12 || std::isnan(v)) throw std::invalid_argument("TailGrid: log_sf must be in [-inf, 0]");
    }
}

double TailGrid::tail_slope() const {
    for (std::size_t i = xs.size() - 1; i > 0; --i) {
        const double a = log_sf[i - 1];
        const double b = log_sf[i];
        if (std::isfinite(a) && std::isfinite(b) && b < a) {
            return (b - a) / (xs[i] - xs[i - 1]);
        }
        if (!std::isfinite(b)) continue;
    }
    return 0.0;
}

double TailGrid::log_sf_at(double x) const {
    if (x < xs.front()) return 0.0;
    if (x > xs.back()) {
        const double last = log_sf.back();
        if (!std::isfinite(last)) return kNegInf;
        return last + tail_slope() * (x - xs.back());
    }
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    std::size_t hi = static_cast<std::size_t>(it - xs.begin());
    if (hi == 0) hi = 1;
    if (hi >= xs.size()) hi = xs.size() - 1;
    const std::size_t lo = hi - 1;
    const double la = log_sf[lo];
    const double lb = log_sf[hi];
    if (x == xs[lo]) return la;
    if (!std::isfinite(la)) return kNegInf;
    if (!std::isfinite(lb)) {
        // survival drops to zero at xs[hi]; hold the last finite value until then
        return x < xs[hi] ? la : kNegInf;
    }
    const double t = (x - xs[lo]) / (xs[hi] - xs[lo]);
    return la + t * (lb - la);
}

double TailGrid::survival_at(double x) const {
    return std::exp(log_sf_at(x));
}

}
