#include "otail/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace otail {

std::vector<double> GridSpec::build() const {
    if (lin_step <= 0 || lin_to <= 0 || geo_ratio <= 1.0 || x_max <= 0) {
        throw std::invalid_argument("GridSpec: lin_step, lin_to, x_max must be > 0 and geo_ratio > 1");
    }
    std::vector<double> xs;
    const double lin_hi = std::min(lin_to, x_max);
    // i * lin_hi / n keeps integer abscissas exact (x = 1.0 matters downstream)
    const auto n = static_cast<std::size_t>(std::llround(lin_hi / lin_step));
    xs.reserve(n + 64);
    for (std::size_t i = 0; i <= n; ++i) {
        xs.push_back(static_cast<double>(i) * lin_hi / static_cast<double>(n));
    }
    double x = xs.back();
    while (x * geo_ratio < x_max) {
        x *= geo_ratio;
        xs.push_back(x);
    }
    if (xs.back() < x_max) xs.push_back(x_max);
    return xs;
}

std::vector<double> make_hybrid_grid(double x_max) {
    GridSpec spec;
    spec.x_max = x_max;
    if (x_max <= spec.lin_to) spec.lin_to = x_max;
    return spec.build();
}

std::vector<double> insert_midpoints(const std::vector<double>& xs,
                                     const std::vector<std::size_t>& segments) {
    std::vector<double> out;
    out.reserve(xs.size() + segments.size());
    std::vector<bool> mark(xs.size(), false);
    for (std::size_t s : segments) {
        if (s + 1 < xs.size()) mark[s] = true;
    }
    for (std::size_t i = 0; i < xs.size(); ++i) {
        out.push_back(xs[i]);
        if (mark[i]) {
            const double mid = 0.5 * (xs[i] + xs[i + 1]);
            if (mid > xs[i] && mid < xs[i + 1]) out.push_back(mid);
        }
    }
    return out;
}

}
