#pragma once

#include <cstddef>
#include <vector>

namespace otail {

// Default evaluation grid: fine linear mesh where unit-offset ratio
// diagnostics live, geometric continuation for tail reach.
struct GridSpec {
    double lin_step = 0.05;
    double lin_to = 20.0;
    double geo_ratio = 1.05;
    double x_max = 200.0;

    std::vector<double> build() const;
};

std::vector<double> make_hybrid_grid(double x_max);

// midpoints of the marked segments, merged back in sorted order
std::vector<double> insert_midpoints(const std::vector<double>& xs,
                                     const std::vector<std::size_t>& segments);

}
