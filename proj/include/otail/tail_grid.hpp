#pragma once

#include <vector>

namespace otail {

// Tabulated log-survival curve over a strictly increasing nonnegative grid.
//
// Evaluation semantics:
//   x < xs.front()          -> survival 1 (nonnegative support, mass may sit at xs.front())
//   xs[i] <= x <= xs[i+1]   -> log-linear interpolation
//   x > xs.back()           -> log-linear extrapolation of the last finite slope
//
// abs_error_bound is a uniform bound on |true survival - interpolated survival|,
// accumulated additively through every operation that produced this grid.
struct TailGrid {
    std::vector<double> xs;
    std::vector<double> log_sf;
    double abs_error_bound = 0.0;
    bool tol_met = true;

    void validate() const;

    double log_sf_at(double x) const;
    double survival_at(double x) const;
    bool extrapolates(double x) const { return !xs.empty() && x > xs.back(); }

    // slope used past the last node (last finite negative slope, 0 if none)
    double tail_slope() const;
};

}
