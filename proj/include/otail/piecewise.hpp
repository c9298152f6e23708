#pragma once

#include <utility>
#include <vector>

#include "otail/model.hpp"
#include "otail/tail_grid.hpp"

namespace otail {

// One survival segment: s(t) = (c + d*(t - lo)) * exp(g*(t - lo)) on [lo, hi).
// Local coordinates keep every exponent representable no matter how far out
// the piece starts.
struct TailPiece {
    double lo, hi;
    double c, d, g;

    double eval(double t) const;
    double eval_end() const;  // value at hi (0 for infinite pieces with g < 0)
};

// stable \int_0^delta (c + d s) e^{h s} ds
double affine_exp_integral(double c, double d, double h, double delta);

// Exact piecewise representation of a survival curve made of affine*exp
// segments plus atoms at the segment boundaries. Grids, exponential, uniform,
// plateau-exponential, and purely atomic models all fit; Pareto/Weibull-root/
// Gauss tails do not.
class PiecewiseTail {
  public:
    static PiecewiseTail from_model(const TailModel& m);
    static PiecewiseTail from_grid(const TailGrid& g);

    double eval(double t) const;  // t < 0 -> 1
    const std::vector<TailPiece>& pieces() const { return pieces_; }
    const std::vector<std::pair<double, double>>& atoms() const { return atoms_; }

    // \int_0^z survival(t) dt
    double integral_sf(double z) const;
    // \int_p^q survival(t) dt summed piece-locally: keeps relative accuracy
    // where differencing prefix integrals would cancel
    double integral_sf_segment(double p, double q) const;
    // continuous-part mass / partial first moment over (p, q]
    double cont_mass(double p, double q) const;
    double cont_partial_mean(double p, double q) const;

  private:
    void finalize();  // derive atoms, prefix integrals
    std::size_t piece_index(double t) const;

    std::vector<TailPiece> pieces_;
    std::vector<std::pair<double, double>> atoms_;
    std::vector<double> cum_sf_;  // \int_0^{pieces_[i].lo} survival
};

}
