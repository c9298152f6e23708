#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "otail/rng.hpp"
#include "otail/tail_grid.hpp"

namespace otail {

// Nonnegative distribution described canonically by its log-survival function.
// Plain survival probabilities underflow long before log-survival does, and
// tail ratios stay well-conditioned as log differences.
class TailModel {
  public:
    struct Pareto {
        double scale;  // k > 0
        double shape;  // alpha > 0
    };
    struct Exponential {
        double rate;  // lambda > 0
    };
    // survival exp(-sqrt(x))
    struct WeibullRoot {};
    struct Uniform {
        double lo;  // 0 <= lo < hi
        double hi;
    };
    struct PointMass {
        double location;  // >= 0
    };
    struct FiniteTable {
        std::vector<std::pair<double, double>> points;  // (value, prob), sorted by value
    };
    // atom of mass 1 - 1/level at 0, survival 1/level on [0, level),
    // then (1/level) * exp(-(x - level))
    struct PlateauExponential {
        double level;  // >= 2
    };
    struct Tabulated {
        TailGrid grid;
        std::optional<double> mean;
    };
    // survival exp(-x^2); decays faster than every exponential, so no shifted
    // tail ratio stays bounded -- the classifier's stock negative case
    struct GaussTail {};

    using Family = std::variant<Pareto, Exponential, WeibullRoot, Uniform, PointMass,
                                FiniteTable, PlateauExponential, Tabulated, GaussTail>;

    explicit TailModel(Family family);

    static TailModel pareto(double scale, double shape);
    static TailModel exponential(double rate);
    static TailModel weibull_root();
    static TailModel uniform(double lo, double hi);
    static TailModel point_mass(double location);
    static TailModel finite_table(std::vector<std::pair<double, double>> points);
    static TailModel plateau_exponential(double level);
    static TailModel tabulated(TailGrid grid, std::optional<double> mean = std::nullopt);
    static TailModel gauss_tail();

    const Family& family() const { return family_; }
    std::string family_name() const;

    // ln P(X > x); exactly 0 for x < 0, -inf past bounded support
    double log_survival(double x) const;
    double survival(double x) const;
    // left limit P(X >= x): differs from survival(x) only at atoms
    double survival_left(double x) const;

    // survival quantile: inf{ x >= 0 : survival(x) <= u }, u in (0, 1]
    double quantile(double u) const;
    double sample(RngStream& rng) const;

    // Levy concentration Q(width) = sup_x P(x <= X <= x + width)
    double concentration(double width) const;
    // sup_x ( survival(x-1) - survival(x) ), the unit-window mass of the
    // Cesaro condition; closed form per family where one exists
    double unit_window_sup() const;

    std::optional<double> mean() const { return mean_; }
    double largest_atom() const;
    std::vector<std::pair<double, double>> atoms() const;
    bool is_atomic() const;  // all mass in atoms
    bool bounded_support() const;
    double support_upper() const;  // +inf when unbounded

    // continuous-part segment statistics over (p, q], used by the Stieltjes
    // quadrature: mass and partial first moment, both closed form
    double cont_mass(double p, double q) const;
    double cont_partial_mean(double p, double q) const;

    // abscissas where the survival curve kinks or the density changes
    // monotonicity; quadrature panels never straddle these
    std::vector<double> shape_knots() const;
    // density trend on a knot-free interval around t: -1 decreasing,
    // 0 constant/none, +1 increasing
    int density_trend(double t) const;

    // representable exactly as piecewise (affine)*(exponential) survival
    bool piecewise_affine_exp() const;

  private:
    void validate() const;
    void compute_mean();

    Family family_;
    std::optional<double> mean_;
};

}
