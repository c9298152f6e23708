#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "otail/model.hpp"
#include "otail/tail_grid.hpp"

namespace otail {

// A tail under study: parametric model or tabulated grid.
class TailRef {
  public:
    TailRef(const TailModel& m) : model_(&m) {}
    TailRef(const TailGrid& g) : grid_(&g) {}

    double log_sf(double x) const;
    double sf(double x) const;
    std::optional<double> mean() const;
    bool bounded_support() const;
    const TailModel* model() const { return model_; }
    const TailGrid* grid() const { return grid_; }

  private:
    const TailModel* model_ = nullptr;
    const TailGrid* grid_ = nullptr;
};

enum class Verdict { member, non_member, inconclusive };
enum class Trend { stabilizing, diverging, oscillating };
enum class Boundedness { bounded, unbounded, inconclusive };
enum class Comparability { vanishing, bounded, diverging, inconclusive };
enum class TailClass { OL, L, Lgamma, D, S, Sstar };

std::string to_string(Verdict v);
std::string to_string(Trend t);
std::string to_string(Boundedness b);
std::string to_string(Comparability c);
std::string to_string(TailClass c);
TailClass tail_class_from_string(const std::string& s);

// The three dyadic reference windows [m/8, m/4], [m/4, m/2], [m/2, m]:
// every asymptotic verdict in the library reads its evidence off these.
struct DyadicWindows {
    double lo[3], hi[3];
    static DyadicWindows over(double x_max);
    int which(double x) const;  // -1 if outside all three
};

// Decision rule for limsup boundedness evidence: the three window sups within
// 5% of each other, or monotonically non-increasing -> bounded; each window
// growing by >= 25% -> unbounded; otherwise inconclusive.
Boundedness judge_boundedness(const double sups[3]);

// |v_i - limit| shrinking geometrically (factor <= 0.9) or already within
// tol_abs certifies convergence on finite evidence
bool decays_to(const double v[3], double limit, double tol_abs);

struct RatioReport {
    double offset = 1.0;          // shift a, or contraction factor when multiplicative
    bool multiplicative = false;  // ratio sf(a*x)/sf(x) instead of sf(x-a)/sf(x)
    std::vector<std::pair<double, double>> series;  // (x, r(x))
    double window_sup[3] = {0, 0, 0};
    double window_inf[3] = {0, 0, 0};
    double window_log_mean[3] = {0, 0, 0};
    double windowed_sup = 0;  // sup over the final window
    double global_sup = 0;    // sup over all x >= 0
    Trend trend = Trend::oscillating;
    Boundedness verdict = Boundedness::inconclusive;
    bool bounded_support_hit = false;
};

RatioReport ratio_profile(const TailRef& tail, double a, double x_max);
RatioReport ratio_profile_multiplicative(const TailRef& tail, double factor, double x_max);

struct ClassifyOptions {
    double x_max = 200.0;
    double eps_L = 0.01;     // class-L band around ratio 1 at the default x_max
    double conv_tol = 1e-8;  // tolerance for the self-convolution diagnostics
};

struct ClassVerdict {
    TailClass tail_class = TailClass::OL;
    Verdict verdict = Verdict::inconclusive;
    std::optional<double> gamma_estimate;
    RatioReport ratio;                                   // OL / L / L(gamma) / D evidence
    std::vector<std::pair<double, double>> diag_series;  // S and S* diagnostic values
    std::string note;
};

ClassVerdict classify(const TailRef& tail, TailClass cls, const ClassifyOptions& opts = {});

// Trend of log sf_a - log sf_b over the late windows.
Comparability comparability(const TailRef& a, const TailRef& b, double x_max = 200.0);

}
