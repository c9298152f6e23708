#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "otail/model.hpp"
#include "otail/piecewise.hpp"
#include "otail/sequence.hpp"
#include "otail/tail_grid.hpp"

namespace otail {

struct ConvOptions {
    int max_refine_rounds = 40;
    std::size_t max_nodes = 400000;
    std::size_t max_panels_per_node = 60000;
};

// Tail of the independent sum A + B evaluated on xs (refined where needed to
// meet tol). abs_error_bound covers quadrature brackets, measured
// interpolation gaps, and the inputs' own bounds; tol_met reports honestly
// whether tol was reached within the node budget.
TailGrid conv_pair(const TailModel& a, const TailModel& b, const std::vector<double>& xs,
                   double tol, const ConvOptions& opts = {});
TailGrid conv_pair(const TailGrid& a, const TailModel& b, const std::vector<double>& xs,
                   double tol, const ConvOptions& opts = {});

// Tail of S_n = xi_1 + ... + xi_n, left fold with per-step budget tol/n.
TailGrid conv_chain(const SequenceSpec& spec, long n, const std::vector<double>& xs, double tol,
                    const ConvOptions& opts = {});

// Pointwise tail of A + B: values at exactly the given abscissas with a
// quadrature half-bracket, no grid interpolation involved. Exact kernel
// pairs come back with quad = 0.
struct PointwiseConv {
    std::vector<double> values;
    double quad = 0;
    bool tol_met = true;
};
PointwiseConv conv_tail_at(const TailModel& a, const TailModel& b, const std::vector<double>& xs,
                           double node_tol, const ConvOptions& opts = {});

// Closed-form tail for special prefixes: all-exponential with equal rates
// (gamma/Erlang), all-exponential with distinct rates (hypoexponential), or
// all standard-uniform (Irwin-Hall). Test oracle; independent of the
// quadrature path.
struct ExactTail {
    enum class Kind { single, erlang, hypoexp, irwin_hall };
    Kind kind;
    std::optional<TailModel> single;
    long n = 0;
    double rate = 0;
    std::vector<double> rates;

    double sf(double x) const;
    double log_sf(double x) const;
    std::string name() const;
};
std::optional<ExactTail> exact_tail_oracle(const SequenceSpec& spec, long n);

// Incremental builder for S_1, S_2, ...: keeps every prefix tail, shares the
// (monotonically refined) evaluation grid, and accumulates error bounds.
class ChainBuilder {
  public:
    struct Term {
        std::variant<TailModel, TailGrid> rep;
        double err = 0;

        double sf(double x) const;
        double log_sf(double x) const;
    };

    ChainBuilder(const SequenceSpec& spec, std::vector<double> grid, ConvOptions opts = {});

    // extend to S_n; step_budget(i) is the quad+gap allowance for step i >= 2
    void extend(long n, const std::function<double(long)>& step_budget);

    const Term& term(long n) const;  // 1-based; extend() must have reached n
    long built() const { return static_cast<long>(terms_.size()); }
    const std::vector<double>& grid() const { return grid_; }
    bool tol_met() const { return tol_met_; }

  private:
    const SequenceSpec* spec_;
    std::vector<double> grid_;
    ConvOptions opts_;
    std::vector<Term> terms_;
    bool tol_met_ = true;
};

}
