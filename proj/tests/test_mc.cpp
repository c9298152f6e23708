#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "otail/errors.hpp"
#include "otail/grid.hpp"
#include "otail/mc.hpp"
#include "otail/random_sum.hpp"

using namespace otail;

namespace {

SequenceSpec iid(const std::string& family, std::map<std::string, double> params) {
    FamilyTemplate t;
    t.family = family;
    for (auto& [k, v] : params) t.params[k] = ParamBinding::constant(v);
    return SequenceSpec({{Predicate::otherwise(), t}});
}

}  // namespace

TEST_CASE("identical seed and config reproduce bit-identical estimates") {
    const SequenceSpec s = iid("exponential", {{"rate", 1.0}});
    const CountingDist eta = CountingDist::uniform_range(3);
    const std::vector<double> xs = make_hybrid_grid(20.0);
    const McTailResult a = simulate_random_sum(s, eta, 20000, 99, xs);
    const McTailResult b = simulate_random_sum(s, eta, 20000, 99, xs);
    CHECK(a.estimate == b.estimate);
    CHECK(a.se == b.se);
    const McTailResult c = simulate_random_sum(s, eta, 20000, 100, xs);
    CHECK(a.estimate != c.estimate);
}

TEST_CASE("mixture tail estimate agrees with the closed form at x = 1") {
    const SequenceSpec s = iid("exponential", {{"rate", 1.0}});
    const CountingDist eta = CountingDist::uniform_range(2);
    const std::vector<double> xs = {0.0, 1.0, 2.0};
    const McTailResult mc = simulate_random_sum(s, eta, 1000000, 4242, xs);
    const double truth = 1.5 * std::exp(-1.0);
    CHECK(std::abs(mc.estimate[1] - truth) <= 3 * mc.se[1]);
}

TEST_CASE("degenerate counting reduces to sampling the single summand") {
    const SequenceSpec s = iid("pareto", {{"scale", 1.0}, {"shape", 2.0}});
    const TailModel par = TailModel::pareto(1.0, 2.0);
    const std::vector<double> xs = make_hybrid_grid(50.0);
    const McTailResult mc = simulate_random_sum(s, CountingDist::degenerate(1), 200000, 17, xs);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (mc.estimate[i] < 1e-3) continue;
        CHECK(std::abs(mc.estimate[i] - par.survival(xs[i])) <= 4 * mc.se[i]);
    }
}

TEST_CASE("empirical tails are non-increasing by construction") {
    const SequenceSpec s = iid("weibull_root", {});
    const McTailResult mc =
        simulate_random_sum(s, CountingDist::poisson(1.0), 50000, 3, make_hybrid_grid(100.0));
    for (std::size_t i = 1; i < mc.estimate.size(); ++i) {
        CHECK(mc.estimate[i] <= mc.estimate[i - 1]);
    }
}

TEST_CASE("concentration estimate: single exponential window mass") {
    const SequenceSpec s = iid("exponential", {{"rate", 1.0}});
    const McConcentration q = estimate_concentration(s, 1, 1.0, 200000, 11);
    const double truth = -std::expm1(-1.0);
    // lattice placement costs at most one step of window offset
    CHECK(std::abs(q.estimate - truth) <= 3 * q.se + 0.01);
}

TEST_CASE("concentration estimate: a point mass is always fully captured") {
    const SequenceSpec s = iid("point_mass", {{"location", 2.0}});
    const McConcentration q = estimate_concentration(s, 1, 0.5, 10000, 1);
    CHECK(q.estimate == 1.0);
    CHECK(q.se == 0.0);
}

TEST_CASE("calibration: 100 seeds cover the truth within 3 SE nearly always") {
    const SequenceSpec s = iid("exponential", {{"rate", 1.0}});
    const CountingDist eta = CountingDist::uniform_range(2);
    const double truth = 1.5 * std::exp(-1.0);
    const std::vector<double> xs = {1.0};
    int covered = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const McTailResult mc = simulate_random_sum(s, eta, 20000, seed, xs);
        if (std::abs(mc.estimate[0] - truth) <= 3 * mc.se[0]) ++covered;
    }
    CHECK(covered >= 95);
}

TEST_CASE("per-draw counting cap refuses heavy counting draws") {
    const SequenceSpec s = iid("exponential", {{"rate", 1.0}});
    McOptions opts;
    opts.max_count_per_draw = 1000;
    CHECK_THROWS_AS(
        simulate_random_sum(s, CountingDist::geometric(1e-4), 5000, 1, {1.0}, opts),
        BudgetExceeded);
}

TEST_CASE("deterministic and Monte Carlo random-sum tails cross-validate") {
    const SequenceSpec s = iid("exponential", {{"rate", 1.0}});
    const CountingDist eta = CountingDist::poisson(1.0);
    const std::vector<double> xs = make_hybrid_grid(30.0);
    const RandomSumResult det = random_sum_tail(s, eta, xs, {});
    const McTailResult mc = simulate_random_sum(s, eta, 200000, 5, xs);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (mc.estimate[i] < 1e-3) continue;
        CHECK(std::abs(mc.estimate[i] - det.grid.survival_at(xs[i])) <= 4 * mc.se[i]);
    }
}
