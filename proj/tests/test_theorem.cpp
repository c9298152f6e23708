#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "otail/classify.hpp"
#include "otail/grid.hpp"
#include "otail/mc.hpp"
#include "otail/presets.hpp"
#include "otail/random_sum.hpp"
#include "otail/theorem.hpp"

using namespace otail;

namespace {

SequenceSpec iid(const std::string& family, std::map<std::string, double> params) {
    FamilyTemplate t;
    t.family = family;
    for (auto& [k, v] : params) t.params[k] = ParamBinding::constant(v);
    return SequenceSpec({{Predicate::otherwise(), t}});
}

const ConditionOutcome& condition(const ConditionReport& r, const std::string& label) {
    for (const auto& c : r.conditions) {
        if (c.label == label) return c;
    }
    FAIL("no such condition: ", label);
    return r.conditions.front();
}

}  // namespace

TEST_CASE("cesaro: iid exponential successors give exactly 1 - 1/e") {
    const SequenceSpec s = iid("exponential", {{"rate", 1.0}});
    for (long k_max : {16L, 1000L}) {
        const CesaroResult c = cesaro_condition(s, 1, k_max);
        CHECK(c.stabilized);
        CHECK(c.value == doctest::Approx(-std::expm1(-1.0)).epsilon(1e-15));
        CHECK(c.finite_avg[2] == doctest::Approx(-std::expm1(-1.0)).epsilon(1e-12));
    }
}

TEST_CASE("cesaro: point-mass successors saturate at 1") {
    const SequenceSpec s = iid("point_mass", {{"location", 1.0}});
    const CesaroResult c = cesaro_condition(s, 1, 100);
    CHECK(c.value == doctest::Approx(1.0));
    const ConditionReport rep = check_theorem6(s, CountingDist::poisson(1.0), 1, {});
    CHECK(condition(rep, "cesaro_unit_window_below_one").verdict == CondVerdict::fail);
    CHECK(rep.overall == Applicability::does_not_apply);
}

TEST_CASE("cesaro: plateau squares push the finite average above the limit") {
    const Preset p = make_preset(3);
    const CesaroResult c = cesaro_condition(p.sequence, p.kappa, 10000);
    CHECK(c.stabilized);
    CHECK(c.value <= -std::expm1(-1.0) + 1e-9);
    // squares contribute 1 - 1/l > 1 - 1/e each, so finite averages approach
    // the limit from above
    CHECK(c.finite_avg[2] > c.value);
    CHECK(c.finite_avg[2] == doctest::Approx(0.6357).epsilon(1e-3));
    CHECK(c.finite_avg[0] > c.finite_avg[1]);
    CHECK(c.finite_avg[1] > c.finite_avg[2]);
}

TEST_CASE("successor ratio sup: preset 1 attains e and stays under 2^alpha") {
    const Preset p = make_preset(1);  // alpha = 2, lambda = 1, D = 3
    const double sup = successor_ratio_sup(p.sequence, p.kappa, 0.0, 50.0, 1, 200);
    CHECK(sup <= 4.0);
    CHECK(sup >= std::exp(1.0) - 1e-6);
    CHECK(sup == doctest::Approx(std::exp(1.0)).epsilon(1e-9));
}

TEST_CASE("successor ratio sup: preset 3 restricted to x >= 1 equals e") {
    const Preset p = make_preset(3);
    const double sup = successor_ratio_sup(p.sequence, p.kappa, 1.0, 50.0, 1, 2000);
    CHECK(sup == doctest::Approx(std::exp(1.0)).epsilon(1e-9));
    // over all x >= 0 the plateau levels blow the sup up
    const double sup_all = successor_ratio_sup(p.sequence, p.kappa, 0.0, 50.0, 1, 2000);
    CHECK(sup_all >= 1935.9);  // largest square <= 2000, up to float round-trip
}

TEST_CASE("uniform-ratio checker applies to preset 1") {
    const Preset p = make_preset(1);
    const ConditionReport rep = check_theorem4(p.sequence, p.counting, p.kappa, {});
    CHECK(rep.overall == Applicability::applies);
    const ConditionOutcome& c3 = condition(rep, "uniform_successor_ratio_bounded");
    double sup = -1;
    for (const auto& [k, v] : c3.evidence) {
        if (k == "sup") sup = v;
    }
    CHECK(sup <= 4.0);
    CHECK(sup >= std::exp(1.0) - 1e-6);
}

TEST_CASE("uniform-ratio checker rejects preset 3 on the square subsequence") {
    const Preset p = make_preset(3);
    const ConditionReport rep = check_theorem4(p.sequence, p.counting, p.kappa, {});
    CHECK(rep.overall == Applicability::does_not_apply);
    const ConditionOutcome& c3 = condition(rep, "uniform_successor_ratio_bounded");
    CHECK(c3.verdict == CondVerdict::fail);
    CHECK(c3.summary.find("perfect-square") != std::string::npos);
}

TEST_CASE("bounded-count checker applies to preset 2 and rejects unbounded counting") {
    const Preset p = make_preset(2);
    const ConditionReport rep = check_theorem5(p.sequence, p.counting, p.kappa, p.bounded_D, {});
    CHECK(rep.overall == Applicability::applies);

    const ConditionReport bad =
        check_theorem5(p.sequence, CountingDist::poisson(1.0), p.kappa, p.bounded_D, {});
    CHECK(bad.overall == Applicability::does_not_apply);
    CHECK(condition(bad, "counting_bounded_by_D").verdict == CondVerdict::fail);
}

TEST_CASE("bounded-count checker: D = 1 with one O-exponential summand") {
    const SequenceSpec s = iid("exponential", {{"rate", 1.0}});
    const ConditionReport rep = check_theorem5(s, CountingDist::degenerate(1), 1, 1, {});
    CHECK(rep.overall == Applicability::applies);
}

TEST_CASE("uniform-ratio checker: degenerate counting with one exponential") {
    const SequenceSpec s = iid("exponential", {{"rate", 1.0}});
    const ConditionReport rep = check_theorem4(s, CountingDist::degenerate(1), 1, {});
    CHECK(rep.overall == Applicability::applies);
}

TEST_CASE("asymptotic checker applies to preset 3") {
    const Preset p = make_preset(3);
    const ConditionReport rep = check_theorem6(p.sequence, p.counting, p.kappa, {});
    CHECK(rep.overall == Applicability::applies);
    for (const auto& c : rep.conditions) CHECK(c.verdict == CondVerdict::pass);
    const ConditionOutcome& c4 = condition(rep, "cesaro_unit_window_below_one");
    double limsup = 2;
    for (const auto& [k, v] : c4.evidence) {
        if (k == "limsup_estimate") limsup = v;
    }
    CHECK(limsup <= -std::expm1(-1.0) + 1e-9);
}

TEST_CASE("asymptotic checker rejects counting tails that dominate") {
    // geometric counting decays like 0.99^x, far heavier than sqrt(x) e^{-x}
    const SequenceSpec s = iid("exponential", {{"rate", 1.0}});
    const ConditionReport rep = check_theorem6(s, CountingDist::geometric(0.01), 1, {});
    CHECK(condition(rep, "counting_tail_dominated").verdict == CondVerdict::fail);
    CHECK(rep.overall == Applicability::does_not_apply);
}

TEST_CASE("kappa must sit in the counting support") {
    const SequenceSpec s = iid("exponential", {{"rate", 1.0}});
    CHECK_THROWS_AS(check_theorem4(s, CountingDist::degenerate(2), 1, {}), std::invalid_argument);
    CHECK_THROWS_AS(check_theorem6(s, CountingDist::degenerate(2), 5, {}), std::invalid_argument);
}

TEST_CASE("evidence is stable under larger scan ranges") {
    const Preset p1 = make_preset(1);
    CheckOptions small;
    small.x_max = 100.0;
    small.k_max = 2000;
    CheckOptions big;
    big.x_max = 200.0;
    big.k_max = 8000;
    CHECK(check_theorem4(p1.sequence, p1.counting, p1.kappa, small).overall ==
          Applicability::applies);
    CHECK(check_theorem4(p1.sequence, p1.counting, p1.kappa, big).overall == Applicability::applies);

    const Preset p3 = make_preset(3);
    CHECK(check_theorem6(p3.sequence, p3.counting, p3.kappa, small).overall ==
          Applicability::applies);
    CHECK(check_theorem6(p3.sequence, p3.counting, p3.kappa, big).overall == Applicability::applies);
}

TEST_CASE("checker consistency: applicable presets have O-exponential random sums") {
    for (int id : {1, 2, 3}) {
        const Preset p = make_preset(id);
        ConditionReport rep;
        if (p.theorem == 4) rep = check_theorem4(p.sequence, p.counting, p.kappa, {});
        else if (p.theorem == 5) rep = check_theorem5(p.sequence, p.counting, p.kappa, p.bounded_D, {});
        else rep = check_theorem6(p.sequence, p.counting, p.kappa, {});
        REQUIRE(rep.overall == Applicability::applies);
        const RandomSumResult rs =
            random_sum_tail(p.sequence, p.counting, make_hybrid_grid(200.0), {});
        const ClassVerdict ol = classify(TailRef(rs.grid), TailClass::OL, {});
        CHECK(ol.verdict == Verdict::member);
    }
}

TEST_CASE("convolution-ratio bound: exponential pair gives exactly e") {
    const TailModel e1 = TailModel::exponential(1.0);
    const Lemma1Bound b = lemma1_bound(e1, e1, 10.0, 5.0, 1.0);
    CHECK_FALSE(b.divergent);
    CHECK(b.value == doctest::Approx(std::exp(1.0)).epsilon(1e-12));

    // the measured Erlang(2) ratio at x = 10 sits below the bound
    const double ratio = (11.0 * std::exp(-9.0) * std::exp(9.0 - 10.0) * 10.0 / 11.0) /
                         (11.0 * std::exp(-10.0));
    // simplified: F(9)/F(10) with F(x) = (1+x) e^{-x}
    const double conv_ratio = (10.0 * std::exp(-9.0)) / (11.0 * std::exp(-10.0));
    (void)ratio;
    CHECK(conv_ratio == doctest::Approx((10.0 / 11.0) * std::exp(1.0)).epsilon(1e-12));
    CHECK(conv_ratio == doctest::Approx(2.4712).epsilon(1e-4));
    CHECK(conv_ratio <= b.value);
}

TEST_CASE("convolution-ratio bound: divergent sups flagged as infinite") {
    const Lemma1Bound b =
        lemma1_bound(TailModel::gauss_tail(), TailModel::exponential(1.0), 10.0, 3.0, 0.5);
    CHECK(b.divergent);
    CHECK(std::isinf(b.value));
}

TEST_CASE("concentration bound: closed-form uniform case") {
    const std::vector<TailModel> two(2, TailModel::uniform(0.0, 1.0));
    // Q_{U(0,1)}(1/2) = 1/2, so the denominator sum is 1/4
    CHECK(rogozin_bound(two, 1.0, {0.5, 0.5}, 2.0) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(rogozin_bound(two, 1.0, {0.5, 0.5}, 1.0) == doctest::Approx(2.0).epsilon(1e-12));

    const std::vector<TailModel> pm(1, TailModel::point_mass(1.0));
    CHECK(std::isinf(rogozin_bound(pm, 1.0, {1.0}, 2.0)));

    CHECK_THROWS_AS(rogozin_bound(two, 1.0, {2.0, 0.5}, 2.0), std::invalid_argument);
}

TEST_CASE("concentration bound dominates a Monte Carlo estimate") {
    const SequenceSpec s = iid("uniform", {{"lo", 0.0}, {"hi", 2.0}});
    const long n = 64;
    const std::vector<TailModel> models(n, TailModel::uniform(0.0, 2.0));
    const double bound = rogozin_bound(models, 1.0, std::vector<double>(n, 1.0), 2.0);
    const McConcentration q = estimate_concentration(s, n, 1.0, 100000, 7);
    CHECK(q.estimate + 3 * q.se <= bound);
}
