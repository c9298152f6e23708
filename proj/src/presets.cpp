#include "otail/presets.hpp"

#include <stdexcept>

namespace otail {

namespace {

FamilyTemplate constant_family(const std::string& name,
                               std::map<std::string, double> params = {}) {
    FamilyTemplate t;
    t.family = name;
    for (const auto& [k, v] : params) t.params[k] = ParamBinding::constant(v);
    return t;
}

}  // namespace

Preset make_preset(int id, const PresetParams& params) {
    if (id == 1) {
        const long D = params.D > 0 ? params.D : 3;
        FamilyTemplate pareto;
        pareto.family = "pareto";
        pareto.params["scale"] = ParamBinding::linear(1.0, 0.0);  // scale = index
        pareto.params["shape"] = ParamBinding::constant(params.alpha);
        FamilyTemplate exp_decaying;
        exp_decaying.family = "exponential";
        // rate lambda / (index - D): the m-th summand past the prefix has rate lambda/m
        exp_decaying.params["rate"] =
            ParamBinding::inverse(params.lambda, 1.0, -static_cast<double>(D));
        SequenceSpec seq({{Predicate::index_in_range(1, D), pareto},
                          {Predicate::otherwise(), exp_decaying}});
        return Preset{"pareto_prefix_decaying_exponential", std::move(seq),
                      CountingDist::poisson(1.0), 1, 4, 0};
    }
    if (id == 2) {
        const long D = params.D > 0 ? params.D : 5;
        SequenceSpec seq({{Predicate::index_in_range(1, 1),
                           constant_family("exponential", {{"rate", params.lambda}})},
                          {Predicate::otherwise(), constant_family("uniform", {{"lo", 0.0}, {"hi", 1.0}})}});
        return Preset{"exponential_plus_uniforms", std::move(seq), CountingDist::uniform_range(D),
                      1, 5, D};
    }
    if (id == 3) {
        const long kappa = 2;
        FamilyTemplate prefix;
        prefix.family = "finite_table";
        prefix.table_points = {{0.0, 0.5}, {1.0, 0.5}};
        FamilyTemplate plateau;
        plateau.family = "plateau_exponential";
        // level = index - kappa, i.e. the perfect-square offset itself
        plateau.params["level"] = ParamBinding::linear(1.0, -static_cast<double>(kappa));
        // offsets 0 and 1 are perfect squares but carry no plateau tail; the
        // range rules ahead of the square rule keep them out of its reach
        SequenceSpec seq({{Predicate::index_in_range(1, kappa - 1), prefix},
                          {Predicate::index_in_range(kappa, kappa), constant_family("weibull_root")},
                          {Predicate::index_in_range(kappa + 1, kappa + 1),
                           constant_family("exponential", {{"rate", 1.0}})},
                          {Predicate::index_is_perfect_square(kappa), plateau},
                          {Predicate::otherwise(), constant_family("exponential", {{"rate", 1.0}})}});
        return Preset{"weibull_root_with_plateau_squares", std::move(seq),
                      CountingDist::poisson(params.lambda), kappa, 6, 0};
    }
    throw std::invalid_argument("make_preset: id must be 1, 2, or 3");
}

}
