#include "otail/json_io.hpp"

#include <cstdint>
#include <stdexcept>

namespace otail {

namespace {

double need_number(const json& j, const std::string& field) {
    if (!j.contains(field) || !j[field].is_number()) {
        throw std::invalid_argument("config: missing numeric field '" + field + "'");
    }
    return j[field].get<double>();
}

long need_integer(const json& j, const std::string& field) {
    if (!j.contains(field) || !j[field].is_number_integer()) {
        throw std::invalid_argument("config: missing integer field '" + field + "'");
    }
    return j[field].get<long>();
}

std::string need_string(const json& j, const std::string& field) {
    if (!j.contains(field) || !j[field].is_string()) {
        throw std::invalid_argument("config: missing string field '" + field + "'");
    }
    return j[field].get<std::string>();
}

const json& params_of(const json& j) {
    static const json empty = json::object();
    if (!j.contains("params")) return empty;
    if (!j["params"].is_object()) throw std::invalid_argument("config: 'params' must be an object");
    return j["params"];
}

std::vector<std::pair<double, double>> points_from(const json& p) {
    if (!p.contains("points") || !p["points"].is_array()) {
        throw std::invalid_argument("finite_table: missing 'points' array");
    }
    std::vector<std::pair<double, double>> pts;
    for (const auto& e : p["points"]) {
        if (!e.is_array() || e.size() != 2) {
            throw std::invalid_argument("finite_table: points must be [value, prob] pairs");
        }
        pts.emplace_back(e[0].get<double>(), e[1].get<double>());
    }
    return pts;
}

}  // namespace

json model_to_json(const TailModel& m) {
    json p = json::object();
    std::visit(
        [&p](const auto& f) {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, TailModel::Pareto>) {
                p["scale"] = f.scale;
                p["shape"] = f.shape;
            } else if constexpr (std::is_same_v<T, TailModel::Exponential>) {
                p["rate"] = f.rate;
            } else if constexpr (std::is_same_v<T, TailModel::Uniform>) {
                p["lo"] = f.lo;
                p["hi"] = f.hi;
            } else if constexpr (std::is_same_v<T, TailModel::PointMass>) {
                p["location"] = f.location;
            } else if constexpr (std::is_same_v<T, TailModel::FiniteTable>) {
                json pts = json::array();
                for (const auto& [v, pr] : f.points) pts.push_back(json::array({v, pr}));
                p["points"] = std::move(pts);
            } else if constexpr (std::is_same_v<T, TailModel::PlateauExponential>) {
                p["level"] = f.level;
            } else if constexpr (std::is_same_v<T, TailModel::Tabulated>) {
                p["xs"] = f.grid.xs;
                p["log_survival"] = f.grid.log_sf;
                p["abs_error_bound"] = f.grid.abs_error_bound;
                if (f.mean) p["mean"] = *f.mean;
            }
        },
        m.family());
    return json{{"family", m.family_name()}, {"params", std::move(p)}};
}

TailModel model_from_json(const json& j) {
    const std::string fam = need_string(j, "family");
    const json& p = params_of(j);
    if (fam == "pareto") return TailModel::pareto(need_number(p, "scale"), need_number(p, "shape"));
    if (fam == "exponential") return TailModel::exponential(need_number(p, "rate"));
    if (fam == "weibull_root") return TailModel::weibull_root();
    if (fam == "uniform") return TailModel::uniform(need_number(p, "lo"), need_number(p, "hi"));
    if (fam == "point_mass") return TailModel::point_mass(need_number(p, "location"));
    if (fam == "finite_table") return TailModel::finite_table(points_from(p));
    if (fam == "plateau_exponential") return TailModel::plateau_exponential(need_number(p, "level"));
    if (fam == "gauss_tail") return TailModel::gauss_tail();
    if (fam == "tabulated") {
        TailGrid g;
        g.xs = p.at("xs").get<std::vector<double>>();
        g.log_sf = p.at("log_survival").get<std::vector<double>>();
        g.abs_error_bound = p.value("abs_error_bound", 0.0);
        std::optional<double> mean;
        if (p.contains("mean")) mean = p["mean"].get<double>();
        return TailModel::tabulated(std::move(g), mean);
    }
    throw std::invalid_argument("config: unknown model family '" + fam + "'");
}

json counting_to_json(const CountingDist& c) {
    json p = json::object();
    std::visit(
        [&p](const auto& f) {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, CountingDist::Degenerate>) p["n"] = f.n;
            else if constexpr (std::is_same_v<T, CountingDist::UniformRange>) p["upper"] = f.upper;
            else if constexpr (std::is_same_v<T, CountingDist::Poisson>) p["mean"] = f.mean;
            else if constexpr (std::is_same_v<T, CountingDist::Geometric>) p["success"] = f.success;
            else p["pmf"] = f.pmf;
        },
        c.family());
    return json{{"family", c.family_name()}, {"params", std::move(p)}};
}

CountingDist counting_from_json(const json& j) {
    const std::string fam = need_string(j, "family");
    const json& p = params_of(j);
    if (fam == "degenerate") return CountingDist::degenerate(need_integer(p, "n"));
    if (fam == "uniform_range") return CountingDist::uniform_range(need_integer(p, "upper"));
    if (fam == "poisson") return CountingDist::poisson(need_number(p, "mean"));
    if (fam == "geometric") return CountingDist::geometric(need_number(p, "success"));
    if (fam == "table") {
        if (!p.contains("pmf") || !p["pmf"].is_array()) {
            throw std::invalid_argument("counting table: missing 'pmf' array");
        }
        return CountingDist::table(p["pmf"].get<std::vector<double>>());
    }
    throw std::invalid_argument("config: unknown counting family '" + fam + "'");
}

namespace {

json binding_to_json(const ParamBinding& b) {
    switch (b.kind) {
        case ParamBinding::Kind::constant: return json(b.value);
        case ParamBinding::Kind::linear: return json{{"linear", {{"a", b.a}, {"b", b.b}}}};
        case ParamBinding::Kind::inverse:
            return json{{"inverse", {{"num", b.num}, {"a", b.a}, {"b", b.b}}}};
    }
    return json();
}

ParamBinding binding_from_json(const json& j) {
    if (j.is_number()) return ParamBinding::constant(j.get<double>());
    if (j.is_object() && j.contains("linear")) {
        const json& l = j["linear"];
        return ParamBinding::linear(need_number(l, "a"), need_number(l, "b"));
    }
    if (j.is_object() && j.contains("inverse")) {
        const json& l = j["inverse"];
        return ParamBinding::inverse(need_number(l, "num"), need_number(l, "a"), need_number(l, "b"));
    }
    throw std::invalid_argument("sequence: parameter must be a number, {linear:...} or {inverse:...}");
}

json family_template_to_json(const FamilyTemplate& t) {
    json p = json::object();
    for (const auto& [name, b] : t.params) p[name] = binding_to_json(b);
    if (t.family == "finite_table") {
        json pts = json::array();
        for (const auto& [v, pr] : t.table_points) pts.push_back(json::array({v, pr}));
        p["points"] = std::move(pts);
    }
    return json{{"family", t.family}, {"params", std::move(p)}};
}

FamilyTemplate family_template_from_json(const json& j) {
    FamilyTemplate t;
    t.family = need_string(j, "family");
    const json& p = params_of(j);
    for (auto it = p.begin(); it != p.end(); ++it) {
        if (it.key() == "points") {
            t.table_points = points_from(p);
        } else {
            t.params[it.key()] = binding_from_json(it.value());
        }
    }
    return t;
}

json predicate_to_json(const Predicate& p) {
    switch (p.kind) {
        case Predicate::Kind::index_in_range:
            return json{{"type", "index_in_range"}, {"lo", p.lo}, {"hi", p.hi}};
        case Predicate::Kind::index_is_perfect_square:
            return json{{"type", "index_is_perfect_square"}, {"offset", p.offset}};
        case Predicate::Kind::otherwise: return json{{"type", "otherwise"}};
    }
    return json();
}

Predicate predicate_from_json(const json& j) {
    const std::string type = need_string(j, "type");
    if (type == "index_in_range") return Predicate::index_in_range(need_integer(j, "lo"), need_integer(j, "hi"));
    if (type == "index_is_perfect_square") {
        return Predicate::index_is_perfect_square(j.value("offset", 0L));
    }
    if (type == "otherwise") return Predicate::otherwise();
    throw std::invalid_argument("sequence: unknown predicate type '" + type + "'");
}

}  // namespace

json sequence_to_json(const SequenceSpec& s) {
    json rules = json::array();
    for (const auto& r : s.rules()) {
        if (r.predicate.kind == Predicate::Kind::otherwise) {
            rules.push_back(json{{"otherwise", family_template_to_json(r.family)}});
        } else {
            rules.push_back(json{{"predicate", predicate_to_json(r.predicate)},
                                 {"family", family_template_to_json(r.family)}});
        }
    }
    return json{{"rules", std::move(rules)}};
}

SequenceSpec sequence_from_json(const json& j) {
    if (!j.contains("rules") || !j["rules"].is_array()) {
        throw std::invalid_argument("sequence: missing 'rules' array");
    }
    std::vector<SequenceSpec::Rule> rules;
    for (const auto& rj : j["rules"]) {
        SequenceSpec::Rule r;
        if (rj.contains("otherwise")) {
            r.predicate = Predicate::otherwise();
            r.family = family_template_from_json(rj["otherwise"]);
        } else {
            if (!rj.contains("predicate") || !rj.contains("family")) {
                throw std::invalid_argument("sequence: rule needs 'predicate' and 'family' (or 'otherwise')");
            }
            r.predicate = predicate_from_json(rj["predicate"]);
            r.family = family_template_from_json(rj["family"]);
        }
        rules.push_back(std::move(r));
    }
    return SequenceSpec(std::move(rules));
}

RunConfig run_config_from_json(const json& j) {
    RunConfig cfg;
    if (j.contains("model")) cfg.model = model_from_json(j["model"]);
    if (j.contains("sequence")) cfg.sequence = sequence_from_json(j["sequence"]);
    if (j.contains("counting")) cfg.counting = counting_from_json(j["counting"]);
    if (j.contains("kappa")) cfg.kappa = j["kappa"].get<long>();
    if (!cfg.model && !cfg.sequence) {
        throw std::invalid_argument("config: needs 'model' or 'sequence'");
    }
    return cfg;
}

json run_config_to_json(const RunConfig& cfg) {
    json j = json::object();
    if (cfg.model) j["model"] = model_to_json(*cfg.model);
    if (cfg.sequence) j["sequence"] = sequence_to_json(*cfg.sequence);
    if (cfg.counting) j["counting"] = counting_to_json(*cfg.counting);
    if (cfg.kappa) j["kappa"] = *cfg.kappa;
    return j;
}

std::string config_hash(const json& j) {
    const std::string s = j.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

}
