#include "otail/sequence.hpp"

#include <cmath>
#include <stdexcept>

namespace otail {

ParamBinding ParamBinding::constant(double v) {
    ParamBinding p;
    p.kind = Kind::constant;
    p.value = v;
    return p;
}

ParamBinding ParamBinding::linear(double a, double b) {
    ParamBinding p;
    p.kind = Kind::linear;
    p.a = a;
    p.b = b;
    return p;
}

ParamBinding ParamBinding::inverse(double num, double a, double b) {
    ParamBinding p;
    p.kind = Kind::inverse;
    p.num = num;
    p.a = a;
    p.b = b;
    return p;
}

double ParamBinding::eval(long index) const {
    const double k = static_cast<double>(index);
    switch (kind) {
        case Kind::constant: return value;
        case Kind::linear: return a * k + b;
        case Kind::inverse: {
            const double den = a * k + b;
            if (den == 0) throw std::invalid_argument("param binding: zero denominator at this index");
            return num / den;
        }
    }
    return value;
}

TailModel FamilyTemplate::instantiate(long index) const {
    auto get = [&](const std::string& name) {
        const auto it = params.find(name);
        if (it == params.end()) {
            throw std::invalid_argument("family template '" + family + "': missing param '" + name + "'");
        }
        return it->second.eval(index);
    };
    if (family == "pareto") return TailModel::pareto(get("scale"), get("shape"));
    if (family == "exponential") return TailModel::exponential(get("rate"));
    if (family == "weibull_root") return TailModel::weibull_root();
    if (family == "uniform") return TailModel::uniform(get("lo"), get("hi"));
    if (family == "point_mass") return TailModel::point_mass(get("location"));
    if (family == "finite_table") return TailModel::finite_table(table_points);
    if (family == "plateau_exponential") return TailModel::plateau_exponential(get("level"));
    if (family == "gauss_tail") return TailModel::gauss_tail();
    throw std::invalid_argument("family template: unknown family '" + family + "'");
}

Predicate Predicate::index_in_range(long lo, long hi) {
    Predicate p;
    p.kind = Kind::index_in_range;
    p.lo = lo;
    p.hi = hi;
    return p;
}

Predicate Predicate::index_is_perfect_square(long offset) {
    Predicate p;
    p.kind = Kind::index_is_perfect_square;
    p.offset = offset;
    return p;
}

Predicate Predicate::otherwise() {
    Predicate p;
    p.kind = Kind::otherwise;
    return p;
}

bool is_perfect_square(long n) {
    if (n < 0) return false;
    const long r = std::lround(std::sqrt(static_cast<double>(n)));
    for (long c = std::max(0L, r - 1); c <= r + 1; ++c) {
        if (c * c == n) return true;
    }
    return false;
}

bool Predicate::matches(long index) const {
    switch (kind) {
        case Kind::index_in_range: return index >= lo && index <= hi;
        case Kind::index_is_perfect_square: return is_perfect_square(index - offset);
        case Kind::otherwise: return true;
    }
    return false;
}

SequenceSpec::SequenceSpec(std::vector<Rule> rules) : rules_(std::move(rules)) {
    if (rules_.empty()) throw std::invalid_argument("sequence: no rules");
    if (rules_.back().predicate.kind != Predicate::Kind::otherwise) {
        throw std::invalid_argument("sequence: final rule must be the catch-all");
    }
    for (std::size_t i = 0; i + 1 < rules_.size(); ++i) {
        if (rules_[i].predicate.kind == Predicate::Kind::otherwise) {
            throw std::invalid_argument("sequence: catch-all must be the last rule");
        }
    }
}

std::size_t SequenceSpec::matching_rule_id(long index) const {
    if (index < 1) throw std::invalid_argument("sequence: index must be >= 1");
    for (std::size_t i = 0; i < rules_.size(); ++i) {
        if (rules_[i].predicate.matches(index)) return i;
    }
    return rules_.size() - 1;
}

const SequenceSpec::Rule& SequenceSpec::matching_rule(long index) const {
    return rules_[matching_rule_id(index)];
}

TailModel SequenceSpec::resolve(long index) const {
    return matching_rule(index).family.instantiate(index);
}

bool SequenceSpec::has_perfect_square_rule() const {
    for (const auto& r : rules_) {
        if (r.predicate.kind == Predicate::Kind::index_is_perfect_square) return true;
    }
    return false;
}

}
