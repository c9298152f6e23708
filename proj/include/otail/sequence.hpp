#pragma once

#include <map>
#include <string>
#include <vector>

#include "otail/model.hpp"

namespace otail {

// Parameter templates may reference the summand index: constant, affine in
// the index, or num / (a*index + b) for rate-like parameters.
struct ParamBinding {
    enum class Kind { constant, linear, inverse };
    Kind kind = Kind::constant;
    double value = 0;       // constant
    double a = 0, b = 0;    // linear / inverse denominator
    double num = 0;         // inverse numerator

    static ParamBinding constant(double v);
    static ParamBinding linear(double a, double b);
    static ParamBinding inverse(double num, double a, double b);
    double eval(long index) const;
};

struct FamilyTemplate {
    std::string family;
    std::map<std::string, ParamBinding> params;
    std::vector<std::pair<double, double>> table_points;  // finite_table only

    TailModel instantiate(long index) const;
};

struct Predicate {
    enum class Kind { index_in_range, index_is_perfect_square, otherwise };
    Kind kind = Kind::otherwise;
    long lo = 0, hi = 0;  // index_in_range, inclusive
    long offset = 0;      // perfect-square test applies to index - offset

    static Predicate index_in_range(long lo, long hi);
    static Predicate index_is_perfect_square(long offset = 0);
    static Predicate otherwise();
    bool matches(long index) const;
};

// First-match rule list mapping summand index k >= 1 to a tail model.
// Construction rejects rule lists without a final catch-all.
class SequenceSpec {
  public:
    struct Rule {
        Predicate predicate;
        FamilyTemplate family;
    };

    explicit SequenceSpec(std::vector<Rule> rules);

    TailModel resolve(long index) const;
    const Rule& matching_rule(long index) const;
    std::size_t matching_rule_id(long index) const;
    const std::vector<Rule>& rules() const { return rules_; }
    bool has_perfect_square_rule() const;

  private:
    std::vector<Rule> rules_;
};

bool is_perfect_square(long n);

}
