#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "otail/rng.hpp"

namespace otail {

// Counting variable on {0, 1, 2, ...}. Tails are computed by exact pmf
// summation rather than 1 - cdf, so values like P(eta > 30) ~ 1e-35 keep
// full relative accuracy.
class CountingDist {
  public:
    struct Degenerate {
        long n;  // >= 1
    };
    struct UniformRange {
        long upper;  // uniform on {1, ..., upper}
    };
    struct Poisson {
        double mean;
    };
    struct Geometric {
        double success;  // pmf p (1-p)^n on {0, 1, ...}
    };
    struct Table {
        std::vector<double> pmf;  // pmf[n] = P(eta = n)
    };
    using Family = std::variant<Degenerate, UniformRange, Poisson, Geometric, Table>;

    explicit CountingDist(Family family);

    static CountingDist degenerate(long n);
    static CountingDist uniform_range(long upper);
    static CountingDist poisson(double mean);
    static CountingDist geometric(double success);
    static CountingDist table(std::vector<double> pmf);

    const Family& family() const { return family_; }
    std::string family_name() const;

    double pmf(long n) const;
    double tail(long n) const;  // P(eta > n)
    bool in_support(long n) const { return pmf(n) > 0; }
    std::optional<long> support_upper() const;

    // smallest n with P(eta <= n) >= p; throws BudgetExceeded past cap
    long quantile(double p, long cap) const;
    long sample(RngStream& rng) const;

  private:
    void validate() const;

    Family family_;
    std::vector<double> tail_table_;  // suffix sums for Table
};

}
