#pragma once

#include <stdexcept>
#include <string>

namespace otail {

// Raised when a computation would exceed its configured numerical budget
// (truncation caps, node limits). Carries the bound that *was* attained so
// callers can report an honest partial answer.
struct BudgetExceeded : std::runtime_error {
    BudgetExceeded(const std::string& what, double attained_bound)
        : std::runtime_error(what), attained(attained_bound) {}
    double attained;
};

}
