#pragma once
// Two-phase primal simplex on equality form: min c.x, a x = b, x >= 0.

#include <vector>

namespace pd {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    std::vector<double> x;
    // objective at the optimum; for infeasible systems, the attained
    // phase-one artificial mass (an infeasibility measure)
    double value = 0.0;
};

LpResult simplex_solve(std::vector<std::vector<double>> a,
                       std::vector<double> b, const std::vector<double>& c);

}  // namespace pd
