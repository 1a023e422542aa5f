#pragma once

#include "riscbf/types.hpp"

namespace riscbf {

// Small dense LP solver used for the selection-problem relaxation bounds:
//   min c^T x  s.t.  a_i x (<=|=|>=) rhs_i,  0 <= x_j <= ub_j.
// Two-phase tableau simplex with Bland's rule; intended for the tiny
// instances this project produces (tens of variables).
struct LpProblem {
    RMat a;
    std::vector<int> rel; // -1: <=, 0: ==, +1: >=
    RVec rhs;
    RVec c;
    RVec ub; // per-variable upper bound (use +inf for none)
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
    LpStatus status = LpStatus::infeasible;
    RVec x;
    double objective = 0;
};

LpResult solve_lp(const LpProblem& lp);

} // namespace riscbf
