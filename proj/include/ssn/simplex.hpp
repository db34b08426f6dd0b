#pragma once

#include <string>
#include <vector>

#include "ssn/linalg.hpp"

namespace ssn::lp {

enum class RowSense { le, eq, ge };
enum class Status { optimal, infeasible, unbounded };

/// Linear program: minimize c . x over x >= 0 subject to dense rows with
/// mixed senses. Slack insertion and rhs sign normalization happen inside the
/// solver, so callers state constraints as written.
struct LpProblem {
    Vec c;                        // objective, one entry per structural variable
    std::vector<Vec> rows;        // each of size c.size()
    std::vector<RowSense> sense;  // per row
    Vec rhs;                      // per row

    static LpProblem minimize(Vec objective);
    void add_row(Vec coefficients, RowSense s, double b);

    int vars() const { return static_cast<int>(c.size()); }
    int num_rows() const { return static_cast<int>(rows.size()); }
};

/// Basic feasible optimum. `x` covers the structural variables only and is
/// exactly zero off the basis; `dual` carries one multiplier per original row
/// (sign convention: value == dual . rhs at optimality). `basis` indexes the
/// standardized column space (structural variables first, then slacks).
struct LpSolution {
    Status status = Status::optimal;
    Vec x;
    Vec dual;
    std::vector<int> basis;
    double value = 0.0;
    int iterations = 0;

    bool optimal() const { return status == Status::optimal; }
};

/// Two-phase revised simplex with a dense basis inverse (refreshed every 50
/// pivots). Pricing is Dantzig's rule, switching permanently to Bland's rule
/// after 3(m+n) iterations without objective progress. Deterministic: ties
/// break toward the lowest index everywhere. Throws std::runtime_error on a
/// numerical stall (iteration cap), never on infeasible/unbounded input.
LpSolution solve(const LpProblem& p);

/// Plain-text "minimize / subject to" dump for external cross-checking.
std::string dump(const LpProblem& p);

}  // namespace ssn::lp
