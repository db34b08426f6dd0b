#pragma once

#include <optional>
#include <vector>

#include "ssn/grid.hpp"
#include "ssn/simplex.hpp"

namespace ssn {

/// Dual optimum of the discretized tolerance problem at one epsilon, with the
/// l1-norm extremes over the dual solution set. C_eps is undefined at
/// eps == 0 (the face argument breaks there, and only c_0 is ever needed).
struct DualCertificate {
    Vec p;               // a dual optimum
    double value = 0.0;  // dual value == val(PD_eps)
    double l1 = 0.0;     // ||p||_1
    double c_eps = 0.0;
    std::optional<double> C_eps;
};

struct CurveSample {
    double param = 0.0;
    double pd_value = 0.0;
    double curve_value = 0.0;
    std::optional<double> c_eps;
    std::optional<double> C_eps;
};

/// Sampled upper-bound curve: U(eps) = eps + c_xx * val(PD_eps) or
/// L(lambda) = max(1/lambda, c_xx) * val(PD_reg_lambda).
struct HyperCurve {
    enum class Kind { U, L } kind = Kind::U;
    std::vector<CurveSample> samples;
};

/// min <1, u+ + u-> s.t. -eps <= A(u+ - u-) - Y <= eps, u >= 0. The two
/// inequality blocks collapse to equalities at eps == 0 (basis pursuit).
lp::LpProblem build_pd_eps(const ParamGrid& grid, const Vec& labels, double eps);

/// min <1, v+ + v-> + (lambda/N) <1, z+ + z-> s.t. A(v+ - v-) - (z+ - z-) = Y.
lp::LpProblem build_pd_reg(const ParamGrid& grid, const Vec& labels, double lambda);

/// Weights u+ - u- (resp. v+ - v-) of an optimal basic solution, attached to
/// their grid points. Basic feasibility caps the active count at N; a larger
/// count is a contract violation and throws.
ShallowParams extract_theta(const lp::LpSolution& sol, const ParamGrid& grid);

struct DualSolve {
    Vec p;
    double value = 0.0;
    lp::Status status = lp::Status::optimal;
};

/// Solves the discretized dual max <Y,p> - eps ||p||_1 s.t. -1 <= A^T p <= 1
/// directly (independent route from the primal; strong duality ties the two
/// values to within 1e-6 relative).
DualSolve solve_dual_eps(const ParamGrid& grid, const Vec& labels, double eps);

/// l1-norm extremes over the dual optimal face at the given optimal value.
/// certificate_c handles eps >= 0 (eps == 0 yields the threshold c_0);
/// certificate_C requires eps > 0 strictly.
double certificate_c(const ParamGrid& grid, const Vec& labels, double eps, double dual_value);
double certificate_C(const ParamGrid& grid, const Vec& labels, double eps, double dual_value);

/// Dual solve plus both certificates in one call.
DualCertificate dual_certificate(const ParamGrid& grid, const Vec& labels, double eps);

/// Curve sweeps; independent solves dispatch in parallel, samples come back
/// ordered by parameter. `with_certificates` additionally prices c/C at each
/// epsilon (two extra LP solves per sample).
HyperCurve curve_U(const ParamGrid& grid, const Vec& labels, const Vec& eps_list, double c_xx,
                   bool with_certificates = false);
HyperCurve curve_L(const ParamGrid& grid, const Vec& labels, const Vec& lambda_list, double c_xx);

struct OptimalEps {
    double eps = 0.0;
    double lo = 0.0;  // bracketing interval actually explored
    double hi = 0.0;
    bool converged = true;
};

/// Optimal tolerance for the generalization upper bound: 0 when 1/c_xx >= c_0,
/// otherwise a bisection over [0, ||Y||_inf] locating 1/c_xx inside
/// [c_eps, C_eps]. Non-convergence after 60 steps returns the bracket with
/// converged = false.
OptimalEps optimal_eps(const ParamGrid& grid, const Vec& labels, double c_xx);

/// Optimal regression weight: exactly 1/c_xx.
double optimal_lambda(double c_xx);

}  // namespace ssn
