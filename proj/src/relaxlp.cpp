#include "ssn/relaxlp.hpp"

#include <cmath>
#include <stdexcept>

#include "ssn/parallel.hpp"

namespace ssn {

namespace {

constexpr double kCertTol = 1e-6;

void check_labels(const ParamGrid& grid, const Vec& labels) {
    if (static_cast<int>(labels.size()) != grid.n())
        throw std::invalid_argument("relaxlp: label count does not match the grid design matrix");
}

}  // namespace

lp::LpProblem build_pd_eps(const ParamGrid& grid, const Vec& labels, double eps) {
    check_labels(grid, labels);
    if (eps < 0.0) throw std::invalid_argument("build_pd_eps: eps must be >= 0");
    const int n = grid.n(), m = grid.m();
    lp::LpProblem p = lp::LpProblem::minimize(Vec(2 * m, 1.0));
    for (int i = 0; i < n; ++i) {
        Vec row(2 * m, 0.0);
        for (int j = 0; j < m; ++j) {
            row[j] = grid.design(i, j);
            row[m + j] = -grid.design(i, j);
        }
        if (eps == 0.0) {
            p.add_row(std::move(row), lp::RowSense::eq, labels[i]);
        } else {
            Vec upper = row;
            p.add_row(std::move(upper), lp::RowSense::le, labels[i] + eps);
            p.add_row(std::move(row), lp::RowSense::ge, labels[i] - eps);
        }
    }
    return p;
}

lp::LpProblem build_pd_reg(const ParamGrid& grid, const Vec& labels, double lambda) {
    check_labels(grid, labels);
    if (!(lambda > 0.0)) throw std::invalid_argument("build_pd_reg: lambda must be > 0");
    const int n = grid.n(), m = grid.m();
    Vec obj(2 * m + 2 * n, 1.0);
    for (int i = 0; i < 2 * n; ++i) obj[2 * m + i] = lambda / n;
    lp::LpProblem p = lp::LpProblem::minimize(std::move(obj));
    for (int i = 0; i < n; ++i) {
        Vec row(2 * m + 2 * n, 0.0);
        for (int j = 0; j < m; ++j) {
            row[j] = grid.design(i, j);
            row[m + j] = -grid.design(i, j);
        }
        row[2 * m + i] = -1.0;
        row[2 * m + n + i] = 1.0;
        p.add_row(std::move(row), lp::RowSense::eq, labels[i]);
    }
    return p;
}

ShallowParams extract_theta(const lp::LpSolution& sol, const ParamGrid& grid) {
    if (!sol.optimal()) throw std::invalid_argument("extract_theta: solution is not optimal");
    const int m = grid.m();
    if (static_cast<int>(sol.x.size()) < 2 * m)
        throw std::invalid_argument("extract_theta: solution does not match the grid");
    ShallowParams theta;
    const int d = static_cast<int>(grid.points.front().size()) - 1;
    for (int j = 0; j < m; ++j) {
        const double w = sol.x[j] - sol.x[m + j];
        if (std::abs(w) <= kZeroWeightTol) continue;
        Neuron nrn;
        nrn.weight = w;
        nrn.direction.assign(grid.points[j].begin(), grid.points[j].begin() + d);
        nrn.bias = grid.points[j][d];
        theta.neurons.push_back(std::move(nrn));
    }
    if (theta.size() > grid.n())
        throw std::logic_error("extract_theta: basic solution with more than N active weights");
    return theta;
}

DualSolve solve_dual_eps(const ParamGrid& grid, const Vec& labels, double eps) {
    check_labels(grid, labels);
    if (eps < 0.0) throw std::invalid_argument("solve_dual_eps: eps must be >= 0");
    const int n = grid.n(), m = grid.m();
    // Variables (p+, p-); maximize <Y, p+ - p-> - eps <1, p+ + p-> becomes a
    // minimization of the negated objective.
    Vec obj(2 * n);
    for (int i = 0; i < n; ++i) {
        obj[i] = -labels[i] + eps;
        obj[n + i] = labels[i] + eps;
    }
    lp::LpProblem p = lp::LpProblem::minimize(std::move(obj));
    for (int j = 0; j < m; ++j) {
        Vec row(2 * n, 0.0);
        for (int i = 0; i < n; ++i) {
            row[i] = grid.design(i, j);
            row[n + i] = -grid.design(i, j);
        }
        Vec lowr = row;
        p.add_row(std::move(row), lp::RowSense::le, 1.0);
        p.add_row(std::move(lowr), lp::RowSense::ge, -1.0);
    }
    const lp::LpSolution sol = lp::solve(p);
    DualSolve out;
    out.status = sol.status;
    if (sol.status != lp::Status::optimal) return out;
    out.value = -sol.value;
    out.p.resize(n);
    for (int i = 0; i < n; ++i) out.p[i] = sol.x[i] - sol.x[n + i];
    return out;
}

namespace {

double certificate_extreme(const ParamGrid& grid, const Vec& labels, double eps, double dual_value,
                           bool maximize) {
    const int n = grid.n(), m = grid.m();
    Vec obj(2 * n, maximize ? -1.0 : 1.0);
    lp::LpProblem p = lp::LpProblem::minimize(std::move(obj));
    for (int j = 0; j < m; ++j) {
        Vec row(2 * n, 0.0);
        for (int i = 0; i < n; ++i) {
            row[i] = grid.design(i, j);
            row[n + i] = -grid.design(i, j);
        }
        Vec lowr = row;
        p.add_row(std::move(row), lp::RowSense::le, 1.0);
        p.add_row(std::move(lowr), lp::RowSense::ge, -1.0);
    }
    // Pin the dual objective to its optimal value: this is the optimal face.
    Vec face(2 * n);
    for (int i = 0; i < n; ++i) {
        face[i] = labels[i] - eps;
        face[n + i] = -labels[i] - eps;
    }
    p.add_row(std::move(face), lp::RowSense::eq, dual_value);

    const lp::LpSolution sol = lp::solve(p);
    if (sol.status == lp::Status::infeasible)
        throw std::runtime_error("certificate: optimal-face LP infeasible; dual_value inconsistent");
    if (sol.status == lp::Status::unbounded)
        throw std::runtime_error("certificate: optimal-face LP unbounded");
    return maximize ? -sol.value : sol.value;
}

}  // namespace

double certificate_c(const ParamGrid& grid, const Vec& labels, double eps, double dual_value) {
    check_labels(grid, labels);
    if (eps < 0.0) throw std::invalid_argument("certificate_c: eps must be >= 0");
    return certificate_extreme(grid, labels, eps, dual_value, false);
}

double certificate_C(const ParamGrid& grid, const Vec& labels, double eps, double dual_value) {
    check_labels(grid, labels);
    if (!(eps > 0.0)) throw std::invalid_argument("certificate_C: eps must be > 0");
    return certificate_extreme(grid, labels, eps, dual_value, true);
}

DualCertificate dual_certificate(const ParamGrid& grid, const Vec& labels, double eps) {
    const DualSolve ds = solve_dual_eps(grid, labels, eps);
    if (ds.status != lp::Status::optimal)
        throw std::runtime_error("dual_certificate: dual solve did not reach optimality");
    DualCertificate cert;
    cert.p = ds.p;
    cert.value = ds.value;
    cert.l1 = norm1(ds.p);
    cert.c_eps = certificate_c(grid, labels, eps, ds.value);
    if (eps > 0.0) cert.C_eps = certificate_C(grid, labels, eps, ds.value);
    return cert;
}

HyperCurve curve_U(const ParamGrid& grid, const Vec& labels, const Vec& eps_list, double c_xx,
                   bool with_certificates) {
    check_labels(grid, labels);
    if (c_xx < 0.0) throw std::invalid_argument("curve_U: c_xx must be >= 0");
    for (size_t i = 1; i < eps_list.size(); ++i)
        if (!(eps_list[i - 1] < eps_list[i]))
            throw std::invalid_argument("curve_U: eps list must be strictly increasing");

    HyperCurve curve;
    curve.kind = HyperCurve::Kind::U;
    curve.samples.resize(eps_list.size());
    const int count = static_cast<int>(eps_list.size());
#pragma omp parallel for schedule(dynamic) num_threads(max_threads())
    for (int i = 0; i < count; ++i) {
        const double eps = eps_list[i];
        const lp::LpSolution sol = lp::solve(build_pd_eps(grid, labels, eps));
        CurveSample s;
        s.param = eps;
        s.pd_value = sol.optimal() ? sol.value : std::numeric_limits<double>::quiet_NaN();
        s.curve_value = eps + c_xx * s.pd_value;
        if (with_certificates && sol.optimal()) {
            const DualSolve ds = solve_dual_eps(grid, labels, eps);
            if (ds.status == lp::Status::optimal) {
                s.c_eps = certificate_c(grid, labels, eps, ds.value);
                if (eps > 0.0) s.C_eps = certificate_C(grid, labels, eps, ds.value);
            }
        }
        curve.samples[i] = std::move(s);
    }
    return curve;
}

HyperCurve curve_L(const ParamGrid& grid, const Vec& labels, const Vec& lambda_list, double c_xx) {
    check_labels(grid, labels);
    if (c_xx < 0.0) throw std::invalid_argument("curve_L: c_xx must be >= 0");
    for (size_t i = 1; i < lambda_list.size(); ++i)
        if (!(lambda_list[i - 1] < lambda_list[i]))
            throw std::invalid_argument("curve_L: lambda list must be strictly increasing");

    HyperCurve curve;
    curve.kind = HyperCurve::Kind::L;
    curve.samples.resize(lambda_list.size());
    const int count = static_cast<int>(lambda_list.size());
#pragma omp parallel for schedule(dynamic) num_threads(max_threads())
    for (int i = 0; i < count; ++i) {
        const double lambda = lambda_list[i];
        const lp::LpSolution sol = lp::solve(build_pd_reg(grid, labels, lambda));
        CurveSample s;
        s.param = lambda;
        s.pd_value = sol.optimal() ? sol.value : std::numeric_limits<double>::quiet_NaN();
        s.curve_value = std::max(1.0 / lambda, c_xx) * s.pd_value;
        curve.samples[i] = std::move(s);
    }
    return curve;
}

OptimalEps optimal_eps(const ParamGrid& grid, const Vec& labels, double c_xx) {
    check_labels(grid, labels);
    if (!(c_xx > 0.0)) throw std::invalid_argument("optimal_eps: c_xx must be > 0");
    const double target = 1.0 / c_xx;

    const DualCertificate at_zero = dual_certificate(grid, labels, 0.0);
    OptimalEps out;
    if (target >= at_zero.c_eps - kCertTol) {
        out.eps = 0.0;
        out.lo = out.hi = 0.0;
        out.converged = true;
        return out;
    }

    double lo = 0.0, hi = norm_inf(labels);
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const DualCertificate cert = dual_certificate(grid, labels, mid);
        const double upper = cert.C_eps ? *cert.C_eps : cert.c_eps;
        if (target < cert.c_eps - kCertTol) {
            lo = mid;  // certificates shrink as eps grows: move right
        } else if (target > upper + kCertTol) {
            hi = mid;
        } else {
            out.eps = mid;
            out.lo = lo;
            out.hi = hi;
            out.converged = true;
            return out;
        }
    }
    out.lo = lo;
    out.hi = hi;
    out.eps = 0.5 * (lo + hi);
    out.converged = false;
    return out;
}

double optimal_lambda(double c_xx) {
    if (!(c_xx > 0.0)) throw std::invalid_argument("optimal_lambda: c_xx must be > 0");
    return 1.0 / c_xx;
}

}  // namespace ssn
