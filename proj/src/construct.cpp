#include "ssn/construct.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ssn/simplex.hpp"

namespace ssn {

bool in_convex_hull(std::span<const double> point, const std::vector<Vec>& others) {
    if (others.empty()) return false;
    const int d = static_cast<int>(point.size());
    const int n = static_cast<int>(others.size());
    lp::LpProblem p = lp::LpProblem::minimize(Vec(n, 0.0));
    for (int k = 0; k < d; ++k) {
        Vec row(n);
        for (int l = 0; l < n; ++l) row[l] = others[l][k];
        p.add_row(std::move(row), lp::RowSense::eq, point[k]);
    }
    p.add_row(Vec(n, 1.0), lp::RowSense::eq, 1.0);
    return lp::solve(p).status == lp::Status::optimal;
}

std::vector<int> extreme_point_order(const Mat& features) {
    const int n = features.rows, d = features.cols;
    std::vector<int> remaining(n);
    for (int i = 0; i < n; ++i) remaining[i] = i;
    std::vector<int> order(n, -1);

    for (int k = n - 1; k >= 0; --k) {
        int picked = -1;
        if (remaining.size() == 1) {
            picked = 0;
        } else {
            for (size_t c = 0; c < remaining.size() && picked < 0; ++c) {
                std::vector<Vec> others;
                others.reserve(remaining.size() - 1);
                for (size_t o = 0; o < remaining.size(); ++o) {
                    if (o == c) continue;
                    others.emplace_back(features.row(remaining[o]), features.row(remaining[o]) + d);
                }
                const double* x = features.row(remaining[c]);
                if (!in_convex_hull({x, static_cast<size_t>(d)}, others))
                    picked = static_cast<int>(c);
            }
            if (picked < 0)
                throw std::runtime_error("extreme_point_order: no extreme point found (duplicate rows?)");
        }
        order[k] = remaining[picked];
        remaining.erase(remaining.begin() + picked);
    }
    return order;
}

Separator separating_direction(std::span<const double> point, const std::vector<Vec>& others,
                               const ParamDomain& domain) {
    const int d = static_cast<int>(point.size());
    if (domain.dim != d + 1)
        throw std::invalid_argument("separating_direction: domain dimension must be d+1");
    const bool ball = domain.kind == ParamDomain::Kind::unit_ball;
    const Vec lo = ball ? Vec(d + 1, -1.0) : domain.lo;
    const Vec hi = ball ? Vec(d + 1, 1.0) : domain.hi;

    // Variables: u_k = (a,b)_k - lo_k in [0, hi_k - lo_k], plus the margin.
    const int nu = d + 1;
    Vec obj(nu + 1, 0.0);
    obj[nu] = -1.0;  // maximize delta
    lp::LpProblem p = lp::LpProblem::minimize(std::move(obj));

    auto lifted = [d](std::span<const double> x) {
        Vec t(x.begin(), x.end());
        t.push_back(1.0);
        return t;
    };
    auto offset = [&](const Vec& t) {
        double s = 0.0;
        for (int k = 0; k <= d; ++k) s += lo[k] * t[k];
        return s;
    };

    for (const Vec& other : others) {
        const Vec t = lifted(other);
        Vec row(nu + 1);
        for (int k = 0; k <= d; ++k) row[k] = t[k];
        row[nu] = 1.0;
        p.add_row(std::move(row), lp::RowSense::le, -offset(t));
    }
    {
        const Vec t = lifted(point);
        Vec row(nu + 1);
        for (int k = 0; k <= d; ++k) row[k] = t[k];
        row[nu] = -1.0;
        p.add_row(std::move(row), lp::RowSense::ge, -offset(t));
    }
    for (int k = 0; k <= d; ++k) {
        Vec row(nu + 1, 0.0);
        row[k] = 1.0;
        p.add_row(std::move(row), lp::RowSense::le, hi[k] - lo[k]);
    }

    const lp::LpSolution sol = lp::solve(p);
    if (!sol.optimal() || -sol.value <= 1e-10)
        throw std::runtime_error("separating_direction: point not separable from the others");

    Separator s;
    s.direction.resize(d);
    for (int k = 0; k < d; ++k) s.direction[k] = lo[k] + sol.x[k];
    s.bias = lo[d] + sol.x[d];

    if (ball) {
        double r2 = s.bias * s.bias;
        for (double v : s.direction) r2 += v * v;
        const double r = std::sqrt(r2);
        if (r > 1.0) {
            for (double& v : s.direction) v /= r;
            s.bias /= r;
        }
    }
    // Recompute the realized margin after any scaling.
    double m = s.bias;
    for (int k = 0; k < d; ++k) m += s.direction[k] * point[k];
    for (const Vec& other : others) {
        double v = s.bias;
        for (int k = 0; k < d; ++k) v += s.direction[k] * other[k];
        m = std::min(m, -v);
    }
    s.margin = m;
    if (s.margin <= 1e-10)
        throw std::runtime_error("separating_direction: degenerate margin after scaling");
    return s;
}

ShallowParams exact_representation(const Dataset& data, const ParamDomain& domain,
                                   const Activation& act) {
    const int n = data.n(), d = data.dim();
    const std::vector<int> order = extreme_point_order(data.features);

    std::vector<Neuron> by_sample(n);
    std::vector<Vec> handled;
    for (int k = 0; k < n; ++k) {
        const int i = order[k];
        const double* x = data.features.row(i);
        const Separator sep = separating_direction({x, static_cast<size_t>(d)}, handled, domain);

        Neuron nrn;
        nrn.direction = sep.direction;
        nrn.bias = sep.bias;

        double partial = 0.0;
        for (int l = 0; l < k; ++l) {
            const Neuron& prev = by_sample[order[l]];
            double pre = prev.bias;
            for (int c = 0; c < d; ++c) pre += prev.direction[c] * x[c];
            partial += prev.weight * act(pre);
        }
        double own = nrn.bias;
        for (int c = 0; c < d; ++c) own += nrn.direction[c] * x[c];
        nrn.weight = (data.labels[i] - partial) / act(own);

        by_sample[i] = std::move(nrn);
        handled.emplace_back(x, x + d);
    }

    ShallowParams theta;
    theta.neurons = std::move(by_sample);
    return theta;
}

}  // namespace ssn
