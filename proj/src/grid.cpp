#include "ssn/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "ssn/parallel.hpp"

namespace ssn {

namespace {

GridPoints cube_lattice(const Vec& lo, const Vec& hi, double step, long max_points) {
    const int q = static_cast<int>(lo.size());
    std::vector<long> counts(q);
    Vec eff(q);
    double total_d = 1.0;
    for (int k = 0; k < q; ++k) {
        const double side = hi[k] - lo[k];
        if (step > side + 1e-15)
            throw std::invalid_argument("uniform_grid: step exceeds side length " + std::to_string(side));
        counts[k] = static_cast<long>(std::ceil(side / step - 1e-12));
        eff[k] = side / static_cast<double>(counts[k]);
        total_d *= static_cast<double>(counts[k]);
    }
    if (total_d > static_cast<double>(max_points)) {
        std::ostringstream os;
        os << "uniform_grid: M = " << std::llround(total_d) << " lattice points exceed the cap of "
           << max_points;
        throw std::runtime_error(os.str());
    }
    const long total = static_cast<long>(total_d);

    GridPoints g;
    g.points.reserve(static_cast<size_t>(total));
    std::vector<long> idx(q, 0);
    for (long p = 0; p < total; ++p) {
        Vec pt(q);
        for (int k = 0; k < q; ++k) pt[k] = lo[k] + eff[k] * (idx[k] + 0.5);
        g.points.push_back(std::move(pt));
        for (int k = q - 1; k >= 0; --k) {
            if (++idx[k] < counts[k]) break;
            idx[k] = 0;
        }
    }
    double diag2 = 0.0;
    for (int k = 0; k < q; ++k) diag2 += eff[k] * eff[k];
    g.hausdorff_bound = 0.5 * std::sqrt(diag2);
    return g;
}

}  // namespace

GridPoints uniform_grid(const ParamDomain& domain, double step, long max_points) {
    if (!(step > 0.0)) throw std::invalid_argument("uniform_grid: step must be positive");
    if (domain.kind == ParamDomain::Kind::hypercube)
        return cube_lattice(domain.lo, domain.hi, step, max_points);

    // Unit ball: lattice of the enclosing cube, keep the in-ball centers.
    const Vec lo(domain.dim, -1.0), hi(domain.dim, 1.0);
    GridPoints cube = cube_lattice(lo, hi, step, max_points);
    GridPoints g;
    for (Vec& p : cube.points) {
        double r2 = 0.0;
        for (double v : p) r2 += v * v;
        if (r2 <= 1.0) g.points.push_back(std::move(p));
    }
    // A ball point may sit in a cell whose center was rejected; stepping
    // inward by one cell radius always reaches a kept center, so doubling the
    // cube bound covers the worst case.
    g.hausdorff_bound = 2.0 * cube.hausdorff_bound;
    if (g.points.empty())
        throw std::invalid_argument("uniform_grid: step too coarse, no lattice point inside the ball");
    return g;
}

Mat design_matrix_serial(const std::vector<Vec>& points, const Dataset& data, const Activation& act) {
    const int n = data.n(), m = static_cast<int>(points.size()), d = data.dim();
    Mat a(n, m);
    for (int j = 0; j < m; ++j) {
        const Vec& p = points[j];
        if (static_cast<int>(p.size()) != d + 1)
            throw std::invalid_argument("design_matrix: point dimension must be d+1");
        for (int i = 0; i < n; ++i) {
            const double* x = data.features.row(i);
            double pre = p[d];
            for (int k = 0; k < d; ++k) pre += p[k] * x[k];
            a(i, j) = act(pre);
        }
    }
    return a;
}

Mat design_matrix(const std::vector<Vec>& points, const Dataset& data, const Activation& act) {
    const int n = data.n(), m = static_cast<int>(points.size()), d = data.dim();
    for (const Vec& p : points)
        if (static_cast<int>(p.size()) != d + 1)
            throw std::invalid_argument("design_matrix: point dimension must be d+1");
    Mat a(n, m);
#pragma omp parallel for schedule(static) num_threads(max_threads())
    for (int j = 0; j < m; ++j) {
        const Vec& p = points[j];
        for (int i = 0; i < n; ++i) {
            const double* x = data.features.row(i);
            double pre = p[d];
            for (int k = 0; k < d; ++k) pre += p[k] * x[k];
            a(i, j) = act(pre);
        }
    }
    return a;
}

ParamGrid ParamGrid::build(std::vector<Vec> points, double hausdorff_bound, ParamDomain domain,
                           const Dataset& data, const Activation& act) {
    if (points.empty()) throw std::invalid_argument("grid: no points");
    for (const Vec& p : points)
        if (!domain.contains(p))
            throw std::invalid_argument("grid: point outside the parameter domain");
    std::vector<const Vec*> sorted;
    sorted.reserve(points.size());
    for (const Vec& p : points) sorted.push_back(&p);
    std::sort(sorted.begin(), sorted.end(), [](const Vec* a, const Vec* b) { return *a < *b; });
    for (size_t i = 1; i < sorted.size(); ++i)
        if (*sorted[i - 1] == *sorted[i])
            throw std::invalid_argument("grid: duplicate points");

    ParamGrid g;
    g.design = design_matrix(points, data, act);
    g.points = std::move(points);
    g.hausdorff_bound = hausdorff_bound;
    g.domain = std::move(domain);
    return g;
}

ParamDomain bounding_domain(const ShallowParams& theta, double margin) {
    if (theta.empty()) throw std::invalid_argument("bounding_domain: empty parameter list");
    if (margin < 0.0) throw std::invalid_argument("bounding_domain: negative margin");
    const int q = static_cast<int>(theta.neurons.front().direction.size()) + 1;
    Vec lo(q, std::numeric_limits<double>::infinity());
    Vec hi(q, -std::numeric_limits<double>::infinity());
    for (const Neuron& nrn : theta.neurons) {
        for (int k = 0; k + 1 < q; ++k) {
            lo[k] = std::min(lo[k], nrn.direction[k]);
            hi[k] = std::max(hi[k], nrn.direction[k]);
        }
        lo[q - 1] = std::min(lo[q - 1], nrn.bias);
        hi[q - 1] = std::max(hi[q - 1], nrn.bias);
    }
    const double delta = std::max(1e-3, margin);
    for (int k = 0; k < q; ++k) {
        lo[k] -= margin;
        hi[k] += margin;
        if (lo[k] > -delta) lo[k] = -delta;
        if (hi[k] < delta) hi[k] = delta;
    }
    return ParamDomain::hypercube(std::move(lo), std::move(hi));
}

double dataset_min_lift(const Dataset& data) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < data.n(); ++i) {
        double r2 = 1.0;
        const double* x = data.features.row(i);
        for (int k = 0; k < data.dim(); ++k) r2 += x[k] * x[k];
        best = std::min(best, std::sqrt(r2));
    }
    return best;
}

}  // namespace ssn
