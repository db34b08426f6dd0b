#include "ssn/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "ssn/parallel.hpp"
#include "ssn/simplex.hpp"

namespace ssn {

EmpiricalMeasure EmpiricalMeasure::create(std::vector<Vec> atoms, Vec weights) {
    if (atoms.empty() || atoms.size() != weights.size())
        throw std::invalid_argument("measure: atom/weight count mismatch");
    const size_t q = atoms.front().size();
    double sum = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw std::invalid_argument("measure: negative weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("measure: weights must sum to 1");
    for (const Vec& a : atoms) {
        if (a.size() != q) throw std::invalid_argument("measure: mixed atom dimensions");
        for (double v : a)
            if (!std::isfinite(v)) throw std::invalid_argument("measure: non-finite atom");
    }
    EmpiricalMeasure m;
    m.atoms = std::move(atoms);
    m.weights = std::move(weights);
    return m;
}

EmpiricalMeasure EmpiricalMeasure::uniform(std::vector<Vec> atoms) {
    const size_t n = atoms.size();
    return create(std::move(atoms), Vec(n, 1.0 / static_cast<double>(n)));
}

Mat pairwise_cost_serial(const std::vector<Vec>& a, const std::vector<Vec>& b) {
    Mat c(static_cast<int>(a.size()), static_cast<int>(b.size()));
    for (int i = 0; i < c.rows; ++i)
        for (int j = 0; j < c.cols; ++j) {
            double s = 0.0;
            for (size_t k = 0; k < a[i].size(); ++k) {
                const double d = a[i][k] - b[j][k];
                s += d * d;
            }
            c(i, j) = std::sqrt(s);
        }
    return c;
}

Mat pairwise_cost(const std::vector<Vec>& a, const std::vector<Vec>& b) {
    Mat c(static_cast<int>(a.size()), static_cast<int>(b.size()));
#pragma omp parallel for schedule(static) num_threads(max_threads())
    for (int i = 0; i < c.rows; ++i)
        for (int j = 0; j < c.cols; ++j) {
            double s = 0.0;
            for (size_t k = 0; k < a[i].size(); ++k) {
                const double d = a[i][k] - b[j][k];
                s += d * d;
            }
            c(i, j) = std::sqrt(s);
        }
    return c;
}

double kr_distance(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
    if (mu.dim() != nu.dim()) throw std::invalid_argument("kr_distance: dimension mismatch");
    const int n1 = mu.size(), n2 = nu.size();
    const Mat cost = pairwise_cost(mu.atoms, nu.atoms);

    Vec obj(static_cast<size_t>(n1) * n2);
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j) obj[static_cast<size_t>(i) * n2 + j] = cost(i, j);
    lp::LpProblem p = lp::LpProblem::minimize(std::move(obj));
    for (int i = 0; i < n1; ++i) {
        Vec row(static_cast<size_t>(n1) * n2, 0.0);
        for (int j = 0; j < n2; ++j) row[static_cast<size_t>(i) * n2 + j] = 1.0;
        p.add_row(std::move(row), lp::RowSense::eq, mu.weights[i]);
    }
    // The marginal constraints are rank-deficient by one; drop the last.
    for (int j = 0; j + 1 < n2; ++j) {
        Vec row(static_cast<size_t>(n1) * n2, 0.0);
        for (int i = 0; i < n1; ++i) row[static_cast<size_t>(i) * n2 + j] = 1.0;
        p.add_row(std::move(row), lp::RowSense::eq, nu.weights[j]);
    }
    const lp::LpSolution sol = lp::solve(p);
    if (!sol.optimal()) throw std::runtime_error("kr_distance: transport LP did not solve");
    return std::max(sol.value, 0.0);
}

namespace {

/// Minimum-cost perfect matching on a square cost matrix (Jonker-Volgenant
/// style shortest augmenting paths). Returns the column assigned to each row.
std::vector<int> min_cost_matching(const Mat& cost, double& total) {
    const int n = cost.rows;
    const double inf = std::numeric_limits<double>::infinity();
    Vec u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        Vec minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            int j1 = 0;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> row_to_col(n, -1);
    total = 0.0;
    for (int j = 1; j <= n; ++j)
        if (p[j]) {
            row_to_col[p[j] - 1] = j - 1;
            total += cost(p[j] - 1, j - 1);
        }
    return row_to_col;
}

/// Kuhn's augmenting-path matching restricted to edges with cost <= cap.
bool perfect_matching_under(const Mat& cost, double cap) {
    const int n = cost.rows;
    std::vector<int> match_col(n, -1);
    std::vector<char> visited(n);
    // Recursive lambda over columns.
    auto try_row = [&](auto&& self, int i) -> bool {
        for (int j = 0; j < n; ++j) {
            if (visited[j] || cost(i, j) > cap) continue;
            visited[j] = 1;
            if (match_col[j] < 0 || self(self, match_col[j])) {
                match_col[j] = i;
                return true;
            }
        }
        return false;
    };
    for (int i = 0; i < n; ++i) {
        std::fill(visited.begin(), visited.end(), 0);
        if (!try_row(try_row, i)) return false;
    }
    return true;
}

void require_uniform_equal(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
    if (mu.dim() != nu.dim()) throw std::invalid_argument("wasserstein_p: dimension mismatch");
    if (mu.size() != nu.size())
        throw std::invalid_argument("wasserstein_p: defined for equal-size measures only");
    const double w = 1.0 / mu.size();
    for (double x : mu.weights)
        if (std::abs(x - w) > 1e-12)
            throw std::invalid_argument("wasserstein_p: measures must be uniform");
    for (double x : nu.weights)
        if (std::abs(x - w) > 1e-12)
            throw std::invalid_argument("wasserstein_p: measures must be uniform");
}

}  // namespace

double wasserstein_p(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double p) {
    require_uniform_equal(mu, nu);
    if (!(p >= 1.0)) throw std::invalid_argument("wasserstein_p: p must be >= 1 (or infinity)");
    const int n = mu.size();
    const Mat dist = pairwise_cost(mu.atoms, nu.atoms);

    if (std::isinf(p)) {
        Vec levels(dist.data);
        std::sort(levels.begin(), levels.end());
        levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
        int lo = 0, hi = static_cast<int>(levels.size()) - 1;
        if (perfect_matching_under(dist, levels[lo])) return levels[lo];
        while (lo + 1 < hi) {
            const int mid = (lo + hi) / 2;
            if (perfect_matching_under(dist, levels[mid]))
                hi = mid;
            else
                lo = mid;
        }
        return perfect_matching_under(dist, levels[lo]) ? levels[lo] : levels[hi];
    }

    Mat powered(n, n);
    for (size_t k = 0; k < dist.data.size(); ++k) powered.data[k] = std::pow(dist.data[k], p);
    double total = 0.0;
    min_cost_matching(powered, total);
    return std::pow(total / n, 1.0 / p);
}

namespace {

EmpiricalMeasure joint_measure(const Dataset& d) {
    std::vector<Vec> atoms;
    atoms.reserve(d.n());
    for (int i = 0; i < d.n(); ++i) {
        Vec a(d.features.row(i), d.features.row(i) + d.dim());
        a.push_back(d.labels[i]);
        atoms.push_back(std::move(a));
    }
    return EmpiricalMeasure::uniform(std::move(atoms));
}

EmpiricalMeasure feature_measure(const Dataset& d) {
    std::vector<Vec> atoms;
    atoms.reserve(d.n());
    for (int i = 0; i < d.n(); ++i)
        atoms.emplace_back(d.features.row(i), d.features.row(i) + d.dim());
    return EmpiricalMeasure::uniform(std::move(atoms));
}

EmpiricalMeasure prediction_measure(const Dataset& d, const ShallowParams& theta,
                                    const Activation& act) {
    std::vector<Vec> atoms;
    atoms.reserve(d.n());
    for (int i = 0; i < d.n(); ++i) {
        Vec a(d.features.row(i), d.features.row(i) + d.dim());
        a.push_back(forward(theta, {d.features.row(i), static_cast<size_t>(d.dim())}, act));
        atoms.push_back(std::move(a));
    }
    return EmpiricalMeasure::uniform(std::move(atoms));
}

double kr_auto(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, int lp_size_limit) {
    const bool small = mu.size() <= lp_size_limit && nu.size() <= lp_size_limit;
    if (!small && mu.size() == nu.size()) return wasserstein_p(mu, nu, 1.0);
    return kr_distance(mu, nu);
}

}  // namespace

GeneralizationReport generalization_report(const ShallowParams& theta, const Dataset& train,
                                           const Dataset& test, const Activation& act,
                                           int lp_size_limit) {
    if (train.dim() != test.dim())
        throw std::invalid_argument("generalization_report: dimension mismatch");
    GeneralizationReport r;
    r.lhs = kr_auto(joint_measure(test), prediction_measure(test, theta, act), lp_size_limit);
    r.train_test = kr_auto(joint_measure(train), joint_measure(test), lp_size_limit);
    r.features = kr_auto(feature_measure(train), feature_measure(test), lp_size_limit);
    r.residual = residual_r(theta, train, r.features, act);
    r.rhs = r.train_test + r.features + r.residual.total;
    r.margin = r.rhs - r.lhs;
    return r;
}

std::string GeneralizationReport::to_text() const {
    std::ostringstream os;
    os.precision(10);
    os << "d_kr(test, pred)      = " << lhs << "\n"
       << "d_kr(train, test)     = " << train_test << "\n"
       << "d_kr(features)        = " << features << "\n"
       << "training bias         = " << residual.bias << "\n"
       << "deviation term        = " << residual.deviation << "\n"
       << "bound (rhs)           = " << rhs << "\n"
       << "margin (rhs - lhs)    = " << margin << (holds() ? "  [holds]" : "  [VIOLATED]") << "\n";
    return os.str();
}

MeanLpReport mean_lp_report(const ShallowParams& theta, const Dataset& train, const Dataset& test,
                            double p, const Activation& act) {
    if (train.n() != test.n())
        throw std::invalid_argument("mean_lp_report: requires N' = N");
    MeanLpReport r;
    r.p = p;
    r.wp = wasserstein_p(joint_measure(train), joint_measure(test), p);

    double sens = 0.0;
    for (const Neuron& nrn : theta.neurons) sens += std::abs(nrn.weight) * norm2(nrn.direction);
    r.deviation = r.wp * act.lipschitz * sens;

    const int n = train.n();
    if (std::isinf(p)) {
        for (int i = 0; i < n; ++i) {
            r.lhs = std::max(r.lhs, std::abs(test.labels[i] -
                                             forward(theta, {test.features.row(i),
                                                             static_cast<size_t>(test.dim())}, act)));
            r.train_term = std::max(
                r.train_term, std::abs(forward(theta, {train.features.row(i),
                                                       static_cast<size_t>(train.dim())}, act) -
                                       train.labels[i]));
        }
    } else {
        double lhs_sum = 0.0, train_sum = 0.0;
        for (int i = 0; i < n; ++i) {
            lhs_sum += std::pow(std::abs(test.labels[i] -
                                         forward(theta, {test.features.row(i),
                                                         static_cast<size_t>(test.dim())}, act)),
                                p);
            train_sum += std::pow(std::abs(forward(theta, {train.features.row(i),
                                                           static_cast<size_t>(train.dim())}, act) -
                                           train.labels[i]),
                                  p);
        }
        r.lhs = std::pow(lhs_sum / n, 1.0 / p);
        r.train_term = std::pow(train_sum / n, 1.0 / p);
    }
    r.rhs = r.wp + r.train_term + r.deviation;
    r.margin = r.rhs - r.lhs;
    return r;
}

}  // namespace ssn
