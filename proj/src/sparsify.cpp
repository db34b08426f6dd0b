#include "ssn/sparsify.hpp"

#include <cmath>
#include <stdexcept>

namespace ssn {

ShallowParams filter_zero_weights(const ShallowParams& theta) {
    ShallowParams out;
    for (const Neuron& nrn : theta.neurons)
        if (std::abs(nrn.weight) > kZeroWeightTol) out.neurons.push_back(nrn);
    return out;
}

std::optional<Vec> null_vector(const Mat& b) {
    const double tol = 1e-10 * max_abs(b) * std::max(b.rows, b.cols);
    std::vector<Vec> basis = null_space_basis(b, std::max(tol, 1e-300));
    if (basis.empty()) return std::nullopt;
    Vec v = std::move(basis.front());
    const double scale = norm_inf(v);
    for (double& x : v) x /= scale;
    return v;
}

namespace {

constexpr double kTieTol = 1e-12;

Mat active_design(const ShallowParams& theta, const Mat& features, const Activation& act) {
    const int n = features.rows, p = theta.size(), d = features.cols;
    Mat a(n, p);
    for (int j = 0; j < p; ++j) {
        const Neuron& nrn = theta.neurons[j];
        if (static_cast<int>(nrn.direction.size()) != d)
            throw std::invalid_argument("sparsify: neuron/feature dimension mismatch");
        for (int i = 0; i < n; ++i) {
            const double* x = features.row(i);
            double pre = nrn.bias;
            for (int k = 0; k < d; ++k) pre += nrn.direction[k] * x[k];
            a(i, j) = act(pre);
        }
    }
    return a;
}

void normalize_inf(Vec& v) {
    const double s = norm_inf(v);
    for (double& x : v) x /= s;
}

// l1 slope of t -> ||omega + t w||_1 at t = 0 (no zero weights present).
double l1_slope(const Vec& w, const Vec& omega) {
    double s = 0.0;
    for (size_t j = 0; j < w.size(); ++j) s += w[j] * (omega[j] > 0.0 ? 1.0 : -1.0);
    return s;
}

}  // namespace

ShallowParams sparsify(const ShallowParams& theta, const Mat& features, const Activation& act,
                       SparsifyTrace* trace) {
    ShallowParams cur = filter_zero_weights(theta);
    const int p0 = cur.size();
    SparsifyTrace local;
    SparsifyTrace& tr = trace ? *trace : local;
    tr = SparsifyTrace{};

    Vec outputs0;  // training outputs of the filtered input, the loop invariant
    {
        const Mat a0 = active_design(cur, features, act);
        Vec w0(cur.size());
        for (int j = 0; j < cur.size(); ++j) w0[j] = cur.neurons[j].weight;
        outputs0 = matvec(a0, w0);
    }

    for (int k = 0;; ++k) {
        if (k > p0 + 1)  // structurally unreachable, kept as a tripwire
            throw std::runtime_error("sparsify: exceeded the iteration budget");
        ++tr.iterations;
        tr.l1.push_back(l1_norm(cur));
        tr.active.push_back(cur.size());
        if (cur.empty()) return cur;

        const Mat a = active_design(cur, features, act);
        {
            Vec w(cur.size());
            for (int j = 0; j < cur.size(); ++j) w[j] = cur.neurons[j].weight;
            const Vec out = matvec(a, w);
            double drift = 0.0;
            for (size_t i = 0; i < out.size(); ++i)
                drift = std::max(drift, std::abs(out[i] - outputs0[i]));
            tr.output_drift.push_back(drift);
        }

        const double rank_tol = 1e-10 * max_abs(a) * std::max(a.rows, a.cols);
        std::vector<Vec> basis = null_space_basis(a, std::max(rank_tol, 1e-300));
        if (basis.empty()) return cur;  // full column rank
        const int null_dim = static_cast<int>(basis.size());

        const int p = cur.size();
        Vec omega(p);
        for (int j = 0; j < p; ++j) omega[j] = cur.neurons[j].weight;
        const double tie = kTieTol * (1.0 + norm1(omega));

        // The algorithm admits any null vector; pick one whose step retires a
        // neuron. A direction with vanishing l1 slope ties the two update
        // candidates, and ties go to the zeroing one; when every basis vector
        // has a nonzero slope and the null space has dimension >= 2, a
        // two-vector combination cancels the slope exactly.
        Vec dir;
        for (Vec& v : basis) {
            normalize_inf(v);
            if (std::abs(l1_slope(v, omega)) <= tie) {
                dir = v;
                break;
            }
        }
        if (dir.empty() && null_dim >= 2) {
            const double s1 = l1_slope(basis[0], omega);
            const double s2 = l1_slope(basis[1], omega);
            dir.assign(omega.size(), 0.0);
            for (int j = 0; j < p; ++j) dir[j] = s2 * basis[0][j] - s1 * basis[1][j];
            normalize_inf(dir);
        }
        if (dir.empty()) dir = basis[0];

        Vec alpha(p);
        for (int j = 0; j < p; ++j) alpha[j] = dir[j] / omega[j];
        int jstar = 0;
        for (int j = 1; j < p; ++j)
            if (std::abs(alpha[j]) > std::abs(alpha[jstar])) jstar = j;

        auto candidate_l1 = [&](double beta, double sign) {
            double s = 0.0;
            for (int j = 0; j < p; ++j) s += std::abs((1.0 + sign * beta * alpha[j]) * omega[j]);
            return s;
        };

        double beta = -1.0 / alpha[jstar];
        bool forced = false;
        if (candidate_l1(beta, 1.0) > candidate_l1(beta, -1.0) + tie && p0 - k <= null_dim) {
            // Budget guard: the mirror step would spend an iteration without
            // retiring a neuron; retire the nearest breakpoint on the descent
            // side instead.
            const double slope = l1_slope(dir, omega);
            int best = -1;
            for (int j = 0; j < p; ++j) {
                const double t = -omega[j] / dir[j];  // step zeroing coordinate j
                if (t * slope > 0.0) continue;        // uphill breakpoint
                if (best < 0 || std::abs(alpha[j]) > std::abs(alpha[best])) best = j;
            }
            if (best >= 0) {
                forced = true;
                jstar = best;
                beta = -1.0 / alpha[jstar];
                ++tr.forced_steps;
            }
        }

        const double l1_hat = candidate_l1(beta, 1.0);
        const double l1_bar = candidate_l1(beta, -1.0);
        const bool take_hat = l1_hat <= l1_bar + tie;
        const double sgn = take_hat ? 1.0 : -1.0;
        for (int j = 0; j < p; ++j) {
            if (!forced)
                tr.min_combination =
                    std::min(tr.min_combination,
                             std::min(1.0 + beta * alpha[j], 1.0 - beta * alpha[j]));
            cur.neurons[j].weight = (1.0 + sgn * beta * alpha[j]) * omega[j];
        }
        if (take_hat) cur.neurons[jstar].weight = 0.0;  // exact retirement
        cur = filter_zero_weights(cur);
    }
}

}  // namespace ssn
