#include "ssn/model.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace ssn {

bool activation_sign_ok(const Activation& act, int samples) {
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> mag(0.0, 100.0);
    if (act(0.0) != 0.0) return false;
    for (int i = 0; i < samples; ++i) {
        const double t = mag(rng) + 1e-9;
        if (act(-t) != 0.0) return false;
        if (!(act(t) > 0.0)) return false;
    }
    return true;
}

ParamDomain ParamDomain::hypercube(Vec lo, Vec hi) {
    if (lo.size() != hi.size() || lo.empty())
        throw std::invalid_argument("hypercube: lo/hi size mismatch");
    for (size_t k = 0; k < lo.size(); ++k) {
        if (!(lo[k] < 0.0 && 0.0 < hi[k]))
            throw std::invalid_argument("hypercube: origin must be interior (lo_k < 0 < hi_k)");
        if (!std::isfinite(lo[k]) || !std::isfinite(hi[k]))
            throw std::invalid_argument("hypercube: bounds must be finite");
    }
    ParamDomain d;
    d.kind = Kind::hypercube;
    d.dim = static_cast<int>(lo.size());
    d.lo = std::move(lo);
    d.hi = std::move(hi);
    return d;
}

ParamDomain ParamDomain::unit_ball(int dim) {
    if (dim <= 0) throw std::invalid_argument("unit_ball: dim must be positive");
    ParamDomain d;
    d.kind = Kind::unit_ball;
    d.dim = dim;
    return d;
}

bool ParamDomain::contains(std::span<const double> point, double slack) const {
    if (static_cast<int>(point.size()) != dim) return false;
    if (kind == Kind::hypercube) {
        for (int k = 0; k < dim; ++k)
            if (point[k] < lo[k] - slack || point[k] > hi[k] + slack) return false;
        return true;
    }
    double r2 = 0.0;
    for (double v : point) r2 += v * v;
    return std::sqrt(r2) <= 1.0 + slack;
}

Vec ParamDomain::project(std::span<const double> point) const {
    Vec p(point.begin(), point.end());
    if (kind == Kind::hypercube) {
        for (int k = 0; k < dim; ++k) p[k] = std::min(std::max(p[k], lo[k]), hi[k]);
        return p;
    }
    double r2 = 0.0;
    for (double v : p) r2 += v * v;
    const double r = std::sqrt(r2);
    if (r > 1.0)
        for (double& v : p) v /= r;
    return p;
}

ParamDomain ParamDomain::scaled(double k) const {
    if (!(k > 0.0)) throw std::invalid_argument("scaled: k must be positive");
    if (kind == Kind::unit_ball) {
        if (k == 1.0) return *this;
        throw std::invalid_argument("scaled: only hypercube domains support k != 1");
    }
    ParamDomain d = *this;
    for (int i = 0; i < dim; ++i) {
        d.lo[i] *= k;
        d.hi[i] *= k;
    }
    return d;
}

Dataset Dataset::create(Mat features, Vec labels) {
    if (features.rows != static_cast<int>(labels.size()))
        throw std::invalid_argument("dataset: feature/label count mismatch");
    if (features.rows == 0 || features.cols == 0)
        throw std::invalid_argument("dataset: empty");
    for (double v : features.data)
        if (!std::isfinite(v)) throw std::invalid_argument("dataset: non-finite feature");
    for (double v : labels)
        if (!std::isfinite(v)) throw std::invalid_argument("dataset: non-finite label");
    for (int i = 0; i < features.rows; ++i) {
        for (int j = i + 1; j < features.rows; ++j) {
            bool equal = true;
            for (int k = 0; k < features.cols && equal; ++k)
                equal = features(i, k) == features(j, k);
            if (equal)
                throw std::invalid_argument("dataset: features must be pairwise distinct (rows " +
                                            std::to_string(i) + ", " + std::to_string(j) + ")");
        }
    }
    Dataset d;
    d.features = std::move(features);
    d.labels = std::move(labels);
    return d;
}

double forward(const ShallowParams& theta, std::span<const double> x, const Activation& act) {
    double out = 0.0;
    for (const Neuron& nrn : theta.neurons) {
        if (nrn.direction.size() != x.size())
            throw std::invalid_argument("forward: neuron/input dimension mismatch");
        double pre = nrn.bias;
        for (size_t k = 0; k < x.size(); ++k) pre += nrn.direction[k] * x[k];
        out += nrn.weight * act(pre);
    }
    return out;
}

double l1_norm(const ShallowParams& theta) {
    double s = 0.0;
    for (const Neuron& nrn : theta.neurons) s += std::abs(nrn.weight);
    return s;
}

int active_count(const ShallowParams& theta) {
    int c = 0;
    for (const Neuron& nrn : theta.neurons)
        if (std::abs(nrn.weight) > kZeroWeightTol) ++c;
    return c;
}

double accuracy(const ShallowParams& theta, const Dataset& data, const Activation& act) {
    if (data.n() == 0) throw std::invalid_argument("accuracy: empty dataset");
    int hits = 0;
    for (int i = 0; i < data.n(); ++i) {
        const double pred = forward(theta, {data.features.row(i), static_cast<size_t>(data.dim())}, act);
        if (std::abs(pred - data.labels[i]) < 0.5) ++hits;
    }
    return static_cast<double>(hits) / data.n();
}

Residual residual_r(const ShallowParams& theta, const Dataset& train, double dkr_features,
                    const Activation& act) {
    if (dkr_features < 0.0) throw std::invalid_argument("residual_r: dkr_features must be >= 0");
    Residual r;
    for (int i = 0; i < train.n(); ++i) {
        const double pred = forward(theta, {train.features.row(i), static_cast<size_t>(train.dim())}, act);
        r.bias += std::abs(pred - train.labels[i]);
    }
    r.bias /= train.n();
    double sens = 0.0;
    for (const Neuron& nrn : theta.neurons) sens += std::abs(nrn.weight) * norm2(nrn.direction);
    r.deviation = dkr_features * act.lipschitz * sens;
    r.total = r.bias + r.deviation;
    return r;
}

bool params_in_domain(const ShallowParams& theta, const ParamDomain& domain, double slack) {
    for (const Neuron& nrn : theta.neurons) {
        Vec p = nrn.direction;
        p.push_back(nrn.bias);
        if (!domain.contains(p, slack)) return false;
    }
    return true;
}

}  // namespace ssn
