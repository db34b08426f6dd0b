#include "ssn/sgdtrain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "ssn/parallel.hpp"

namespace ssn {

namespace {

constexpr int kBlock = 32;

double loss(Fidelity f, double z) { return f == Fidelity::square ? z * z : std::abs(z); }

double loss_grad(Fidelity f, double z) {
    if (f == Fidelity::square) return 2.0 * z;
    return z > 0.0 ? 1.0 : (z < 0.0 ? -1.0 : 0.0);  // subgradient 0 at the kink
}

void block_gradient(const Dataset& data, std::span<const int> idx, const ShallowParams& theta,
                    Fidelity fid, const Activation& act, size_t begin, size_t end, Vec& out) {
    const int p = theta.size(), d = data.dim();
    std::fill(out.begin(), out.end(), 0.0);
    for (size_t s = begin; s < end; ++s) {
        const int i = idx[s];
        const double* x = data.features.row(i);
        double pred = 0.0;
        for (int j = 0; j < p; ++j) {
            const Neuron& nrn = theta.neurons[j];
            double pre = nrn.bias;
            for (int k = 0; k < d; ++k) pre += nrn.direction[k] * x[k];
            pred += nrn.weight * act(pre);
        }
        const double lg = loss_grad(fid, pred - data.labels[i]);
        if (lg == 0.0) continue;
        for (int j = 0; j < p; ++j) {
            const Neuron& nrn = theta.neurons[j];
            double pre = nrn.bias;
            for (int k = 0; k < d; ++k) pre += nrn.direction[k] * x[k];
            out[j] += lg * act(pre);
            const double dz = lg * nrn.weight * act.derivative(pre);
            if (dz != 0.0) {
                double* ga = out.data() + p + static_cast<size_t>(j) * d;
                for (int k = 0; k < d; ++k) ga[k] += dz * x[k];
                out[p + static_cast<size_t>(p) * d + j] += dz;
            }
        }
    }
}

void blocked_accumulate(const Dataset& data, std::span<const int> idx, const ShallowParams& theta,
                        Fidelity fid, const Activation& act, Vec& grad, bool parallel) {
    const int p = theta.size(), d = data.dim();
    const size_t params = static_cast<size_t>(p) * (d + 2);
    grad.assign(params, 0.0);
    if (idx.empty()) return;
    const size_t nblocks = (idx.size() + kBlock - 1) / kBlock;
    std::vector<Vec> partial(nblocks, Vec(params, 0.0));
    if (parallel) {
#pragma omp parallel for schedule(static) num_threads(max_threads())
        for (long b = 0; b < static_cast<long>(nblocks); ++b)
            block_gradient(data, idx, theta, fid, act, b * kBlock,
                           std::min(idx.size(), static_cast<size_t>(b + 1) * kBlock), partial[b]);
    } else {
        for (size_t b = 0; b < nblocks; ++b)
            block_gradient(data, idx, theta, fid, act, b * kBlock,
                           std::min(idx.size(), (b + 1) * kBlock), partial[b]);
    }
    // Fixed reduction order: block 0, 1, 2, ...
    for (size_t b = 0; b < nblocks; ++b)
        for (size_t k = 0; k < params; ++k) grad[k] += partial[b][k];
    const double inv = 1.0 / static_cast<double>(idx.size());
    for (double& g : grad) g *= inv;
}

}  // namespace

void fidelity_gradient(const Dataset& data, std::span<const int> idx, const ShallowParams& theta,
                       Fidelity fid, const Activation& act, Vec& grad) {
    blocked_accumulate(data, idx, theta, fid, act, grad, true);
}

void fidelity_gradient_serial(const Dataset& data, std::span<const int> idx,
                              const ShallowParams& theta, Fidelity fid, const Activation& act,
                              Vec& grad) {
    blocked_accumulate(data, idx, theta, fid, act, grad, false);
}

double objective_value(const Dataset& data, const ShallowParams& theta, const TrainConfig& cfg,
                       const Activation& act, double* fidelity_out, double* l1_out) {
    double fid = 0.0;
    for (int i = 0; i < data.n(); ++i) {
        const double pred = forward(theta, {data.features.row(i), static_cast<size_t>(data.dim())}, act);
        fid += loss(cfg.fidelity, pred - data.labels[i]);
    }
    fid /= data.n();
    const double l1 = l1_norm(theta);
    if (fidelity_out) *fidelity_out = fid;
    if (l1_out) *l1_out = l1;
    return cfg.lambda == 0.0 ? fid : l1 + cfg.lambda * fid;
}

TrainResult train(const Dataset& data, const TrainConfig& cfg, const Activation& act) {
    if (cfg.epochs < 1 || !(cfg.learning_rate > 0.0) || cfg.batch_size < 1)
        throw std::invalid_argument("train: invalid config");
    const int p = cfg.neuron_count > 0 ? cfg.neuron_count : 2 * data.n();
    const int d = data.dim();

    std::mt19937_64 rng(cfg.seed);
    ShallowParams theta;
    theta.neurons.resize(p);
    {
        std::uniform_real_distribution<double> uw(-1.0 / p, 1.0 / p);
        for (Neuron& nrn : theta.neurons) {
            nrn.weight = uw(rng);
            nrn.direction.resize(d);
            if (cfg.domain && cfg.domain->kind == ParamDomain::Kind::hypercube) {
                for (int k = 0; k < d; ++k) {
                    std::uniform_real_distribution<double> u(cfg.domain->lo[k], cfg.domain->hi[k]);
                    nrn.direction[k] = u(rng);
                }
                std::uniform_real_distribution<double> u(cfg.domain->lo[d], cfg.domain->hi[d]);
                nrn.bias = u(rng);
            } else if (cfg.domain && cfg.domain->kind == ParamDomain::Kind::unit_ball) {
                std::uniform_real_distribution<double> u(-1.0, 1.0);
                for (;;) {
                    double r2 = 0.0;
                    for (int k = 0; k < d; ++k) {
                        nrn.direction[k] = u(rng);
                        r2 += nrn.direction[k] * nrn.direction[k];
                    }
                    nrn.bias = u(rng);
                    r2 += nrn.bias * nrn.bias;
                    if (r2 <= 1.0) break;
                }
            } else {
                std::uniform_real_distribution<double> u(-1.0, 1.0);
                for (int k = 0; k < d; ++k) nrn.direction[k] = u(rng);
                nrn.bias = u(rng);
            }
        }
    }

    TrainResult result;
    double fid0 = 0.0, l10 = 0.0;
    const double initial = objective_value(data, theta, cfg, act, &fid0, &l10);
    result.log.push_back({0, initial, fid0, l10});
    const double divergence_cap = 1e6 * (initial + 1e-12);

    const size_t params = static_cast<size_t>(p) * (d + 2);
    Vec grad(params, 0.0);
    Vec adam_m, adam_v;
    if (cfg.adam) {
        adam_m.assign(params, 0.0);
        adam_v.assign(params, 0.0);
    }
    long adam_t = 0;

    std::vector<int> perm(data.n());
    std::iota(perm.begin(), perm.end(), 0);

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        std::shuffle(perm.begin(), perm.end(), rng);
        for (size_t at = 0; at < perm.size(); at += cfg.batch_size) {
            const size_t take = std::min(perm.size() - at, static_cast<size_t>(cfg.batch_size));
            fidelity_gradient(data, {perm.data() + at, take}, theta, cfg.fidelity, act, grad);

            ++adam_t;
            const double fid_scale = cfg.lambda == 0.0 ? 1.0 : cfg.lambda;
            auto step = [&](size_t gi, double extra) {
                double g = fid_scale * grad[gi] + extra;
                if (cfg.adam) {
                    adam_m[gi] = 0.9 * adam_m[gi] + 0.1 * g;
                    adam_v[gi] = 0.999 * adam_v[gi] + 0.001 * g * g;
                    const double mh = adam_m[gi] / (1.0 - std::pow(0.9, adam_t));
                    const double vh = adam_v[gi] / (1.0 - std::pow(0.999, adam_t));
                    g = mh / (std::sqrt(vh) + 1e-8);
                }
                return cfg.learning_rate * g;
            };

            for (int j = 0; j < p; ++j) {
                Neuron& nrn = theta.neurons[j];
                const double sign_w =
                    cfg.lambda == 0.0 ? 0.0 : (nrn.weight > 0.0 ? 1.0 : (nrn.weight < 0.0 ? -1.0 : 0.0));
                nrn.weight -= step(j, sign_w);
                for (int k = 0; k < d; ++k)
                    nrn.direction[k] -= step(p + static_cast<size_t>(j) * d + k, 0.0);
                nrn.bias -= step(p + static_cast<size_t>(p) * d + j, 0.0);
                if (cfg.clip_to_domain && cfg.domain) {
                    Vec pt = nrn.direction;
                    pt.push_back(nrn.bias);
                    pt = cfg.domain->project(pt);
                    for (int k = 0; k < d; ++k) nrn.direction[k] = pt[k];
                    nrn.bias = pt[d];
                }
            }
        }
        double fid = 0.0, l1 = 0.0;
        const double obj = objective_value(data, theta, cfg, act, &fid, &l1);
        result.log.push_back({epoch, obj, fid, l1});
        if (obj > divergence_cap)
            throw std::runtime_error("train: diverged at epoch " + std::to_string(epoch) +
                                     " (objective " + std::to_string(obj) + " vs initial " +
                                     std::to_string(initial) + "); reduce the learning rate");
    }
    result.theta = std::move(theta);
    return result;
}

}  // namespace ssn
