#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ssn/model.hpp"

namespace ssn {

enum class Fidelity { abs, square };

/// Minibatch (sub)gradient descent configuration for the overparameterized
/// regression objective  sum_j |w_j| + (lambda/N) sum_i loss(f(x_i) - y_i).
/// lambda == 0 drops the l1 term and trains pure fidelity (the pretraining
/// mode). neuron_count == 0 defaults to 2N.
struct TrainConfig {
    int neuron_count = 0;
    double lambda = 0.0;
    Fidelity fidelity = Fidelity::square;
    int epochs = 1;
    double learning_rate = 1e-3;
    int batch_size = 32;
    uint64_t seed = 0;
    std::optional<ParamDomain> domain;  // initialization box; no projection unless clip
    bool clip_to_domain = false;
    bool adam = false;  // Adam(0.9, 0.999) instead of plain SGD
};

struct EpochRecord {
    int epoch = 0;
    double objective = 0.0;
    double fidelity = 0.0;
    double l1 = 0.0;
};

struct TrainResult {
    ShallowParams theta;
    std::vector<EpochRecord> log;  // entry 0 is the initial iterate
};

/// Mean fidelity-part subgradient over the given sample indices, written into
/// `grad` with layout [d/dw (P) | d/da (P*d, row-major) | d/db (P)].
/// Accumulation runs over fixed 32-sample blocks reduced in block order, so
/// the result is bitwise independent of the thread count.
void fidelity_gradient(const Dataset& data, std::span<const int> idx, const ShallowParams& theta,
                       Fidelity fid, const Activation& act, Vec& grad);
/// Serial reference of the same blocked accumulation.
void fidelity_gradient_serial(const Dataset& data, std::span<const int> idx,
                              const ShallowParams& theta, Fidelity fid, const Activation& act,
                              Vec& grad);

/// Full objective for the config (lambda == 0: mean fidelity only).
double objective_value(const Dataset& data, const ShallowParams& theta, const TrainConfig& cfg,
                       const Activation& act, double* fidelity_out = nullptr, double* l1_out = nullptr);

/// Seeded minibatch training; identical seeds give identical trajectories.
/// Aborts with an exception when the objective exceeds 1e6 x its initial
/// value (divergence guard).
TrainResult train(const Dataset& data, const TrainConfig& cfg, const Activation& act);

}  // namespace ssn
