#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ssn/linalg.hpp"

namespace ssn {

// Weights below this magnitude count as switched-off neurons.
inline constexpr double kZeroWeightTol = 1e-12;
// Slack for closed-set membership tests, absorbs floating-point drift.
inline constexpr double kDomainSlack = 1e-9;

/// Activation with a one-sided sign pattern: zero on (-inf,0], positive on
/// (0,inf). ReLU is the only built-in kind; `lipschitz` feeds the
/// generalization bounds.
struct Activation {
    enum class Kind { relu } kind = Kind::relu;
    double lipschitz = 1.0;

    double operator()(double x) const { return x > 0.0 ? x : 0.0; }
    // Subgradient convention: 0 at the kink.
    double derivative(double x) const { return x > 0.0 ? 1.0 : 0.0; }

    static Activation relu() { return Activation{}; }
    std::string name() const { return "relu"; }
};

/// Spot-check of the sign assumption on the activation (zero left of the
/// origin, positive right of it) over `samples` points per side.
bool activation_sign_ok(const Activation& act, int samples = 256);

/// Compact parameter domain for (a, b). Hypercubes must have the origin
/// strictly inside.
struct ParamDomain {
    enum class Kind { hypercube, unit_ball } kind = Kind::unit_ball;
    Vec lo, hi;  // hypercube only
    int dim = 0;

    static ParamDomain hypercube(Vec lo, Vec hi);
    static ParamDomain unit_ball(int dim);

    bool contains(std::span<const double> point, double slack = kDomainSlack) const;
    /// Nearest point of the domain (coordinate clamp / radial scaling).
    Vec project(std::span<const double> point) const;
    /// Scaled copy k*Omega, k > 0. A scaled unit ball becomes a ball domain
    /// represented through its bounding description, so only hypercubes and
    /// k = 1 balls are supported.
    ParamDomain scaled(double k) const;
};

struct Neuron {
    double weight = 0.0;
    Vec direction;  // a_j
    double bias = 0.0;
};

/// Finite neuron list; doubles as the discrete signed measure
/// sum_j weight_j * delta_{(direction_j, bias_j)}.
struct ShallowParams {
    std::vector<Neuron> neurons;

    int size() const { return static_cast<int>(neurons.size()); }
    bool empty() const { return neurons.empty(); }
};

/// Supervised dataset: N feature rows of dimension d plus scalar labels.
/// Construction validates finiteness and pairwise-distinct features.
struct Dataset {
    Mat features;  // N x d
    Vec labels;    // N

    int n() const { return features.rows; }
    int dim() const { return features.cols; }

    static Dataset create(Mat features, Vec labels);
};

double forward(const ShallowParams& theta, std::span<const double> x, const Activation& act);

double l1_norm(const ShallowParams& theta);
int active_count(const ShallowParams& theta);

/// Fraction of samples with |prediction - label| < 0.5.
double accuracy(const ShallowParams& theta, const Dataset& data, const Activation& act);

struct Residual {
    double bias = 0.0;       // mean absolute training error
    double deviation = 0.0;  // dkr_features * L * sum |w_j| ||a_j||
    double total = 0.0;
};

/// Residual decomposition r(Theta) entering the generalization bound;
/// `dkr_features` is the transport distance between the feature clouds.
Residual residual_r(const ShallowParams& theta, const Dataset& train, double dkr_features,
                    const Activation& act);

/// True when every (a_j, b_j) lies in `domain` within `slack`.
bool params_in_domain(const ShallowParams& theta, const ParamDomain& domain,
                      double slack = kDomainSlack);

}  // namespace ssn
