#pragma once

#include <span>
#include <vector>

#include "ssn/model.hpp"

namespace ssn {

/// Convex-hull membership, decided by LP feasibility of the barycentric
/// system. An empty `others` set contains nothing.
bool in_convex_hull(std::span<const double> point, const std::vector<Vec>& others);

/// Ordering q_1..q_N of the rows such that each q_k is an extreme point of
/// conv{x_{q_1}, ..., x_{q_k}} (built by peeling extreme points off the full
/// set, lowest index first). Requires pairwise distinct rows.
std::vector<int> extreme_point_order(const Mat& features);

struct Separator {
    Vec direction;  // a
    double bias = 0.0;
    double margin = 0.0;  // delta: <a,x*>+b >= delta and <a,x_o>+b <= -delta
};

/// Margin-maximal hyperplane in the parameter domain with the point strictly
/// on the positive side and every other point strictly on the negative side.
/// Ball domains are handled on the enclosing cube and scaled back in (signs
/// are preserved under positive scaling). Throws when the best margin is
/// <= 1e-10, which contradicts the point being outside the hull.
Separator separating_direction(std::span<const double> point, const std::vector<Vec>& others,
                               const ParamDomain& domain);

/// N-neuron exact interpolant of the dataset: neurons are built along the
/// extreme-point order, so each one is inactive on all previously handled
/// features and the weights solve a triangular system.
ShallowParams exact_representation(const Dataset& data, const ParamDomain& domain,
                                   const Activation& act);

}  // namespace ssn
