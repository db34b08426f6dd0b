#pragma once

#include <vector>

#include "ssn/model.hpp"

namespace ssn {

/// Discretization Omega_M of the parameter domain, together with the design
/// matrix of activations on the training features and an upper bound on the
/// Hausdorff distance between the domain and its point set.
struct ParamGrid {
    std::vector<Vec> points;  // M points in R^{d+1}, all inside `domain`
    Mat design;               // N x M, design(i, j) = act(<a_j, x_i> + b_j)
    double hausdorff_bound = 0.0;
    ParamDomain domain;

    int m() const { return static_cast<int>(points.size()); }
    int n() const { return design.rows; }

    /// Validates the points (inside the domain, pairwise distinct) and
    /// assembles the design matrix.
    static ParamGrid build(std::vector<Vec> points, double hausdorff_bound, ParamDomain domain,
                           const Dataset& data, const Activation& act);
};

struct GridPoints {
    std::vector<Vec> points;
    double hausdorff_bound = 0.0;
};

/// Regular cell-center lattice covering the domain. Hypercubes get one cell
/// layer per axis of width side/ceil(side/step) (= step when step divides the
/// side); the bound is half the cell diagonal. Unit balls keep the lattice
/// points of the enclosing cube that fall inside the ball, with the bound
/// doubled to cover boundary cells whose center was rejected.
/// Throws when the lattice would exceed `max_points` (message carries the
/// computed M).
GridPoints uniform_grid(const ParamDomain& domain, double step, long max_points = 10'000'000);

/// Design matrix of Omega_M on the dataset; OpenMP-parallel across columns,
/// output independent of the schedule.
Mat design_matrix(const std::vector<Vec>& points, const Dataset& data, const Activation& act);
/// Serial reference for design_matrix; kept for testing and benchmarks.
Mat design_matrix_serial(const std::vector<Vec>& points, const Dataset& data, const Activation& act);

/// Smallest hypercube containing every (a_j, b_j), widened by `margin` on
/// each side and then, where needed, widened to max(1e-3, margin) so the
/// origin is interior.
ParamDomain bounding_domain(const ShallowParams& theta, double margin);

/// D_X = min_i sqrt(||x_i||^2 + 1): the feature-dependent constant of the
/// discretization error estimates.
double dataset_min_lift(const Dataset& data);

}  // namespace ssn
