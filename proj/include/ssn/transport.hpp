#pragma once

#include <string>
#include <vector>

#include "ssn/model.hpp"

namespace ssn {

/// Finitely supported probability measure. Weights must be nonnegative and
/// sum to one (checked to 1e-12).
struct EmpiricalMeasure {
    std::vector<Vec> atoms;
    Vec weights;

    int size() const { return static_cast<int>(atoms.size()); }
    int dim() const { return atoms.empty() ? 0 : static_cast<int>(atoms.front().size()); }

    static EmpiricalMeasure create(std::vector<Vec> atoms, Vec weights);
    static EmpiricalMeasure uniform(std::vector<Vec> atoms);
};

/// Euclidean pairwise distance matrix between two atom clouds.
/// OpenMP-parallel across rows; `_serial` is the reference kernel.
Mat pairwise_cost(const std::vector<Vec>& a, const std::vector<Vec>& b);
Mat pairwise_cost_serial(const std::vector<Vec>& a, const std::vector<Vec>& b);

/// Exact Kantorovich-Rubinstein (= Wasserstein-1) distance, solved as a
/// transportation LP over the full coupling polytope (one redundant marginal
/// row dropped). Handles unequal sizes and non-uniform weights.
double kr_distance(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);

/// W_p between equal-size uniform measures via minimum-cost perfect matching
/// on cost^p; p may be infinity, solved as a bottleneck assignment (binary
/// search over the distinct costs with an augmenting-path matching).
double wasserstein_p(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double p);

struct GeneralizationReport {
    double lhs = 0.0;         // d_KR(m_test, m_pred)
    double train_test = 0.0;  // d_KR(m_train, m_test)
    double features = 0.0;    // d_KR(m_X, m_X')
    Residual residual;        // r(Theta) with the feature distance above
    double rhs = 0.0;
    double margin = 0.0;      // rhs - lhs, >= 0 up to roundoff (it is a theorem)

    bool holds(double tol = 1e-8) const { return margin >= -tol; }
    std::string to_text() const;
};

/// Evaluates both sides of the distributional generalization bound. Distances
/// go through the transportation LP up to `lp_size_limit` atoms per side;
/// equal-size uniform pairs above that switch to the matching solver (same
/// value, cubic instead of simplex).
GeneralizationReport generalization_report(const ShallowParams& theta, const Dataset& train,
                                           const Dataset& test, const Activation& act,
                                           int lp_size_limit = 64);

struct MeanLpReport {
    double p = 1.0;  // infinity for the sup version
    double lhs = 0.0;
    double wp = 0.0;          // W_p(m_train, m_test), joint measures
    double train_term = 0.0;  // mean-l^p training error
    double deviation = 0.0;   // W_p * L * sum |w_j| ||a_j||
    double rhs = 0.0;
    double margin = 0.0;

    bool holds(double tol = 1e-8) const { return margin >= -tol; }
};

/// Mean-l^p generalization bound for N' = N (p = infinity gives the sup
/// bound).
MeanLpReport mean_lp_report(const ShallowParams& theta, const Dataset& train, const Dataset& test,
                            double p, const Activation& act);

}  // namespace ssn
