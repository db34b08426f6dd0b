#pragma once

#include <optional>
#include <vector>

#include "ssn/model.hpp"

namespace ssn {

/// Drops neurons whose weight is at most the zero tolerance, preserving the
/// order of the survivors.
ShallowParams filter_zero_weights(const ShallowParams& theta);

/// One nonzero null vector of `b` normalized to unit sup-norm, or nullopt
/// when b has full column rank. Rank decisions use row reduction with pivot
/// tolerance 1e-10 * ||b||_max * max(rows, cols).
std::optional<Vec> null_vector(const Mat& b);

/// Per-iteration record of the sparsification loop, for invariant checks.
struct SparsifyTrace {
    int iterations = 0;             // loop passes, including the final rank check
    std::vector<double> l1;         // l1 norm entering each pass
    std::vector<int> active;        // active neurons entering each pass
    std::vector<double> output_drift;  // sup-norm drift of training outputs per pass
    double min_combination = 1.0;   // min over unforced iterations/j of (1 +- beta alpha_j)
    int forced_steps = 0;           // budget-guard steps (descent-side retirement)
};

/// Null-space sparsification: repeatedly moves the weight vector along a null
/// direction of the active design matrix until that matrix has full column
/// rank. Training outputs are invariant, the l1 norm never increases, and the
/// result has at most N active neurons. `features` are the N training rows.
ShallowParams sparsify(const ShallowParams& theta, const Mat& features, const Activation& act,
                       SparsifyTrace* trace = nullptr);

}  // namespace ssn
