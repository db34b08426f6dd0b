#pragma once

#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ssn {

/// Thread budget for the OpenMP kernels. SPARSESHALLOW_THREADS, when set to a
/// positive integer, caps the team size; otherwise the OpenMP default rules.
inline int max_threads() {
    static const int cached = [] {
        int n = 1;
#ifdef _OPENMP
        n = omp_get_max_threads();
#endif
        if (const char* env = std::getenv("SPARSESHALLOW_THREADS")) {
            const int cap = std::atoi(env);
            if (cap > 0 && cap < n) n = cap;
        }
        return n;
    }();
    return cached;
}

}  // namespace ssn
