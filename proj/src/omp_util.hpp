#pragma once

#ifdef _OPENMP
#include <omp.h>
#endif

namespace repsim::detail {

inline int resolve_jobs(int requested) {
    if (requested > 0) return requested;
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace repsim::detail
