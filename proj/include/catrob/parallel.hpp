#pragma once

// Thin OpenMP shim so the library builds (serially) without it.

#if defined(_OPENMP)
#include <omp.h>
namespace catrob {
constexpr bool kHaveOpenMP = true;
}
#else
namespace catrob {
constexpr bool kHaveOpenMP = false;
}
inline int omp_get_max_threads() { return 1; }
inline int omp_get_thread_num() { return 0; }
inline void omp_set_num_threads(int) {}
#endif

namespace catrob {

// Applies CATROB_THREADS if set; otherwise leaves the OpenMP default alone.
void configure_threads_from_env();

} // namespace catrob
