#pragma once

// Thin OpenMP wrapper.  Work items write into preassigned slots, so the
// output is identical for every thread count; `threads <= 1` takes a plain
// serial loop with no OpenMP machinery at all.

#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace permlaw {

inline int resolve_threads(int requested) {
#ifdef _OPENMP
  if (requested <= 0) return omp_get_max_threads();
  return requested;
#else
  (void)requested;
  return 1;
#endif
}

template <class F>
void parallel_for(std::int64_t count, int threads, F&& body) {
  if (threads > 1 && count > 1) {
#ifdef _OPENMP
#pragma omp parallel for num_threads(threads) schedule(dynamic)
    for (std::int64_t i = 0; i < count; ++i) body(i);
    return;
#endif
  }
  for (std::int64_t i = 0; i < count; ++i) body(i);
}

}  // namespace permlaw
