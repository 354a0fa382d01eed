#pragma once

#include <cstddef>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace itpnet::par {

/// Worker cap for the OpenMP fan-outs. Initialized from ITPNET_THREADS when
/// set, else 1 (serial). The CLI --threads flag overwrites it.
inline int& thread_count() {
    static int n = [] {
        if (const char* env = std::getenv("ITPNET_THREADS")) {
            const int v = std::atoi(env);
            if (v >= 1) return v;
        }
        return 1;
    }();
    return n;
}

inline void set_threads(int n) { thread_count() = n >= 1 ? n : 1; }

/// Runs f(i) for i in [0, n). Iterations must be independent; callers that
/// need determinism reduce results in index order afterwards.
template <class F>
void parallel_for(std::size_t n, F&& f) {
#ifdef _OPENMP
    const int k = thread_count();
    if (k > 1) {
#pragma omp parallel for schedule(static) num_threads(k)
        for (long long i = 0; i < (long long)n; ++i) f(std::size_t(i));
        return;
    }
#endif
    for (std::size_t i = 0; i < n; ++i) f(i);
}

} // namespace itpnet::par
