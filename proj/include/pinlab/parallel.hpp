#pragma once

#include <cstddef>
#include <exception>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pinlab::parallel {

inline void set_threads(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

/// out[i] = f(i) for i < count. Results land at their index, so the output does
/// not depend on scheduling. The first exception thrown by any task is
/// rethrown after the loop.
template <class T, class F>
std::vector<T> map_indexed(std::size_t count, F&& f) {
    std::vector<T> out(count);
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < static_cast<long long>(count); ++i) {
        try {
            out[static_cast<std::size_t>(i)] = f(static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical(pinlab_map_error)
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
    return out;
}

}  // namespace pinlab::parallel
