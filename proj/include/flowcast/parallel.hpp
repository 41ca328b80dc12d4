// Execution policy for the data-parallel kernels (noise trials, windows,
// ensemble members). Every kernel writes results into per-index slots and
// reduces serially afterwards, so Serial and Parallel are bitwise identical.

#ifndef FLOWCAST_PARALLEL_HPP
#define FLOWCAST_PARALLEL_HPP

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace flowcast {

enum class Exec { Serial, Parallel };

template <typename Fn>
void parallel_for(std::size_t n, Exec exec, Fn&& fn) {
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic)
        for (long long i = 0; i < static_cast<long long>(n); ++i) {
            fn(static_cast<std::size_t>(i));
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) fn(i);
    }
}

}  // namespace flowcast

#endif  // FLOWCAST_PARALLEL_HPP
