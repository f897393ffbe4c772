#pragma once

#include <vector>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace vsense {

/// Runs body(iy) for iy in [0, ny), one grid row per task. Rows are
/// independent; with OpenMP enabled they execute in parallel.
template <class Body>
void for_each_row(int ny, Body&& body) {
#if defined(_OPENMP)
#pragma omp parallel for schedule(static)
    for (int iy = 0; iy < ny; ++iy) body(iy);
#else
    for (int iy = 0; iy < ny; ++iy) body(iy);
#endif
}

/// Deterministic reduction: per-row partials are computed independently
/// (each row strictly left to right) and combined serially in row order.
/// The result is bitwise independent of thread count and scheduling; the
/// serial reference kernels use the same summation order.
template <class T, class RowPartial>
T reduce_rows(int ny, RowPartial&& partial) {
    std::vector<T> parts(static_cast<std::size_t>(ny), T{});
    for_each_row(ny, [&](int iy) { parts[static_cast<std::size_t>(iy)] = partial(iy); });
    T total{};
    for (int iy = 0; iy < ny; ++iy) total += parts[static_cast<std::size_t>(iy)];
    return total;
}

}  // namespace vsense
