// Serial reference vs OpenMP kernels on a square grid. Checks bitwise
// agreement of the results while timing.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "vsense/dynamics.hpp"
#include "vsense/grid.hpp"
#include "vsense/reference.hpp"
#include "vsense/soliton.hpp"

#if defined(_OPENMP)
#include <omp.h>
#endif

using namespace vsense;

namespace {

template <class Fn>
double time_best_of(int reps, Fn&& fn) {
    double best = 1e300;
    for (int i = 0; i < reps; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() &&
           std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

bool bitwise_equal(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    return a.size() == b.size() &&
           std::memcmp(a.data(), b.data(), a.size() * sizeof(Complex)) == 0;
}

void report(const char* name, double serial, double parallel, bool match) {
    std::printf("%-16s serial %8.3f ms   parallel %8.3f ms   speedup %5.2fx   bitwise %s\n",
                name, serial * 1e3, parallel * 1e3, serial / parallel,
                match ? "ok" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
    const int n = argc > 1 ? std::atoi(argv[1]) : 1024;
    const int reps = argc > 2 ? std::atoi(argv[2]) : 3;
    if (n < 16) {
        std::fprintf(stderr, "usage: %s [grid-cells >= 16] [reps]\n", argv[0]);
        return 2;
    }
#if defined(_OPENMP)
    std::printf("grid %dx%d, best of %d, OpenMP threads %d\n", n, n, reps,
                omp_get_max_threads());
#else
    std::printf("grid %dx%d, best of %d, OpenMP disabled at build time\n", n, n, reps);
#endif

    const GridSpec spec(8.0, 8.0, n, n);
    const VortexConfiguration vortex({HoleSpec{{0.0, 0.0}, 1.0}}, 2, +1, PhysicalConstants(1.0));
    const EvolvedState state{vortex, BackgroundDrive{0.1, {0.0, 0.0}}, 0.25 * M_PI / 0.1};

    int failures = 0;

    {
        ScalarField out_s, out_p;
        const double ts = time_best_of(reps, [&] { out_s = ref::charge_density(vortex, spec); });
        const double tp = time_best_of(reps, [&] { out_p = charge_density(vortex, spec); });
        const bool ok = bitwise_equal(out_s.values, out_p.values);
        report("charge_density", ts, tp, ok);
        failures += ok ? 0 : 1;

        const double is = time_best_of(reps, [&] { (void)ref::integrate(out_s); });
        const double ip = time_best_of(reps, [&] { (void)integrate(out_p); });
        const bool iok = ref::integrate(out_s) == integrate(out_p);
        report("integrate", is, ip, iok);
        failures += iok ? 0 : 1;

        const double ls = time_best_of(reps, [&] { (void)ref::laplacian(out_s); });
        const double lp = time_best_of(reps, [&] { (void)laplacian(out_p); });
        const bool lok = bitwise_equal(ref::laplacian(out_s).values, laplacian(out_p).values);
        report("laplacian", ls, lp, lok);
        failures += lok ? 0 : 1;
    }
    {
        ComplexField out_s, out_p;
        const double ts = time_best_of(reps, [&] { out_s = ref::evolve(state, spec); });
        const double tp = time_best_of(reps, [&] { out_p = evolve(state, spec); });
        const bool ok = bitwise_equal(out_s.values, out_p.values);
        report("evolve", ts, tp, ok);
        failures += ok ? 0 : 1;

        const double is = time_best_of(reps, [&] { (void)ref::inner(out_s, out_s); });
        const double ip = time_best_of(reps, [&] { (void)inner(out_p, out_p); });
        const bool iok = ref::inner(out_s, out_s) == inner(out_p, out_p);
        report("inner", is, ip, iok);
        failures += iok ? 0 : 1;
    }

    if (failures) {
        std::printf("%d kernel(s) disagree between serial and parallel paths\n", failures);
        return 1;
    }
    return 0;
}
