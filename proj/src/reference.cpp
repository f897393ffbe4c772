// Plain serial versions of the OpenMP kernels. Loop bodies and the
// documented summation order (rows left to right, row partials combined in
// row order) match the parallel path exactly, so results are bitwise equal.

#include "vsense/reference.hpp"

#include <cmath>

#include "vsense/errors.hpp"

namespace vsense::ref {

double integrate(const ScalarField& field) {
    const GridSpec& spec = field.spec;
    std::vector<double> parts(static_cast<std::size_t>(spec.ny), 0.0);
    for (int iy = 0; iy < spec.ny; ++iy) {
        double acc = 0.0;
        for (int ix = 0; ix < spec.nx; ++ix) {
            const double v = field.at(ix, iy);
            if (!std::isfinite(v)) throw ConfigError("integrate: non-finite cell value");
            acc += v;
        }
        parts[static_cast<std::size_t>(iy)] = acc;
    }
    double total = 0.0;
    for (int iy = 0; iy < spec.ny; ++iy) total += parts[static_cast<std::size_t>(iy)];
    return total * (field.spec.hx() * field.spec.hy());
}

Complex inner(const ComplexField& a, const ComplexField& b) {
    if (!(a.spec == b.spec)) throw ConfigError("inner: grid mismatch");
    const GridSpec& spec = a.spec;
    std::vector<Complex> parts(static_cast<std::size_t>(spec.ny), Complex{});
    for (int iy = 0; iy < spec.ny; ++iy) {
        Complex acc{};
        for (int ix = 0; ix < spec.nx; ++ix) acc += std::conj(a.at(ix, iy)) * b.at(ix, iy);
        parts[static_cast<std::size_t>(iy)] = acc;
    }
    Complex total{};
    for (int iy = 0; iy < spec.ny; ++iy) total += parts[static_cast<std::size_t>(iy)];
    return total * (spec.hx() * spec.hy());
}

ScalarField laplacian(const ScalarField& field) {
    const GridSpec& spec = field.spec;
    if (spec.nx < 3 || spec.ny < 3) throw ConfigError("laplacian: grid too small");
    ScalarField out(spec);
    const double inv_hx2 = 1.0 / (spec.hx() * spec.hx());
    const double inv_hy2 = 1.0 / (spec.hy() * spec.hy());
    for (int iy = 1; iy < spec.ny - 1; ++iy) {
        for (int ix = 1; ix < spec.nx - 1; ++ix) {
            const double c = field.at(ix, iy);
            out.at(ix, iy) = (field.at(ix + 1, iy) + field.at(ix - 1, iy) - 2.0 * c) * inv_hx2 +
                             (field.at(ix, iy + 1) + field.at(ix, iy - 1) - 2.0 * c) * inv_hy2;
        }
    }
    return out;
}

ScalarField charge_density(const VortexConfiguration& config, const GridSpec& spec) {
    ScalarField rho(spec);
    for (int iy = 0; iy < spec.ny; ++iy) {
        const double y = spec.y(iy);
        for (int ix = 0; ix < spec.nx; ++ix)
            rho.at(ix, iy) = charge_density_at(config, spec.x(ix), y);
    }
    return rho;
}

ComplexField wavefunction(const VortexConfiguration& config, const GridSpec& spec) {
    ComplexField psi(spec);
    for (int iy = 0; iy < spec.ny; ++iy) {
        const double y = spec.y(iy);
        for (int ix = 0; ix < spec.nx; ++ix)
            psi.at(ix, iy) = wavefunction_at(config, spec.x(ix), y);
    }
    return psi;
}

ComplexField evolve(const EvolvedState& state, const GridSpec& spec) {
    ComplexField psi(spec);
    for (int iy = 0; iy < spec.ny; ++iy) {
        const double y = spec.y(iy);
        for (int ix = 0; ix < spec.nx; ++ix) psi.at(ix, iy) = evolve_at(state, spec.x(ix), y);
    }
    return psi;
}

}  // namespace vsense::ref
