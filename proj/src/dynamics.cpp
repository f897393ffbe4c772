#include "vsense/dynamics.hpp"

#include <cmath>

#include "vsense/errors.hpp"
#include "vsense/parallel.hpp"

namespace vsense {

namespace {

struct EvolutionTerms {
    double tan_wt = 0.0;
    double cos_wt = 1.0;
    bool is_static = true;
};

EvolutionTerms prepare(const EvolvedState& state) {
    if (state.base.holes.size() != 1)
        throw ConfigError("evolve: base configuration must hold exactly one hole");
    EvolutionTerms terms;
    const double w = state.drive.omega_b;
    if (!std::isfinite(w)) throw ConfigError("evolve: omega_b must be finite");
    if (!std::isfinite(state.time)) throw ConfigError("evolve: time must be finite");
    if (w == 0.0) return terms;
    const double phase = w * state.time;
    const double c = std::cos(phase);
    if (std::abs(c) <= kSingularCosine)
        throw std::domain_error("evolve: time too close to the focusing singularity");
    terms.tan_wt = std::tan(phase);
    terms.cos_wt = c;
    terms.is_static = (state.time == 0.0);
    return terms;
}

Complex evolve_point(const EvolvedState& state, const EvolutionTerms& terms, double x,
                     double y) {
    const double cx = state.drive.center.real();
    const double cy = state.drive.center.imag();
    const double rx = x - cx;
    const double ry = y - cy;
    if (terms.is_static && terms.tan_wt == 0.0)
        return wavefunction_at(state.base, x, y);
    const double t = terms.tan_wt;
    // R_i = r_i - tan(wt) eps_ij r_j with eps_xy = +1.
    const double Rx = rx - t * ry;
    const double Ry = ry + t * rx;
    const Complex psi0 = wavefunction_at(state.base, cx + Rx, cy + Ry);
    const double r2 = rx * rx + ry * ry;
    const double phase = -0.5 * state.drive.omega_b * r2 * t;
    return std::polar(1.0, phase) * psi0 / terms.cos_wt;
}

}  // namespace

Complex evolve_at(const EvolvedState& state, double x, double y) {
    const EvolutionTerms terms = prepare(state);
    return evolve_point(state, terms, x, y);
}

ComplexField evolve(const EvolvedState& state, const GridSpec& spec) {
    const EvolutionTerms terms = prepare(state);
    ComplexField psi(spec);
    for_each_row(spec.ny, [&](int iy) {
        const double y = spec.y(iy);
        for (int ix = 0; ix < spec.nx; ++ix)
            psi.at(ix, iy) = evolve_point(state, terms, spec.x(ix), y);
    });
    return psi;
}

ScalarField density_at_time(const EvolvedState& state, const GridSpec& spec) {
    const EvolutionTerms terms = prepare(state);
    ScalarField rho(spec);
    for_each_row(spec.ny, [&](int iy) {
        const double y = spec.y(iy);
        for (int ix = 0; ix < spec.nx; ++ix) {
            const Complex v = evolve_point(state, terms, spec.x(ix), y);
            rho.at(ix, iy) = v.real() * v.real() + v.imag() * v.imag();
        }
    });
    return rho;
}

double quadrupole_moment(const ScalarField& density, Complex center) {
    const double cx = center.real();
    const double cy = center.imag();
    return integrate(density, [cx, cy](double x, double y) {
        const double dx = x - cx;
        const double dy = y - cy;
        return dx * dx + dy * dy;
    });
}

double quadrupole_tail_bound(const VortexConfiguration& config, const GridSpec& spec,
                             Complex center) {
    // Static tail: rho ~ 4 C n^2 r0^(2n) r^(-2n-2), so the integrand of Q is
    // ~ 8 pi C n^2 r0^(2n) r^(1-2n) beyond the domain edge at distance R.
    const int n = config.winding;
    const double r0 = config.core_radius();
    const double C = config.constants.C();
    const double rx = spec.half_extent_x - std::abs(center.real());
    const double ry = spec.half_extent_y - std::abs(center.imag());
    const double R = std::max(std::min(rx, ry), r0);
    const double nn = static_cast<double>(n);
    return 8.0 * M_PI * C * nn * nn * std::pow(r0, 2 * n) * std::pow(R, 2.0 - 2.0 * nn) /
           (2.0 * nn - 2.0);
}

double excitation_energy(double q_moment, double omega_b, const PhysicalConstants& constants) {
    if (q_moment < 0.0) throw ConfigError("excitation_energy: quadrupole moment must be >= 0");
    return 2.0 * constants.C() * (omega_b + 0.25 * omega_b * omega_b * q_moment);
}

}  // namespace vsense
