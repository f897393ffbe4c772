#pragma once

#include "vsense/grid.hpp"
#include "vsense/soliton.hpp"

namespace vsense {

/// Locally uniform background drive for one hole. In natural units the
/// cyclotron frequency equals the local effective field value.
struct BackgroundDrive {
    double omega_b = 0.0;
    Complex center{0.0, 0.0};
};

/// Times with |cos(omega_b t)| below this are treated as singular.
inline constexpr double kSingularCosine = 1e-6;

/// A single vortex evolving in its background drive.
struct EvolvedState {
    VortexConfiguration base;  // must hold exactly one hole
    BackgroundDrive drive;
    double time = 0.0;
};

/// Closed-form evolution about the drive center:
///   Psi(r, t) = exp(-i w r^2 tan(wt) / 2) / cos(wt) * Psi0(R),
///   R_x = x - tan(wt) y,  R_y = y + tan(wt) x   (so |R| = r / |cos(wt)|),
/// with r measured from the drive center. For omega_b == 0 the static
/// wavefunction is returned unchanged. Throws std::domain_error within
/// kSingularCosine of the focusing instant.
ComplexField evolve(const EvolvedState& state, const GridSpec& spec);
Complex evolve_at(const EvolvedState& state, double x, double y);

/// |evolve|^2. Periodic in t with period pi / omega_b at the density level.
ScalarField density_at_time(const EvolvedState& state, const GridSpec& spec);

/// Q = integral |r - center|^2 rho d2r over the grid.
double quadrupole_moment(const ScalarField& density, Complex center);

/// Fraction of Q missed outside the domain for a static single vortex;
/// the integrand tail decays like r^(3-2n), integrable for n >= 2 only.
double quadrupole_tail_bound(const VortexConfiguration& config, const GridSpec& spec,
                             Complex center);

/// Etilde = 2 C [omega_b + (omega_b^2 / 4) Q], prefactors as printed
/// (first term carries no 1/2).
double excitation_energy(double q_moment, double omega_b, const PhysicalConstants& constants);

}  // namespace vsense
