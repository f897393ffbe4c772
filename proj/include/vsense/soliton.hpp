#pragma once

#include <vector>

#include "vsense/grid.hpp"

#include "json.hpp"

namespace vsense {

struct HoleSpec {
    Complex center{0.0, 0.0};
    double core_radius = 1.0;  // r0 > 0
};

/// One exact multi-vortex state: rational data f(z) = sum_j (r0/(z-z_j))^n
/// for helicity +1 (spin up), the conjugate expression for helicity -1.
/// All holes share the core radius and winding.
struct VortexConfiguration {
    std::vector<HoleSpec> holes;
    int winding = 2;    // n >= 2
    int helicity = +1;  // +1 holomorphic, -1 anti-holomorphic
    PhysicalConstants constants{};

    VortexConfiguration() = default;
    VortexConfiguration(std::vector<HoleSpec> holes_, int winding_, int helicity_,
                        PhysicalConstants constants_);

    double core_radius() const { return holes.empty() ? 0.0 : holes.front().core_radius; }
    /// Minimum pairwise hole separation (infinity for a single hole).
    double min_separation() const { return min_separation_; }

  private:
    double min_separation_ = 0.0;
};

void to_json(nlohmann::json& j, const VortexConfiguration& config);
void from_json(const nlohmann::json& j, VortexConfiguration& config);

/// f(z). Throws std::domain_error at a pole (z equal to a hole center).
Complex rational_f(const VortexConfiguration& config, Complex z);

/// Closed-form derivative -n * sum_j r0^n / (z - z_j)^(n+1), conjugated for
/// helicity -1. No numerical differentiation.
Complex f_prime(const VortexConfiguration& config, Complex z);

/// rho(z) = 4 C |f'|^2 / (1 + |f|^2)^2, C = |kappa|. Zero in the pole limit
/// (n >= 2). Helicity-independent.
double charge_density_at(const VortexConfiguration& config, double x, double y);

/// Psi(z) = 2 sqrt(C) f'(z) / (1 + |f(z)|^2), conjugate construction for
/// helicity -1. |Psi|^2 equals charge_density_at identically.
Complex wavefunction_at(const VortexConfiguration& config, double x, double y);

ScalarField charge_density(const VortexConfiguration& config, const GridSpec& spec);
ComplexField wavefunction(const VortexConfiguration& config, const GridSpec& spec);

/// Divergence-free spin current j = s * (1/2) curl(rho zhat), s = helicity:
/// jx = s/2 * d_y rho, jy = -s/2 * d_x rho (central differences, boundary
/// cells zero; combine with interior_mask).
struct SpinCurrent {
    ScalarField jx;
    ScalarField jy;
};
SpinCurrent spin_current(const VortexConfiguration& config, const GridSpec& spec);

/// Magnetic flux Phi = -(1/kappa) * integral(rho). Exact value is
/// -sign(kappa) * 4*pi*n*C per hole; on a finite domain the tail of rho is
/// missing, see flux_tail_bound.
double total_flux(const VortexConfiguration& config, const GridSpec& spec);

/// Upper bound on the |flux| fraction lost outside the domain
/// (per-hole tail ~ (r0/R)^(2n) with R the distance to the nearest edge).
double flux_tail_bound(const VortexConfiguration& config, const GridSpec& spec);

/// One register slot: an independent single-vortex factor.
struct VortexRegisterEntry {
    HoleSpec hole;
    int helicity = +1;
    int winding = 2;
};

/// Formal product state over per-hole factors; its observable density is
/// the sum of the factor densities.
struct VortexRegister {
    std::vector<VortexRegisterEntry> entries;
    PhysicalConstants constants{};
};

ScalarField register_density(const VortexRegister& reg, const GridSpec& spec);

/// Zeros of f' inside the domain (poles excluded), found by Newton
/// iteration seeded from grid minima of |f'|.
std::vector<Complex> f_prime_zeros(const VortexConfiguration& config, const GridSpec& spec);

/// Residual of the integrability identity lap(ln rho) + (2/C) rho = 0.
/// Cells within mask_radius (default 2h) of a pole of f or a zero of f',
/// plus the stencil boundary ring, are masked off.
struct LiouvilleReport {
    ScalarField residual;
    GridMask mask;
    double max_density = 0.0;
    double median_abs_normalized = 0.0;  // median |residual| / max_density
};
LiouvilleReport liouville_residual(const VortexConfiguration& config, const GridSpec& spec,
                                   double mask_radius = 0.0);

}  // namespace vsense
