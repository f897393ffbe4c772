#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

namespace vsense {

using Complex = std::complex<double>;

/// Uniform cell-centered grid over [-Lx, Lx] x [-Ly, Ly], natural units
/// (hbar = c = e = m = 1). Cell (ix, iy) is centered at
/// x = -Lx + (ix + 1/2) hx, y = -Ly + (iy + 1/2) hy. Storage is row-major
/// with iy as the slow index.
struct GridSpec {
    double half_extent_x = 1.0;
    double half_extent_y = 1.0;
    int nx = 16;
    int ny = 16;

    GridSpec() = default;
    GridSpec(double half_x, double half_y, int cells_x, int cells_y);

    double hx() const { return 2.0 * half_extent_x / nx; }
    double hy() const { return 2.0 * half_extent_y / ny; }
    double x(int ix) const { return -half_extent_x + (ix + 0.5) * hx(); }
    double y(int iy) const { return -half_extent_y + (iy + 0.5) * hy(); }
    std::size_t cell_count() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
    std::size_t index(int ix, int iy) const { return static_cast<std::size_t>(iy) * nx + ix; }

    bool operator==(const GridSpec&) const = default;
};

struct ScalarField {
    GridSpec spec;
    std::vector<double> values;

    ScalarField() = default;
    explicit ScalarField(const GridSpec& s) : spec(s), values(s.cell_count(), 0.0) {}
    ScalarField(const GridSpec& s, std::vector<double> v);

    double& at(int ix, int iy) { return values[spec.index(ix, iy)]; }
    double at(int ix, int iy) const { return values[spec.index(ix, iy)]; }
};

struct ComplexField {
    GridSpec spec;
    std::vector<Complex> values;

    ComplexField() = default;
    explicit ComplexField(const GridSpec& s) : spec(s), values(s.cell_count(), Complex{}) {}
    ComplexField(const GridSpec& s, std::vector<Complex> v);

    Complex& at(int ix, int iy) { return values[spec.index(ix, iy)]; }
    Complex at(int ix, int iy) const { return values[spec.index(ix, iy)]; }
};

/// Per-cell validity flags; cells with on[i] == 0 are excluded from norms
/// and medians.
struct GridMask {
    GridSpec spec;
    std::vector<std::uint8_t> on;

    GridMask() = default;
    explicit GridMask(const GridSpec& s, bool initial = true)
        : spec(s), on(s.cell_count(), initial ? 1 : 0) {}

    std::size_t count() const;
};

/// Mask that is on everywhere except a boundary ring of the given width.
GridMask interior_mask(const GridSpec& spec, int ring = 1);

/// Turns off every cell whose center lies within `radius` of `center`.
void mask_disk(GridMask& mask, Complex center, double radius);

/// Film constant kappa and the derived Jackiw-Pi couplings. In natural
/// units every prefactor of the exact solutions reduces to C = |kappa|.
struct PhysicalConstants {
    double kappa = 1.0;

    PhysicalConstants() = default;
    explicit PhysicalConstants(double kappa_value);

    double C() const { return kappa < 0 ? -kappa : kappa; }
    double g() const { return 1.0 / C(); }
    double sigma_s() const { return kappa; }
};

/// Midpoint-rule quadrature: sum of value * hx * hy over all cells, in the
/// documented deterministic order (rows summed left to right, row partials
/// combined bottom to top). Rejects non-finite cells.
double integrate(const ScalarField& field);

/// Same quadrature with a per-cell weight evaluated at the cell center.
double integrate(const ScalarField& field,
                 const std::function<double(double, double)>& weight);

/// 5-point second-order Laplacian. Boundary cells of the result are zero
/// and are not meaningful; combine with interior_mask(spec).
ScalarField laplacian(const ScalarField& field);

/// L2 inner product sum(conj(a) * b) * hx * hy, deterministic order.
Complex inner(const ComplexField& a, const ComplexField& b);

/// Bilinear interpolation at an arbitrary point strictly inside the grid.
double bilinear(const ScalarField& field, double x, double y);
Complex bilinear(const ComplexField& field, double x, double y);

/// Net phase change of the field around the circle, unwrapped and divided
/// by 2*pi, rounded to the nearest integer. The circle (plus interpolation
/// support) must lie inside the grid and the interpolated amplitude must
/// stay above min_amplitude everywhere on it.
int phase_winding(const ComplexField& field, Complex center, double radius,
                  double min_amplitude = 1e-12);

/// Median of |field| over masked-on cells (deterministic nth_element).
double masked_median_abs(const ScalarField& field, const GridMask& mask);

/// Max of |field| over masked-on cells.
double masked_max_abs(const ScalarField& field, const GridMask& mask);

// CSV serialization: one header line carrying the GridSpec, then ny rows
// of nx comma-separated values (complex fields carry 2*nx columns with
// re,im interleaved). Values are written with round-trip precision.
void write_csv(const ScalarField& field, const std::filesystem::path& path);
void write_csv(const ComplexField& field, const std::filesystem::path& path);
ScalarField read_scalar_csv(const std::filesystem::path& path);
ComplexField read_complex_csv(const std::filesystem::path& path);

}  // namespace vsense
