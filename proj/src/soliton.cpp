#include "vsense/soliton.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vsense/errors.hpp"
#include "vsense/parallel.hpp"

namespace vsense {

namespace {

Complex ipow(Complex w, int p) {
    Complex r{1.0, 0.0};
    for (int i = 0; i < p; ++i) r *= w;
    return r;
}

// Above this magnitude of |f| or |f'| the cell is inside the pole limit
// where rho and Psi vanish (n >= 2); avoids overflow in |.|^2 terms.
constexpr double kPoleLimit = 1e120;

}  // namespace

VortexConfiguration::VortexConfiguration(std::vector<HoleSpec> holes_, int winding_,
                                         int helicity_, PhysicalConstants constants_)
    : holes(std::move(holes_)), winding(winding_), helicity(helicity_), constants(constants_) {
    if (holes.empty()) throw ConfigError("VortexConfiguration: needs at least one hole");
    if (winding < 2) throw ConfigError("VortexConfiguration: winding must be >= 2");
    if (helicity != 1 && helicity != -1)
        throw ConfigError("VortexConfiguration: helicity must be +1 or -1");
    const double r0 = holes.front().core_radius;
    if (!(std::isfinite(r0) && r0 > 0.0))
        throw ConfigError("VortexConfiguration: core radius must be positive");
    for (const auto& h : holes)
        if (h.core_radius != r0)
            throw ConfigError("VortexConfiguration: holes must share one core radius");
    min_separation_ = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < holes.size(); ++i)
        for (std::size_t j = i + 1; j < holes.size(); ++j) {
            const double d = std::abs(holes[i].center - holes[j].center);
            if (d == 0.0) throw ConfigError("VortexConfiguration: hole centers must be distinct");
            min_separation_ = std::min(min_separation_, d);
        }
}

void to_json(nlohmann::json& j, const VortexConfiguration& config) {
    nlohmann::json holes = nlohmann::json::array();
    for (const auto& h : config.holes)
        holes.push_back({h.center.real(), h.center.imag()});
    j = nlohmann::json{{"holes", holes},
                       {"core_radius", config.core_radius()},
                       {"winding", config.winding},
                       {"helicity", config.helicity},
                       {"kappa", config.constants.kappa}};
}

void from_json(const nlohmann::json& j, VortexConfiguration& config) {
    std::vector<HoleSpec> holes;
    const double r0 = j.at("core_radius").get<double>();
    for (const auto& h : j.at("holes"))
        holes.push_back({Complex(h.at(0).get<double>(), h.at(1).get<double>()), r0});
    config = VortexConfiguration(std::move(holes), j.at("winding").get<int>(),
                                 j.at("helicity").get<int>(),
                                 PhysicalConstants(j.at("kappa").get<double>()));
}

namespace {

// f and f' for the holomorphic (helicity +1) data; callers conjugate for
// helicity -1. Returns false at an exact pole.
bool rational_parts(const VortexConfiguration& config, Complex z, Complex& f, Complex& fp) {
    const int n = config.winding;
    const double r0 = config.core_radius();
    Complex fsum{0.0, 0.0}, psum{0.0, 0.0};
    for (const auto& hole : config.holes) {
        const Complex d = z - hole.center;
        if (d == Complex{0.0, 0.0}) return false;
        const Complex w = r0 / d;
        const Complex wn = ipow(w, n);
        fsum += wn;
        psum += wn * w;
    }
    f = fsum;
    fp = -(static_cast<double>(n) / r0) * psum;
    return true;
}

}  // namespace

Complex rational_f(const VortexConfiguration& config, Complex z) {
    Complex f, fp;
    if (!rational_parts(config, z, f, fp))
        throw std::domain_error("rational_f: evaluation at a pole");
    return config.helicity > 0 ? f : std::conj(f);
}

Complex f_prime(const VortexConfiguration& config, Complex z) {
    Complex f, fp;
    if (!rational_parts(config, z, f, fp))
        throw std::domain_error("f_prime: evaluation at a pole");
    return config.helicity > 0 ? fp : std::conj(fp);
}

double charge_density_at(const VortexConfiguration& config, double x, double y) {
    Complex f, fp;
    if (!rational_parts(config, Complex(x, y), f, fp)) return 0.0;
    const double af = std::abs(f);
    const double apf = std::abs(fp);
    if (!std::isfinite(af) || !std::isfinite(apf) || af > kPoleLimit || apf > kPoleLimit)
        return 0.0;
    const double denom = 1.0 + af * af;
    const double ratio = apf / denom;
    return 4.0 * config.constants.C() * ratio * ratio;
}

Complex wavefunction_at(const VortexConfiguration& config, double x, double y) {
    Complex f, fp;
    if (!rational_parts(config, Complex(x, y), f, fp)) return Complex{0.0, 0.0};
    const double af = std::abs(f);
    const double apf = std::abs(fp);
    if (!std::isfinite(af) || !std::isfinite(apf) || af > kPoleLimit || apf > kPoleLimit)
        return Complex{0.0, 0.0};
    const Complex psi = 2.0 * std::sqrt(config.constants.C()) * fp / (1.0 + af * af);
    return config.helicity > 0 ? psi : std::conj(psi);
}

ScalarField charge_density(const VortexConfiguration& config, const GridSpec& spec) {
    ScalarField rho(spec);
    for_each_row(spec.ny, [&](int iy) {
        const double y = spec.y(iy);
        for (int ix = 0; ix < spec.nx; ++ix)
            rho.at(ix, iy) = charge_density_at(config, spec.x(ix), y);
    });
    return rho;
}

ComplexField wavefunction(const VortexConfiguration& config, const GridSpec& spec) {
    ComplexField psi(spec);
    for_each_row(spec.ny, [&](int iy) {
        const double y = spec.y(iy);
        for (int ix = 0; ix < spec.nx; ++ix)
            psi.at(ix, iy) = wavefunction_at(config, spec.x(ix), y);
    });
    return psi;
}

SpinCurrent spin_current(const VortexConfiguration& config, const GridSpec& spec) {
    const ScalarField rho = charge_density(config, spec);
    const double s = 0.5 * config.helicity;
    const double inv2hx = 1.0 / (2.0 * spec.hx());
    const double inv2hy = 1.0 / (2.0 * spec.hy());
    SpinCurrent cur{ScalarField(spec), ScalarField(spec)};
    for_each_row(spec.ny, [&](int iy) {
        if (iy == 0 || iy == spec.ny - 1) return;
        for (int ix = 1; ix < spec.nx - 1; ++ix) {
            cur.jx.at(ix, iy) = s * (rho.at(ix, iy + 1) - rho.at(ix, iy - 1)) * inv2hy;
            cur.jy.at(ix, iy) = -s * (rho.at(ix + 1, iy) - rho.at(ix - 1, iy)) * inv2hx;
        }
    });
    return cur;
}

double total_flux(const VortexConfiguration& config, const GridSpec& spec) {
    return -integrate(charge_density(config, spec)) / config.constants.kappa;
}

double flux_tail_bound(const VortexConfiguration& config, const GridSpec& spec) {
    const double r0 = config.core_radius();
    const int n = config.winding;
    double total = 0.0;
    for (const auto& hole : config.holes) {
        const double rx = spec.half_extent_x - std::abs(hole.center.real());
        const double ry = spec.half_extent_y - std::abs(hole.center.imag());
        const double edge = std::max(std::min(rx, ry), r0);
        total += std::pow(r0 / edge, 2 * n);
    }
    return total / static_cast<double>(config.holes.size());
}

ScalarField register_density(const VortexRegister& reg, const GridSpec& spec) {
    if (reg.entries.empty()) throw ConfigError("register_density: empty register");
    ScalarField total(spec);
    for (const auto& entry : reg.entries) {
        const VortexConfiguration single({entry.hole}, entry.winding, entry.helicity,
                                         reg.constants);
        const ScalarField rho = charge_density(single, spec);
        for (std::size_t i = 0; i < total.values.size(); ++i) total.values[i] += rho.values[i];
    }
    return total;
}

namespace {

// f'' for Newton polish of f' zeros (helicity +1 data).
Complex f_second(const VortexConfiguration& config, Complex z) {
    const int n = config.winding;
    const double r0 = config.core_radius();
    Complex sum{0.0, 0.0};
    for (const auto& hole : config.holes) {
        const Complex w = r0 / (z - hole.center);
        sum += ipow(w, n + 2);
    }
    return (static_cast<double>(n) * (n + 1) / (r0 * r0)) * sum;
}

}  // namespace

std::vector<Complex> f_prime_zeros(const VortexConfiguration& config, const GridSpec& spec) {
    // |f'| sampled on the grid; strict local minima seed a Newton polish.
    ScalarField amp(spec);
    for_each_row(spec.ny, [&](int iy) {
        const double y = spec.y(iy);
        for (int ix = 0; ix < spec.nx; ++ix) {
            Complex f, fp;
            amp.at(ix, iy) = rational_parts(config, Complex(spec.x(ix), y), f, fp)
                                 ? std::abs(fp)
                                 : std::numeric_limits<double>::infinity();
        }
    });

    std::vector<Complex> zeros;
    const double r0 = config.core_radius();
    for (int iy = 1; iy < spec.ny - 1; ++iy) {
        for (int ix = 1; ix < spec.nx - 1; ++ix) {
            const double c = amp.at(ix, iy);
            bool is_min = true;
            for (int dy = -1; dy <= 1 && is_min; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    if (amp.at(ix + dx, iy + dy) < c) {
                        is_min = false;
                        break;
                    }
                }
            if (!is_min) continue;

            Complex z(spec.x(ix), spec.y(iy));
            bool converged = false;
            for (int it = 0; it < 60; ++it) {
                Complex f, fp;
                if (!rational_parts(config, z, f, fp)) break;
                const Complex fpp = f_second(config, z);
                if (std::abs(fpp) == 0.0) break;
                const Complex step = fp / fpp;
                z -= step;
                if (std::abs(step) < 1e-13 * r0) {
                    converged = true;
                    break;
                }
            }
            if (!converged) continue;
            Complex f, fp;
            if (!rational_parts(config, z, f, fp) || std::abs(fp) > 1e-9) continue;
            if (std::abs(z.real()) > spec.half_extent_x || std::abs(z.imag()) > spec.half_extent_y)
                continue;
            bool near_pole = false;
            for (const auto& hole : config.holes)
                if (std::abs(z - hole.center) < 1e-6 * r0) near_pole = true;
            if (near_pole) continue;
            bool dup = false;
            for (const auto& existing : zeros)
                if (std::abs(existing - z) < 1e-6 * r0) dup = true;
            if (!dup) zeros.push_back(z);
        }
    }
    return zeros;
}

LiouvilleReport liouville_residual(const VortexConfiguration& config, const GridSpec& spec,
                                   double mask_radius) {
    if (mask_radius <= 0.0) mask_radius = 2.0 * std::max(spec.hx(), spec.hy());

    const ScalarField rho = charge_density(config, spec);

    ScalarField log_rho(spec);
    GridMask defined(spec, true);
    for (std::size_t i = 0; i < rho.values.size(); ++i) {
        if (rho.values[i] > 0.0) {
            log_rho.values[i] = std::log(rho.values[i]);
        } else {
            defined.on[i] = 0;
        }
    }

    GridMask mask = interior_mask(spec, 1);
    for (const auto& hole : config.holes) mask_disk(mask, hole.center, mask_radius);
    for (const auto& zero : f_prime_zeros(config, spec)) mask_disk(mask, zero, mask_radius);
    // The 5-point stencil must not touch a cell where ln rho is undefined.
    for (int iy = 1; iy < spec.ny - 1; ++iy)
        for (int ix = 1; ix < spec.nx - 1; ++ix) {
            const bool ok = defined.on[spec.index(ix, iy)] && defined.on[spec.index(ix - 1, iy)] &&
                            defined.on[spec.index(ix + 1, iy)] &&
                            defined.on[spec.index(ix, iy - 1)] &&
                            defined.on[spec.index(ix, iy + 1)];
            if (!ok) mask.on[spec.index(ix, iy)] = 0;
        }

    const ScalarField lap = laplacian(log_rho);
    const double two_over_c = 2.0 / config.constants.C();
    LiouvilleReport report;
    report.residual = ScalarField(spec);
    for (std::size_t i = 0; i < rho.values.size(); ++i)
        report.residual.values[i] = lap.values[i] + two_over_c * rho.values[i];
    report.mask = std::move(mask);
    report.max_density = masked_max_abs(rho, interior_mask(spec, 0));
    report.median_abs_normalized =
        masked_median_abs(report.residual, report.mask) / report.max_density;
    return report;
}

}  // namespace vsense
