#pragma once

// Independent oracles for the test suites. Everything here is computed
// from first principles (log-radial quadrature, finite differences,
// brute-force scans) without touching the grid quadrature or recall paths
// under test.

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

namespace oracles {

using Complex = std::complex<double>;

// Integral over the plane of a radial profile g(r), i.e. 2*pi * int g(r) r dr,
// with the substitution r = e^s (trapezoid in s; both tails must decay).
template <class G>
double radial_plane_integral(G&& g, double s_lo = -18.0, double s_hi = 18.0, int n = 12001) {
    const double h = (s_hi - s_lo) / (n - 1);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double s = s_lo + i * h;
        const double r = std::exp(s);
        const double v = g(r) * r * r;  // g(r) * r dr, dr = r ds
        sum += (i == 0 || i == n - 1) ? 0.5 * v : v;
    }
    return 2.0 * M_PI * sum * h;
}

// Closed-form radial profile of the single-vortex charge density with the
// hole at the origin: rho(r) = 4 C n^2 r0^(2n) r^(2n-2) / (r^(2n)+r0^(2n))^2.
inline double single_vortex_density(double r, int n, double r0, double C) {
    const double rn = std::pow(r, 2 * n);
    const double r0n = std::pow(r0, 2 * n);
    const double denom = rn + r0n;
    return 4.0 * C * n * n * r0n * std::pow(r, 2 * n - 2) / (denom * denom);
}

// Matching |Psi|(r) = sqrt(rho).
inline double single_vortex_amplitude(double r, int n, double r0, double C) {
    return std::sqrt(single_vortex_density(r, n, r0, C));
}

// Pullback area of the degree-n map f = (r0/z)^n under the unit-sphere
// metric: int |f'|^2 / (1+|f|^2)^2 dA. Equals n*pi for any r0.
inline double fubini_study_area(int n, double r0) {
    return radial_plane_integral([&](double r) {
        const double apf = n * std::pow(r0, n) / std::pow(r, n + 1);
        const double af2 = std::pow(r0 / r, 2 * n);
        const double t = apf / (1.0 + af2);
        return t * t;
    });
}

// Centered finite difference of a complex map along the real axis.
template <class F>
Complex centered_derivative(F&& f, Complex z, double eps) {
    return (f(z + Complex(eps, 0.0)) - f(z - Complex(eps, 0.0))) / (2.0 * eps);
}

// Brute-force argmax of |<pattern_k, input>| over stored patterns;
// lowest index wins ties.
inline std::size_t brute_force_winner(const std::vector<std::vector<Complex>>& stored,
                                      const std::vector<Complex>& input) {
    std::size_t best = 0;
    double best_mag = -1.0;
    for (std::size_t k = 0; k < stored.size(); ++k) {
        Complex acc{0.0, 0.0};
        for (std::size_t i = 0; i < input.size(); ++i) acc += std::conj(stored[k][i]) * input[i];
        const double mag = std::abs(acc);
        if (mag > best_mag) {
            best_mag = mag;
            best = k;
        }
    }
    return best;
}

// Window mean of the effective field computed straight from the pixel
// array: same bilinear map and the same linear transduction, plain loops.
struct PixelWindowOracle {
    int img_w = 0, img_h = 0;
    const double* pixels = nullptr;  // row-major, top row first, in [0,1]
    double half_x = 0.0, half_y = 0.0;
    int nx = 0, ny = 0;
    double gain = 1.0;
    bool bipolar = false;
    double kappa = 1.0;

    double raster(double u, double v) const {
        u = std::min(std::max(u, 0.0), static_cast<double>(img_w - 1));
        v = std::min(std::max(v, 0.0), static_cast<double>(img_h - 1));
        int px = static_cast<int>(std::floor(u));
        int py = static_cast<int>(std::floor(v));
        px = std::min(px, img_w - 2 >= 0 ? img_w - 2 : 0);
        py = std::min(py, img_h - 2 >= 0 ? img_h - 2 : 0);
        if (img_w == 1) px = 0;
        if (img_h == 1) py = 0;
        const int px1 = std::min(px + 1, img_w - 1);
        const int py1 = std::min(py + 1, img_h - 1);
        const double fx = u - px, fy = v - py;
        const auto at = [&](int x, int y) { return pixels[static_cast<std::size_t>(y) * img_w + x]; };
        return at(px, py) * (1 - fx) * (1 - fy) + at(px1, py) * fx * (1 - fy) +
               at(px, py1) * (1 - fx) * fy + at(px1, py1) * fx * fy;
    }

    double window_mean_b_eff(double cx, double cy, double radius) const {
        const double hx = 2.0 * half_x / nx;
        const double hy = 2.0 * half_y / ny;
        const double sx = img_w / (2.0 * half_x);
        const double sy = img_h / (2.0 * half_y);
        double sum = 0.0;
        long long count = 0;
        for (int iy = 0; iy < ny; ++iy) {
            const double y = -half_y + (iy + 0.5) * hy;
            for (int ix = 0; ix < nx; ++ix) {
                const double x = -half_x + (ix + 0.5) * hx;
                const double dx = x - cx, dy = y - cy;
                if (dx * dx + dy * dy > radius * radius) continue;
                const double I = raster((x + half_x) * sx - 0.5, (half_y - y) * sy - 0.5);
                const double rho = bipolar ? gain * (2.0 * I - 1.0) : gain * I;
                sum += -rho / kappa;
                ++count;
            }
        }
        return sum / static_cast<double>(count);
    }
};

}  // namespace oracles
