#pragma once

// Surface side of the extension/restriction pairing for a Gaussian probe
//   h(xi) = exp(-|xi - c|^2 / (2 sigma^2)),
//   h^(x) = int h(xi) e^{-i x.xi} dxi = (2 pi sigma^2)^{3/2} e^{-sigma^2 |x|^2 / 2} e^{-i x.c},
// integrated against f dGamma directly on the surface (trapezoid in z on the
// given weights, trapezoid in the angle).

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

namespace restriction_lab::oracles {

inline std::complex<double> gaussian_transform(double cx, double cy, double cz, double sigma, double x, double y,
                                               double z) {
    const double amp = std::pow(2.0 * std::numbers::pi * sigma * sigma, 1.5);
    return amp * std::exp(-0.5 * sigma * sigma * (x * x + y * y + z * z)) * std::polar(1.0, -(x * cx + y * cy + z * cz));
}

/// sum_l w_l G1_l int f(z_l, t) h^(g_l cos t, g_l sin t, z_l) dt.
inline std::complex<double> pairing_surface_side(const std::function<double(int l, double t)>& f,
                                                 const std::vector<double>& z, const std::vector<double>& g,
                                                 const std::vector<double>& G1, const std::vector<double>& w,
                                                 double cx, double cy, double cz, double sigma, int t_nodes = 256) {
    std::complex<double> total{};
    for (std::size_t l = 0; l < z.size(); ++l) {
        std::complex<double> ring{};
        for (int i = 0; i < t_nodes; ++i) {
            const double t = 2.0 * std::numbers::pi * i / t_nodes;
            ring += f(static_cast<int>(l), t) *
                    gaussian_transform(cx, cy, cz, sigma, g[l] * std::cos(t), g[l] * std::sin(t), z[l]);
        }
        total += w[l] * G1[l] * ring * (2.0 * std::numbers::pi / t_nodes);
    }
    return total;
}

}  // namespace restriction_lab::oracles
