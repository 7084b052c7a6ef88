#pragma once

// Brute-force Fourier transform of a density on a surface of revolution in
// R^3: Gamma = {(g(z) cos t, g(z) sin t, z)}, dGamma = g sqrt(1 + g'^2) dz dt,
//   (f dGamma)^(xi) = int int f(z, t) e^{-i (g(z) rho cos(t - phi) + z zeta)} dGamma,
// with xi = (rho cos phi, rho sin phi, zeta). Composite Gauss in z, trapezoid
// in t (periodic, so geometric convergence once nodes exceed rho * sup g).

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>

#include "restriction_lab/quadrature.hpp"

namespace restriction_lab::oracles {

inline std::complex<double> surface_fourier_transform(const std::function<double(double, double)>& f,
                                                      const std::function<double(double)>& g,
                                                      const std::function<double(double)>& dg, double z_lo,
                                                      double z_hi, double rho, double phi, double zeta,
                                                      int z_panels = 64, int t_nodes = 0) {
    const auto rule = quadrature::composite_gauss(z_lo, z_hi, 16, (z_hi - z_lo) / z_panels);
    double g_max = 0.0;
    for (double z : rule.nodes) g_max = std::max(g_max, g(z));
    if (t_nodes <= 0) t_nodes = 2 * static_cast<int>(rho * g_max) + 96;
    std::complex<double> total{};
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const double z = rule.nodes[i];
        const double gz = g(z);
        const double area = gz * std::sqrt(1.0 + dg(z) * dg(z));
        std::complex<double> ring{};
        for (int l = 0; l < t_nodes; ++l) {
            const double t = 2.0 * std::numbers::pi * l / t_nodes;
            ring += f(z, t) * std::polar(1.0, -(gz * rho * std::cos(t - phi) + z * zeta));
        }
        total += rule.weights[i] * area * ring * (2.0 * std::numbers::pi / t_nodes);
    }
    return total;
}

}  // namespace restriction_lab::oracles
