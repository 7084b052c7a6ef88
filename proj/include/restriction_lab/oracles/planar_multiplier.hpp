#pragma once

// Dense planar reference for a radial Fourier multiplier: sample F(x) = f(|x|)
// on an N x N periodic box of side L, forward DFT, multiply by m(|xi|) with
// xi = 2 pi k / L, inverse DFT. For radial output the L^p_rad L^2_ang norm is
//   ( (2 pi)^{p/2 - 1} int |F|^p dx )^{1/p}.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

namespace restriction_lab::oracles {

struct PlanarMultiplierResult {
    int n_grid = 0;
    double box = 0.0;
    std::vector<double> values;  // T_m F on the grid, row-major, x = (i - N/2) h
    [[nodiscard]] double step() const { return box / n_grid; }

    [[nodiscard]] double mixed_norm(double p) const {
        const double h = step();
        double sum = 0.0;
        for (double v : values) sum += std::pow(std::abs(v), p);
        return std::pow(std::pow(2.0 * std::numbers::pi, 0.5 * p - 1.0) * sum * h * h, 1.0 / p);
    }
};

inline PlanarMultiplierResult planar_radial_multiplier(const std::function<double(double)>& f,
                                                       const std::function<double(double)>& m, int n_grid = 1024,
                                                       double box = 128.0) {
    if (n_grid < 2 || n_grid % 2 != 0) throw std::invalid_argument("planar oracle: grid size must be even");
    const std::size_t N = static_cast<std::size_t>(n_grid);
    const double h = box / n_grid;
    auto* data = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * N * N));
    if (data == nullptr) throw std::bad_alloc();
    fftw_plan fwd = fftw_plan_dft_2d(n_grid, n_grid, data, data, FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_plan inv = fftw_plan_dft_2d(n_grid, n_grid, data, data, FFTW_BACKWARD, FFTW_ESTIMATE);
    // Index i <-> coordinate (i - N/2) h, stored with an ifftshift so the DFT
    // phase is the plain e^{-i x xi}.
    auto wrap = [N](std::size_t i) { return (i + N / 2) % N; };
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) {
            const double x = (static_cast<double>(i) - n_grid / 2) * h;
            const double y = (static_cast<double>(j) - n_grid / 2) * h;
            auto& cell = data[wrap(i) * N + wrap(j)];
            cell[0] = f(std::hypot(x, y));
            cell[1] = 0.0;
        }
    fftw_execute(fwd);
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) {
            const double ki = i < N / 2 ? static_cast<double>(i) : static_cast<double>(i) - n_grid;
            const double kj = j < N / 2 ? static_cast<double>(j) : static_cast<double>(j) - n_grid;
            const double xi = 2.0 * std::numbers::pi * std::hypot(ki, kj) / box;
            const double w = m(xi) / static_cast<double>(N * N);
            data[i * N + j][0] *= w;
            data[i * N + j][1] *= w;
        }
    fftw_execute(inv);
    PlanarMultiplierResult out{n_grid, box, std::vector<double>(N * N)};
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) out.values[i * N + j] = data[wrap(i) * N + wrap(j)][0];
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(inv);
    fftw_free(data);
    return out;
}

}  // namespace restriction_lab::oracles
