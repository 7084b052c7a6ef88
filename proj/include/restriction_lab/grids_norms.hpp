#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

#include "restriction_lab/array.hpp"
#include "restriction_lab/quadrature.hpp"
#include "restriction_lab/spherical.hpp"

namespace restriction_lab {

namespace detail {
inline double abs2(double x) { return x * x; }
inline double abs2(const std::complex<double>& x) { return std::norm(x); }
}  // namespace detail

/// One radial integration block: [0, 1) for the origin panel (m = -1), or the
/// dyadic block [2^m, 2^{m+1}). Nodes [begin, end) of the grid fall inside.
struct RadialBlock {
    int m = -1;
    double lo = 0.0;
    double hi = 1.0;
    std::size_t begin = 0;
    std::size_t end = 0;
};

/// Gauss-Legendre nodes over [0, r_max] = [0,1) u [1,2) u [2,4) u ... with
/// r_max a power of two.
class RadialGrid {
public:
    /// `nodes_per_block` Gauss nodes per panel; a block wider than
    /// `max_panel_width` is split into equal panels (for oscillatory
    /// integrands whose period does not shrink with the block).
    static RadialGrid dyadic(double r_max = 1024.0, int nodes_per_block = 16,
                             double max_panel_width = std::numeric_limits<double>::infinity()) {
        const double lg = std::log2(r_max);
        if (!(r_max >= 1.0) || std::abs(lg - std::round(lg)) > 1e-12)
            throw std::invalid_argument("radial grid: r_max must be a power of two >= 1");
        if (nodes_per_block < 1) throw std::invalid_argument("radial grid: nodes_per_block must be >= 1");
        RadialGrid grid;
        grid.r_max_ = r_max;
        const int blocks = static_cast<int>(std::lround(lg));
        for (int m = -1; m < blocks; ++m) {
            const double lo = m < 0 ? 0.0 : std::ldexp(1.0, m);
            const double hi = std::ldexp(1.0, m + 1);
            RadialBlock block{m, lo, hi, grid.rule_.size(), 0};
            const quadrature::Rule panel = quadrature::composite_gauss(lo, hi, nodes_per_block, max_panel_width);
            grid.rule_.nodes.insert(grid.rule_.nodes.end(), panel.nodes.begin(), panel.nodes.end());
            grid.rule_.weights.insert(grid.rule_.weights.end(), panel.weights.begin(), panel.weights.end());
            block.end = grid.rule_.size();
            grid.blocks_.push_back(block);
        }
        return grid;
    }

    [[nodiscard]] std::size_t size() const noexcept { return rule_.size(); }
    [[nodiscard]] double r_max() const noexcept { return r_max_; }
    [[nodiscard]] const std::vector<double>& nodes() const noexcept { return rule_.nodes; }
    [[nodiscard]] const std::vector<double>& weights() const noexcept { return rule_.weights; }
    [[nodiscard]] const std::vector<RadialBlock>& blocks() const noexcept { return blocks_; }
    [[nodiscard]] const quadrature::Rule& rule() const noexcept { return rule_; }

private:
    double r_max_ = 1.0;
    quadrature::Rule rule_;
    std::vector<RadialBlock> blocks_;
};

/// Per-harmonic radial samples f_{k,j}(r_i): rows harmonics, columns radial
/// nodes of an associated RadialGrid.
template <class T = double>
struct RadialCoefficients {
    int n = 2;
    int k_max = 0;
    Array2D<T> values;

    RadialCoefficients() = default;
    RadialCoefficients(int n_, int k_max_, std::size_t nodes)
        : n(n_), k_max(k_max_), values(spherical::harmonic_count(n_, k_max_), nodes) {}

    [[nodiscard]] int harmonics() const noexcept { return static_cast<int>(values.rows()); }
    [[nodiscard]] std::size_t nodes() const noexcept { return values.cols(); }
};

/// Mixed norm with its dyadic bookkeeping: per-block p-th powers, a
/// geometric estimate of the mass beyond r_max, and the corrected value.
struct MixedNormReport {
    double p = 2.0;
    double value = 0.0;            // (sum of block powers)^{1/p}
    std::vector<double> block_powers;  // same order as RadialGrid::blocks()
    double tail = 0.0;             // estimated p-th power mass beyond r_max (inf if blocks do not decay)
    double corrected = 0.0;        // (sum + tail)^{1/p}
};

/// Geometric continuation of the last two block masses.
inline double geometric_tail(const std::vector<double>& block_powers) {
    if (block_powers.size() < 3) return 0.0;
    const double last = block_powers.back();
    const double prev = block_powers[block_powers.size() - 2];
    if (last == 0.0) return 0.0;
    if (prev == 0.0) return std::numeric_limits<double>::infinity();
    const double q = last / prev;
    return q < 1.0 ? last * q / (1.0 - q) : std::numeric_limits<double>::infinity();
}

/// Integrates r^{n-1} |F(r_i)|^{p} where `square_at(i)` returns |F(r_i)|^2.
template <class SquareAt>
MixedNormReport mixed_norm_from_squares(const RadialGrid& grid, int n, double p, SquareAt&& square_at) {
    if (!(p >= 1.0)) throw std::invalid_argument("mixed norm: p must be >= 1");
    if (grid.size() == 0) throw std::invalid_argument("mixed norm: empty radial grid");
    MixedNormReport report;
    report.p = p;
    double total = 0.0;
    for (const RadialBlock& block : grid.blocks()) {
        double sum = 0.0;
        for (std::size_t i = block.begin; i < block.end; ++i) {
            const double r = grid.nodes()[i];
            const double sq = square_at(i);
            if (sq == 0.0) continue;
            sum += grid.weights()[i] * std::pow(r, n - 1) * std::pow(sq, 0.5 * p);
        }
        report.block_powers.push_back(sum);
        total += sum;
    }
    report.value = std::pow(total, 1.0 / p);
    report.tail = geometric_tail(report.block_powers);
    report.corrected = std::pow(total + report.tail, 1.0 / p);
    return report;
}

/// ||f||_{L^p_rad L^2_ang} = (int r^{n-1} (sum_{k,j} |f_{k,j}(r)|^2)^{p/2} dr)^{1/p}.
template <class T>
MixedNormReport mixed_norm_p2_detail(const RadialCoefficients<T>& f, const RadialGrid& grid, double p) {
    if (f.nodes() != grid.size()) throw std::invalid_argument("mixed norm: coefficients do not match the grid");
    return mixed_norm_from_squares(grid, f.n, p, [&](std::size_t i) {
        double sq = 0.0;
        for (int h = 0; h < f.harmonics(); ++h) sq += detail::abs2(f.values(h, i));
        return sq;
    });
}

template <class T>
double mixed_norm_p2(const RadialCoefficients<T>& f, const RadialGrid& grid, double p) {
    return mixed_norm_p2_detail(f, grid, p).value;
}

/// Samples f(r_i, z_l, x_m) on radial grid x uniform z-grid x angular nodes.
template <class T = double>
struct CylindricalSamples {
    int n = 2;
    quadrature::UniformGrid z;
    spherical::AngularQuadrature angles;
    std::size_t radial_nodes = 0;
    std::vector<T> values;  // index (i * z.count + l) * angles.size() + m

    CylindricalSamples() = default;
    CylindricalSamples(int n_, std::size_t radial, quadrature::UniformGrid z_, spherical::AngularQuadrature q)
        : n(n_), z(z_), angles(std::move(q)), radial_nodes(radial),
          values(radial * static_cast<std::size_t>(z_.count) * angles.size()) {}

    T& at(std::size_t i, int l, std::size_t m) { return values[(i * z.count + l) * angles.size() + m]; }
    const T& at(std::size_t i, int l, std::size_t m) const { return values[(i * z.count + l) * angles.size() + m]; }
};

/// ||f||_{L^{p,2,2}} = (int r^{n-1} (int int |f|^2 dtheta dz)^{p/2} dr)^{1/p};
/// Simpson in z, the angular quadrature in theta.
template <class T>
MixedNormReport mixed_norm_p22_detail(const CylindricalSamples<T>& f, const RadialGrid& grid, double p) {
    if (f.radial_nodes != grid.size()) throw std::invalid_argument("mixed norm: samples do not match the grid");
    const std::vector<double> wz = quadrature::simpson_weights(f.z);
    return mixed_norm_from_squares(grid, f.n, p, [&](std::size_t i) {
        double sq = 0.0;
        for (int l = 0; l < f.z.count; ++l)
            for (std::size_t m = 0; m < f.angles.size(); ++m)
                sq += wz[l] * f.angles.weights[m] * detail::abs2(f.at(i, l, m));
        return sq;
    });
}

template <class T>
double mixed_norm_p22(const CylindricalSamples<T>& f, const RadialGrid& grid, double p) {
    return mixed_norm_p22_detail(f, grid, p).value;
}

}  // namespace restriction_lab
