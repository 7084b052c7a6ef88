#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "restriction_lab/array.hpp"
#include "restriction_lab/profile.hpp"
#include "restriction_lab/quadrature.hpp"

namespace restriction_lab::spherical {

/// Y_k^j: degree k >= 0, member j in [1, d(k)].
struct HarmonicIndex {
    int degree = 0;
    int member = 1;
    friend bool operator==(const HarmonicIndex&, const HarmonicIndex&) = default;
};

inline void check_dimension(int n) {
    if (n != 2 && n != 3) throw std::invalid_argument("spherical harmonics: n must be 2 or 3");
}

/// Number of members d(k) of degree k on S^{n-1}.
inline int multiplicity(int n, int k) {
    check_dimension(n);
    if (n == 2) return k == 0 ? 1 : 2;
    return 2 * k + 1;
}

/// Harmonics of degree <= k_max.
inline int harmonic_count(int n, int k_max) {
    check_dimension(n);
    return n == 2 ? 2 * k_max + 1 : (k_max + 1) * (k_max + 1);
}

inline bool valid(int n, HarmonicIndex idx) {
    return idx.degree >= 0 && idx.member >= 1 && idx.member <= multiplicity(n, idx.degree);
}

/// Position of Y_k^j in degree-major order.
inline int flat_index(int n, HarmonicIndex idx) {
    if (!valid(n, idx)) throw std::invalid_argument("invalid harmonic index");
    const int k = idx.degree;
    const int offset = n == 2 ? (k == 0 ? 0 : 2 * k - 1) : k * k;
    return offset + idx.member - 1;
}

inline HarmonicIndex from_flat(int n, int flat) {
    check_dimension(n);
    if (flat < 0) throw std::invalid_argument("negative flat harmonic index");
    if (n == 2) return flat == 0 ? HarmonicIndex{0, 1} : HarmonicIndex{(flat + 1) / 2, 2 - flat % 2};
    const int k = static_cast<int>(std::sqrt(static_cast<double>(flat)));
    return {k, flat - k * k + 1};
}

/// Point on S^{n-1}. On S^1 only theta is used; on S^2 theta is the polar
/// angle from the north pole and phi the azimuth.
struct SpherePoint {
    double theta = 0.0;
    double phi = 0.0;
};

/// Real orthonormal harmonic. S^1: 1/sqrt(2pi), cos(k theta)/sqrt(pi) (j=1),
/// sin(k theta)/sqrt(pi) (j=2). S^2: order m = j - k - 1 in [-k, k]; m = 0 is
/// the zonal member, m > 0 carries cos(m phi), m < 0 sin(|m| phi).
inline double harmonic(int n, HarmonicIndex idx, SpherePoint x) {
    if (!valid(n, idx)) throw std::invalid_argument("invalid harmonic index");
    const int k = idx.degree;
    if (n == 2) {
        if (k == 0) return 1.0 / std::sqrt(2.0 * std::numbers::pi);
        const double c = 1.0 / std::sqrt(std::numbers::pi);
        return idx.member == 1 ? c * std::cos(k * x.theta) : c * std::sin(k * x.theta);
    }
    const int m = idx.member - k - 1;
    const unsigned am = static_cast<unsigned>(std::abs(m));
    const double legendre = std::sph_legendre(static_cast<unsigned>(k), am, x.theta);
    if (m == 0) return legendre;
    return std::numbers::sqrt2 * legendre * (m > 0 ? std::cos(m * x.phi) : std::sin(am * x.phi));
}

/// Angular quadrature on S^{n-1}.
struct AngularQuadrature {
    int n = 2;
    int exact_degree = 0;  // integrates products of harmonics up to this total degree
    std::vector<SpherePoint> points;
    std::vector<double> weights;

    [[nodiscard]] std::size_t size() const noexcept { return points.size(); }
};

/// S^1: trapezoid on `nodes` equispaced angles (exact for trigonometric
/// polynomials of degree < nodes). S^2: `nodes` Gauss-Legendre points in
/// cos(theta) times 2*nodes equispaced azimuths.
inline AngularQuadrature angular_quadrature(int n, int nodes) {
    check_dimension(n);
    if (nodes < 1) throw std::invalid_argument("angular quadrature needs at least one node");
    AngularQuadrature q;
    q.n = n;
    const double two_pi = 2.0 * std::numbers::pi;
    if (n == 2) {
        q.exact_degree = nodes - 1;
        for (int i = 0; i < nodes; ++i) {
            q.points.push_back({two_pi * i / nodes, 0.0});
            q.weights.push_back(two_pi / nodes);
        }
        return q;
    }
    const int azimuths = 2 * nodes;
    q.exact_degree = std::min(2 * nodes - 1, azimuths - 1);
    const auto& gl = quadrature::gauss_legendre(nodes);
    for (int i = 0; i < nodes; ++i) {
        const double theta = std::acos(gl.nodes[i]);
        for (int l = 0; l < azimuths; ++l) {
            q.points.push_back({theta, two_pi * l / azimuths});
            q.weights.push_back(gl.weights[i] * two_pi / azimuths);
        }
    }
    return q;
}

/// Default quadrature for band limit k_max: 4 k_max angles on S^1,
/// (k_max + 1) x (2 k_max + 2) on S^2.
inline AngularQuadrature default_quadrature(int n, int k_max) {
    return n == 2 ? angular_quadrature(2, std::max(4, 4 * k_max)) : angular_quadrature(3, k_max + 1);
}

/// Coefficients a_{k,j}(z_i) of a function on the surface, harmonics in
/// degree-major order by rows, z samples by columns.
class CoefficientField {
public:
    CoefficientField() = default;
    CoefficientField(int n, int k_max, quadrature::UniformGrid z)
        : n_(n), k_max_(k_max), z_(z), data_(harmonic_count(n, k_max), static_cast<std::size_t>(z.count), 0.0) {
        if (k_max < 0) throw std::invalid_argument("k_max must be >= 0");
        if (z.count < 1) throw std::invalid_argument("z grid must be nonempty");
    }

    [[nodiscard]] int n() const noexcept { return n_; }
    [[nodiscard]] int k_max() const noexcept { return k_max_; }
    [[nodiscard]] const quadrature::UniformGrid& z() const noexcept { return z_; }
    [[nodiscard]] int harmonics() const noexcept { return static_cast<int>(data_.rows()); }
    [[nodiscard]] HarmonicIndex index(int flat) const { return from_flat(n_, flat); }

    double& operator()(HarmonicIndex idx, int zi) { return data_(flat_index(n_, idx), zi); }
    double operator()(HarmonicIndex idx, int zi) const { return data_(flat_index(n_, idx), zi); }
    std::span<double> row(int flat) { return data_.row(flat); }
    std::span<const double> row(int flat) const { return data_.row(flat); }
    Array2D<double>& data() noexcept { return data_; }
    const Array2D<double>& data() const noexcept { return data_; }

    void write_csv(std::ostream& out) const {
        out << "k,j,z_index,value\n";
        char buf[64];
        for (int h = 0; h < harmonics(); ++h) {
            const HarmonicIndex idx = index(h);
            for (int zi = 0; zi < z_.count; ++zi) {
                std::snprintf(buf, sizeof buf, "%.15g", data_(h, zi));
                out << idx.degree << ',' << idx.member << ',' << zi << ',' << buf << '\n';
            }
        }
    }

private:
    int n_ = 2;
    int k_max_ = 0;
    quadrature::UniformGrid z_{};
    Array2D<double> data_;
};

inline void require_exact(const AngularQuadrature& q, int k_max) {
    if (q.exact_degree < 2 * k_max)
        throw std::invalid_argument("angular quadrature not exact to degree 2*k_max (" +
                                    std::to_string(q.exact_degree) + " < " + std::to_string(2 * k_max) + ")");
}

/// Projects samples f(z_i, x_l) (rows z, columns quadrature nodes) onto the
/// harmonics up to k_max.
inline CoefficientField expand(const Array2D<double>& samples, const AngularQuadrature& q,
                               quadrature::UniformGrid z, int k_max) {
    require_exact(q, k_max);
    if (samples.rows() != static_cast<std::size_t>(z.count) || samples.cols() != q.size())
        throw std::invalid_argument("expand: sample shape does not match grids");
    CoefficientField field(q.n, k_max, z);
    const int hcount = field.harmonics();
    Array2D<double> basis(hcount, q.size());
    for (int h = 0; h < hcount; ++h)
        for (std::size_t l = 0; l < q.size(); ++l)
            basis(h, l) = harmonic(q.n, field.index(h), q.points[l]) * q.weights[l];
    for (int h = 0; h < hcount; ++h)
        for (int zi = 0; zi < z.count; ++zi) {
            double sum = 0.0;
            const auto srow = samples.row(zi);
            const auto brow = basis.row(h);
            for (std::size_t l = 0; l < q.size(); ++l) sum += brow[l] * srow[l];
            field.data()(h, zi) = sum;
        }
    return field;
}

/// Samples f on z-grid x quadrature nodes and expands.
inline CoefficientField expand(const std::function<double(double, SpherePoint)>& f, int n,
                               quadrature::UniformGrid z, int k_max) {
    const AngularQuadrature q = default_quadrature(n, k_max);
    Array2D<double> samples(z.count, q.size());
    for (int zi = 0; zi < z.count; ++zi)
        for (std::size_t l = 0; l < q.size(); ++l) samples(zi, l) = f(z.at(zi), q.points[l]);
    return expand(samples, q, z, k_max);
}

/// Evaluates sum_{k,j} a_{k,j}(z_i) Y_k^j(x_l); rows z, columns points.
inline Array2D<double> reconstruct(const CoefficientField& field, const std::vector<SpherePoint>& points) {
    const int hcount = field.harmonics();
    Array2D<double> basis(hcount, points.size());
    for (int h = 0; h < hcount; ++h)
        for (std::size_t l = 0; l < points.size(); ++l) basis(h, l) = harmonic(field.n(), field.index(h), points[l]);
    Array2D<double> out(field.z().count, points.size());
    for (int zi = 0; zi < field.z().count; ++zi)
        for (int h = 0; h < hcount; ++h) {
            const double a = field.data()(h, zi);
            if (a == 0.0) continue;
            const auto brow = basis.row(h);
            auto orow = out.row(zi);
            for (std::size_t l = 0; l < points.size(); ++l) orow[l] += a * brow[l];
        }
    return out;
}

/// Area factor G1 = g^{n-1} sqrt(1 + g'^2) on the profile grid.
inline std::vector<double> area_factor(const ProfileFunction& profile, int n) {
    std::vector<double> g1(profile.size());
    for (std::size_t i = 0; i < g1.size(); ++i)
        g1[i] = std::pow(profile.g[i], n - 1) * std::sqrt(1.0 + profile.dg[i] * profile.dg[i]);
    return g1;
}

/// ||f||^2_{L^2(Gamma)} = sum_{k,j} int |a_{k,j}(z)|^2 G1(z) dz (composite Simpson).
inline double plancherel_l2_on_gamma(const CoefficientField& field, const ProfileFunction& profile) {
    if (!(field.z() == profile.z)) throw std::invalid_argument("plancherel: field and profile grids differ");
    const std::vector<double> g1 = area_factor(profile, field.n());
    const std::vector<double> w = quadrature::simpson_weights(field.z());
    double total = 0.0;
    for (int h = 0; h < field.harmonics(); ++h) {
        const auto a = field.row(h);
        for (int zi = 0; zi < field.z().count; ++zi) total += w[zi] * g1[zi] * a[zi] * a[zi];
    }
    return total;
}

}  // namespace restriction_lab::spherical
