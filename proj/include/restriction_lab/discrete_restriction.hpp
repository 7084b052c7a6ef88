#pragma once

// Exponential sums with frequencies on a circle (or sphere, or parabola):
// the clustering statistic M, sup over unit squares of the windowed L^4
// norm, and a coefficient-space ascent for near-extremisers.
//
// Two scan routes:
//   * SummedArea: average |F|^p over cells of side h = 1/n <= 1/(8R),
//     prefix-sum once, read every unit window in O(1).
//   * Analytic (p = 4 only): |F|^4 = |F^2|^2 with F^2 = sum_p c_p e(s_p.x)
//     over pair sums, so the window integral is exact,
//       int_Q |F|^4 = sum_{p,q} c_p conj(c_q) sinc(eta_x) sinc(eta_y) e(eta.c),
//     eta = s_p - s_q. Centres are scanned on a coarse grid and refined
//     locally down to the requested step. This is what makes R = 10^4 feasible.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "restriction_lab/array.hpp"
#include "restriction_lab/errors.hpp"
#include "restriction_lab/parallel.hpp"

namespace restriction_lab::discrete {

using complex = std::complex<double>;
using Point = std::array<double, 3>;

inline double norm(const Point& p) { return std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]); }
inline double distance(const Point& a, const Point& b) {
    return norm(Point{a[0] - b[0], a[1] - b[1], a[2] - b[2]});
}

/// e(x) = exp(2 pi i x).
inline complex e(double x) { return std::polar(1.0, 2.0 * std::numbers::pi * x); }

inline double sinc(double u) {
    if (std::abs(u) < 1e-8) return 1.0 - (std::numbers::pi * u) * (std::numbers::pi * u) / 6.0;
    return std::sin(std::numbers::pi * u) / (std::numbers::pi * u);
}

/// Frequencies xi_k on the circle/sphere |xi| = R with coefficients a_k.
struct PointConfiguration {
    int dimension = 2;
    double R = 1.0;
    std::vector<Point> points;
    std::vector<complex> coefficients;

    [[nodiscard]] std::size_t size() const noexcept { return points.size(); }

    void validate() const {
        if (dimension != 2 && dimension != 3) throw std::invalid_argument("dimension must be 2 or 3");
        if (!(R > 0.0) || !std::isfinite(R)) throw std::invalid_argument("radius must be positive");
        if (coefficients.size() != points.size())
            throw std::invalid_argument("one coefficient per point required");
        for (const auto& p : points) {
            if (dimension == 2 && p[2] != 0.0) throw std::invalid_argument("planar point with nonzero z");
            if (std::abs(norm(p) - R) > 1e-9 * R) throw std::invalid_argument("point off the sphere |xi| = R");
        }
    }
};

/// Knots t_j (increasing, gaps >= 1) on the parabola gamma(t) = (t, t^2).
struct ParabolaConfiguration {
    std::vector<double> knots;
    std::vector<complex> coefficients;

    void validate() const {
        if (knots.empty()) throw std::invalid_argument("parabola needs at least one knot");
        if (coefficients.size() != knots.size()) throw std::invalid_argument("one coefficient per knot required");
        for (std::size_t j = 1; j < knots.size(); ++j)
            if (!(knots[j] - knots[j - 1] >= 1.0)) throw std::invalid_argument("knots must be 1-separated");
    }

    [[nodiscard]] std::vector<Point> frequencies() const {
        std::vector<Point> out;
        for (double t : knots) out.push_back({t, t * t, 0.0});
        return out;
    }
};

// ---------------------------------------------------------------------------
// Configuration generators

/// All (x, y) in Z^2 with x^2 + y^2 = N, unit coefficients, R = sqrt(N).
inline PointConfiguration lattice_points_on_circle(long long N) {
    if (N < 1) throw std::invalid_argument("lattice_points_on_circle: N must be positive");
    if (N > 100000000LL) throw std::out_of_range("lattice_points_on_circle: N above 1e8");
    PointConfiguration c;
    c.R = std::sqrt(static_cast<double>(N));
    const auto bound = static_cast<long long>(std::floor(c.R)) + 1;
    for (long long x = -bound; x <= bound; ++x) {
        const long long rest = N - x * x;
        if (rest < 0) continue;
        auto y = static_cast<long long>(std::llround(std::sqrt(static_cast<double>(rest))));
        while (y * y > rest) --y;
        while ((y + 1) * (y + 1) <= rest) ++y;
        if (y * y != rest) continue;
        c.points.push_back({double(x), double(y), 0.0});
        if (y != 0) c.points.push_back({double(x), double(-y), 0.0});
    }
    c.coefficients.assign(c.points.size(), complex(1.0, 0.0));
    return c;
}

/// Standard complex Gaussian coefficients.
inline std::vector<complex> random_coefficients(std::size_t K, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<complex> a(K);
    for (auto& v : a) {
        const double re = normal(rng);
        v = complex(re, normal(rng));
    }
    return a;
}

/// K points on the circle of radius R, pairwise more than R^{1/2} apart
/// (so M = 1), by rejection sampling of uniform angles.
inline PointConfiguration random_separated(double R, int K, std::uint64_t seed) {
    if (K < 1) throw std::invalid_argument("random_separated: K must be >= 1");
    PointConfiguration c;
    c.R = R;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    const double gap = std::sqrt(R) * (1.0 + 1e-9);
    for (int attempt = 0; static_cast<int>(c.points.size()) < K; ++attempt) {
        if (attempt > 100000) throw std::invalid_argument("random_separated: cannot place that many separated points");
        const double phi = angle(rng);
        const Point p{R * std::cos(phi), R * std::sin(phi), 0.0};
        if (std::all_of(c.points.begin(), c.points.end(), [&](const Point& q) { return distance(p, q) > gap; }))
            c.points.push_back(p);
    }
    c.coefficients.assign(c.points.size(), complex(1.0, 0.0));
    return c;
}

/// K points equally spaced on one arc whose end-to-end chord is just below
/// R^{1/2}: every pair is within R^{1/2}, so M = K.
inline PointConfiguration cap_cluster(double R, int K, double center_angle = 0.0) {
    if (K < 1) throw std::invalid_argument("cap_cluster: K must be >= 1");
    PointConfiguration c;
    c.R = R;
    const double span = 2.0 * std::asin(std::min(1.0, 0.99 * std::sqrt(R) / (2.0 * R)));
    for (int j = 0; j < K; ++j) {
        const double phi = center_angle + (K == 1 ? 0.0 : span * (double(j) / (K - 1) - 0.5));
        c.points.push_back({R * std::cos(phi), R * std::sin(phi), 0.0});
    }
    c.coefficients.assign(K, complex(1.0, 0.0));
    return c;
}

/// (+-R, 0, 0), (0, +-R, 0), (0, 0, +-R).
inline PointConfiguration axis_points_3d(double R) {
    PointConfiguration c;
    c.dimension = 3;
    c.R = R;
    for (int axis = 0; axis < 3; ++axis)
        for (double sign : {1.0, -1.0}) {
            Point p{0.0, 0.0, 0.0};
            p[axis] = sign * R;
            c.points.push_back(p);
        }
    c.coefficients.assign(6, complex(1.0, 0.0));
    return c;
}

/// K points in a spherical cap around the north pole, spread on a
/// sunflower spiral; the cap's chord diameter is just below R^{1/2}, so M = K.
inline PointConfiguration cap_cluster_3d(double R, int K) {
    if (K < 1) throw std::invalid_argument("cap_cluster_3d: K must be >= 1");
    PointConfiguration c;
    c.dimension = 3;
    c.R = R;
    const double theta_cap = std::asin(std::min(1.0, 0.99 * std::sqrt(R) / (2.0 * R)));
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int j = 0; j < K; ++j) {
        const double theta = K == 1 ? 0.0 : theta_cap * std::sqrt((j + 0.5) / K);
        const double phi = golden * j;
        c.points.push_back({R * std::sin(theta) * std::cos(phi), R * std::sin(theta) * std::sin(phi),
                            R * std::cos(theta)});
    }
    c.coefficients.assign(K, complex(1.0, 0.0));
    return c;
}

/// Multiplies a_k by e(xi_k . v): the exponential sum becomes F(x + v).
inline PointConfiguration translated(PointConfiguration c, const Point& v) {
    for (std::size_t k = 0; k < c.size(); ++k)
        c.coefficients[k] *= e(c.points[k][0] * v[0] + c.points[k][1] * v[1] + c.points[k][2] * v[2]);
    return c;
}

// ---------------------------------------------------------------------------
// Clustering statistic

/// M = max_j #{k : |xi_k - xi_j| <= R^{1/2}}, counting k = j.
inline int separation_M(const PointConfiguration& config) {
    if (config.points.empty()) throw std::invalid_argument("separation_M: empty configuration");
    const double radius = std::sqrt(config.R);
    int best = 0;
    for (const auto& p : config.points) {
        int count = 0;
        for (const auto& q : config.points)
            if (distance(p, q) <= radius) ++count;
        best = std::max(best, count);
    }
    return best;
}

inline double coefficient_mass(const std::vector<complex>& a) {
    double s = 0.0;
    for (const auto& v : a) s += std::norm(v);
    return s;
}

inline double max_frequency(const std::vector<Point>& xi) {
    double r = 0.0;
    for (const auto& p : xi) r = std::max(r, norm(p));
    return r;
}

// ---------------------------------------------------------------------------
// Field sampling

struct Rect {
    double x0 = 0.0;
    double y0 = 0.0;
    double width = 1.0;
    double height = 1.0;
};

namespace detail {

inline double power_of(double modulus_sq, double p) {
    if (p == 4.0) return modulus_sq * modulus_sq;
    if (p == 2.0) return modulus_sq;
    return std::pow(modulus_sq, 0.5 * p);
}

/// out[i] = |F(x0 + i h, y, z)|^p for i < nx, by rotating each term's phase
/// one step at a time; phases are re-seeded exactly every 64 samples.
inline void sample_line(const std::vector<Point>& xi, const std::vector<complex>& a, double x0, double y, double z,
                        double h, std::size_t nx, double p, double* out, std::vector<complex>& phase,
                        std::vector<complex>& rot, std::vector<complex>& acc) {
    const std::size_t K = xi.size();
    phase.resize(K);
    rot.resize(K);
    acc.assign(nx, complex{});
    for (std::size_t k = 0; k < K; ++k) rot[k] = e(xi[k][0] * h);
    constexpr std::size_t reseed = 64;
    for (std::size_t start = 0; start < nx; start += reseed) {
        const std::size_t stop = std::min(nx, start + reseed);
        const double x = x0 + double(start) * h;
        for (std::size_t k = 0; k < K; ++k) phase[k] = a[k] * e(xi[k][0] * x + xi[k][1] * y + xi[k][2] * z);
        for (std::size_t i = start; i < stop; ++i) {
            complex sum{};
            for (std::size_t k = 0; k < K; ++k) {
                sum += phase[k];
                phase[k] *= rot[k];
            }
            acc[i] = sum;
        }
    }
    for (std::size_t i = 0; i < nx; ++i) out[i] = power_of(std::norm(acc[i]), p);
}

/// Cell averages of |F|^p on a row of nx cells of side h centred at
/// (x0 + i h, y, z): tensor 2-point Gauss per cell (2^dims samples). Plain
/// centre sampling biases each Fourier term of the window integral by
/// (pi eta h) / sin(pi eta h), up to 57% at the Nyquist frequency.
inline void cell_average_line(const std::vector<Point>& xi, const std::vector<complex>& a, double x0, double y,
                              double z, double h, std::size_t nx, double p, int dims, double* out) {
    const double d = h / (2.0 * std::sqrt(3.0));
    std::vector<complex> phase, rot, acc;
    std::vector<double> buf(nx);
    std::fill(out, out + nx, 0.0);
    const int zs = dims == 3 ? 2 : 1;
    const double weight = 1.0 / (4.0 * zs);
    for (int sz = 0; sz < zs; ++sz)
        for (int sy = 0; sy < 2; ++sy)
            for (int sx = 0; sx < 2; ++sx) {
                const double zz = dims == 3 ? z + (sz ? d : -d) : z;
                sample_line(xi, a, x0 + (sx ? d : -d), y + (sy ? d : -d), zz, h, nx, p, buf.data(), phase, rot, acc);
                for (std::size_t i = 0; i < nx; ++i) out[i] += weight * buf[i];
            }
}

inline void check_step(double step, double Rmax) {
    if (!(step > 0.0) || !std::isfinite(step)) throw std::invalid_argument("step must be positive");
    if (Rmax > 0.0 && step > 1.0 / (8.0 * Rmax) * (1.0 + 1e-12))
        throw resolution_error("step " + std::to_string(step) + " too coarse: need <= 1/(8R) = " +
                               std::to_string(1.0 / (8.0 * Rmax)));
}

/// Cells per unit length: smallest n with 1/n <= step (and n >= 8).
inline std::size_t cells_per_unit(double step) {
    return std::max<std::size_t>(8, static_cast<std::size_t>(std::ceil(1.0 / step - 1e-9)));
}

}  // namespace detail

/// Direct evaluation of F(x) = sum_k a_k e(xi_k . x).
inline complex exp_sum(const std::vector<Point>& xi, const std::vector<complex>& a, const Point& x) {
    complex s{};
    for (std::size_t k = 0; k < xi.size(); ++k) s += a[k] * e(xi[k][0] * x[0] + xi[k][1] * x[1] + xi[k][2] * x[2]);
    return s;
}

/// |F|^p sampled at (x0 + i step, y0 + j step), i.e. out(j, i); planar only.
inline Array2D<double> exp_sum_field(const std::vector<Point>& xi, const std::vector<complex>& a, const Rect& region,
                                     double step, double p = 4.0) {
    detail::check_step(step, max_frequency(xi));
    if (!(region.width >= 0.0 && region.height >= 0.0)) throw std::invalid_argument("negative region");
    const auto nx = static_cast<std::size_t>(std::floor(region.width / step + 1e-9)) + 1;
    const auto ny = static_cast<std::size_t>(std::floor(region.height / step + 1e-9)) + 1;
    Array2D<double> out(ny, nx);
    parallel_for(ny, [&](std::size_t j) {
        std::vector<complex> phase, rot, acc;
        detail::sample_line(xi, a, region.x0, region.y0 + double(j) * step, 0.0, step, nx, p, out.row(j).data(), phase,
                            rot, acc);
    });
    return out;
}

inline Array2D<double> exp_sum_field(const PointConfiguration& config, const Rect& region, double step) {
    config.validate();
    if (config.dimension != 2) throw std::invalid_argument("exp_sum_field: planar configurations only");
    return exp_sum_field(config.points, config.coefficients, region, step, 4.0);
}

// ---------------------------------------------------------------------------
// Summed-area tables

/// S(j, i) = sum of f over rows < j and columns < i.
class SummedAreaTable2D {
public:
    SummedAreaTable2D() = default;

    /// Takes ownership of a (ny + 1) x (nx + 1) array whose (j + 1, i + 1)
    /// entries hold the samples; row/column 0 must be zero.
    explicit SummedAreaTable2D(Array2D<double> padded) : s_(std::move(padded)) {
        const std::size_t rows = s_.rows(), cols = s_.cols();
        parallel_for(rows, [&](std::size_t j) {
            auto row = s_.row(j);
            for (std::size_t i = 1; i < cols; ++i) row[i] += row[i - 1];
        });
        for (std::size_t j = 1; j < rows; ++j) {
            auto prev = s_.row(j - 1);
            auto row = s_.row(j);
            for (std::size_t i = 0; i < cols; ++i) row[i] += prev[i];
        }
    }

    static SummedAreaTable2D from_samples(const Array2D<double>& f) {
        Array2D<double> padded(f.rows() + 1, f.cols() + 1, 0.0);
        for (std::size_t j = 0; j < f.rows(); ++j)
            for (std::size_t i = 0; i < f.cols(); ++i) padded(j + 1, i + 1) = f(j, i);
        return SummedAreaTable2D(std::move(padded));
    }

    /// Sum over rows [j, j + h) and columns [i, i + w).
    [[nodiscard]] double box(std::size_t j, std::size_t i, std::size_t h, std::size_t w) const {
        return s_(j + h, i + w) - s_(j, i + w) - s_(j + h, i) + s_(j, i);
    }

    [[nodiscard]] std::size_t rows() const noexcept { return s_.rows() - 1; }
    [[nodiscard]] std::size_t cols() const noexcept { return s_.cols() - 1; }

private:
    Array2D<double> s_;
};

/// Three-dimensional analogue, z-major storage.
class SummedAreaTable3D {
public:
    SummedAreaTable3D(std::size_t nz, std::size_t ny, std::size_t nx)
        : nz_(nz + 1), ny_(ny + 1), nx_(nx + 1), s_(nz_ * ny_ * nx_, 0.0) {}

    double& sample(std::size_t k, std::size_t j, std::size_t i) { return s_[idx(k + 1, j + 1, i + 1)]; }
    double* line(std::size_t k, std::size_t j) { return &s_[idx(k + 1, j + 1, 1)]; }

    void build() {
        parallel_for(nz_ * ny_, [&](std::size_t kj) {
            double* row = &s_[kj * nx_];
            for (std::size_t i = 1; i < nx_; ++i) row[i] += row[i - 1];
        });
        parallel_for(nz_, [&](std::size_t k) {
            for (std::size_t j = 1; j < ny_; ++j) {
                double* row = &s_[idx(k, j, 0)];
                const double* prev = &s_[idx(k, j - 1, 0)];
                for (std::size_t i = 0; i < nx_; ++i) row[i] += prev[i];
            }
        });
        const std::size_t plane = ny_ * nx_;
        for (std::size_t k = 1; k < nz_; ++k) {
            double* cur = &s_[k * plane];
            const double* prev = &s_[(k - 1) * plane];
            for (std::size_t q = 0; q < plane; ++q) cur[q] += prev[q];
        }
    }

    /// Sum over the cube [k, k+n) x [j, j+n) x [i, i+n).
    [[nodiscard]] double cube(std::size_t k, std::size_t j, std::size_t i, std::size_t n) const {
        auto S = [&](std::size_t a, std::size_t b, std::size_t c) { return s_[idx(a, b, c)]; };
        return S(k + n, j + n, i + n) - S(k, j + n, i + n) - S(k + n, j, i + n) - S(k + n, j + n, i) +
               S(k, j, i + n) + S(k, j + n, i) + S(k + n, j, i) - S(k, j, i);
    }

private:
    [[nodiscard]] std::size_t idx(std::size_t k, std::size_t j, std::size_t i) const noexcept {
        return (k * ny_ + j) * nx_ + i;
    }

    std::size_t nz_, ny_, nx_;
    std::vector<double> s_;
};

// ---------------------------------------------------------------------------
// Square scans

enum class ScanRoute { Auto, SummedArea, Analytic };

inline std::string_view to_string(ScanRoute r) {
    switch (r) {
        case ScanRoute::Auto: return "auto";
        case ScanRoute::SummedArea: return "summed-area";
        case ScanRoute::Analytic: return "analytic";
    }
    return "unknown";
}

struct SquareScanResult {
    Point center{};
    double value = 0.0;     // (sup_Q int_Q |F|^p)^{1/p}
    double integral = 0.0;  // sup_Q int_Q |F|^p
    double exponent = 4.0;
    double step = 0.0;      // centre resolution
    ScanRoute route = ScanRoute::SummedArea;
    std::size_t windows = 0;
};

/// Window integrals int_Q |F|^p over unit squares centred on the grid
/// c = (-L/2 + i h, -L/2 + j h), i, j = 0..L n, h = 1/n: sums of Gauss
/// cell averages over n x n cells, read from a summed-area table.
struct WindowTable {
    double half_side = 0.0;
    double h = 0.0;
    std::size_t n = 0;  // cells per unit
    Array2D<double> integrals;

    [[nodiscard]] Point center(std::size_t j, std::size_t i) const {
        return {-half_side + double(i) * h, -half_side + double(j) * h, 0.0};
    }
};

/// Sample budget of the summed-area route (cells of the padded region).
inline constexpr std::size_t summed_area_cell_cap = std::size_t(1) << 22;

inline WindowTable window_table(const std::vector<Point>& xi, const std::vector<complex>& a, double L, double step,
                                double p = 4.0) {
    detail::check_step(step, max_frequency(xi));
    if (!(L >= 1.0)) throw std::invalid_argument("window_table: region side must be >= 1");
    WindowTable t;
    t.n = detail::cells_per_unit(step);
    t.h = 1.0 / double(t.n);
    const auto centers = static_cast<std::size_t>(std::llround(L * double(t.n))) + 1;
    t.half_side = 0.5 * double(centers - 1) * t.h;
    const std::size_t cells = centers - 1 + t.n;
    if (cells * cells > summed_area_cell_cap * 4)
        throw resolution_error("summed-area scan would need " + std::to_string(cells) + "^2 samples");
    Array2D<double> padded(cells + 1, cells + 1, 0.0);
    const double origin = -t.half_side - 0.5 + 0.5 * t.h;  // first cell centre
    parallel_for(cells, [&](std::size_t j) {
        detail::cell_average_line(xi, a, origin, origin + double(j) * t.h, 0.0, t.h, cells, p, 2,
                                  padded.row(j + 1).data() + 1);
    });
    const SummedAreaTable2D sat(std::move(padded));
    t.integrals = Array2D<double>(centers, centers);
    const double area = t.h * t.h;
    parallel_for(centers, [&](std::size_t j) {
        for (std::size_t i = 0; i < centers; ++i) t.integrals(j, i) = area * sat.box(j, i, t.n, t.n);
    });
    return t;
}

/// Exact window integrals of |F|^4 through the pair-sum expansion.
class AnalyticWindow {
public:
    static constexpr std::size_t max_points = 64;
    static constexpr std::size_t max_candidates = 32;

    explicit AnalyticWindow(std::vector<Point> xi) : xi_(std::move(xi)) {
        const std::size_t K = xi_.size();
        if (K == 0) throw std::invalid_argument("AnalyticWindow: no frequencies");
        if (K > max_points) throw resolution_error("analytic scan supports at most 64 frequencies");
        for (std::size_t k = 0; k < K; ++k)
            for (std::size_t l = k; l < K; ++l) {
                pairs_.push_back({k, l});
                sx_.push_back(xi_[k][0] + xi_[l][0]);
                sy_.push_back(xi_[k][1] + xi_[l][1]);
            }
        const std::size_t P = pairs_.size();
        w_.assign(P * P, 0.0);
        for (std::size_t p = 0; p < P; ++p)
            for (std::size_t q = p; q < P; ++q) {
                const double v = sinc(sx_[p] - sx_[q]) * sinc(sy_[p] - sy_[q]);
                w_[p * P + q] = v;
                w_[q * P + p] = v;
            }
    }

    [[nodiscard]] std::size_t size() const noexcept { return xi_.size(); }
    [[nodiscard]] const std::vector<Point>& frequencies() const noexcept { return xi_; }

    /// Coefficients of F^2 on the pair sums.
    [[nodiscard]] std::vector<complex> pair_coefficients(const std::vector<complex>& a) const {
        std::vector<complex> c(pairs_.size());
        for (std::size_t p = 0; p < pairs_.size(); ++p) {
            const auto [k, l] = pairs_[p];
            c[p] = (k == l ? 1.0 : 2.0) * a[k] * a[l];
        }
        return c;
    }

    /// int over the unit square centred at (cx, cy) of |F|^4.
    [[nodiscard]] double integral(const std::vector<complex>& c, double cx, double cy) const {
        const std::size_t P = pairs_.size();
        thread_local std::vector<complex> u;
        u.resize(P);
        for (std::size_t p = 0; p < P; ++p) u[p] = c[p] * e(sx_[p] * cx + sy_[p] * cy);
        double diag = 0.0, off = 0.0;
        for (std::size_t p = 0; p < P; ++p) {
            diag += std::norm(u[p]);
            const double* wrow = &w_[p * P];
            const double ur = u[p].real(), ui = u[p].imag();
            double acc = 0.0;
            for (std::size_t q = p + 1; q < P; ++q) acc += wrow[q] * (ur * u[q].real() + ui * u[q].imag());
            off += acc;
        }
        return diag + 2.0 * off;
    }

    /// d/d(conj a_k) of the window integral at (cx, cy):
    ///   2 sum_{p, l} c_p conj(a_l) W(s_p - xi_l - xi_k) e((s_p - xi_l - xi_k) . c).
    [[nodiscard]] std::vector<complex> gradient(const std::vector<complex>& a, double cx, double cy) const {
        const auto c = pair_coefficients(a);
        const std::size_t K = xi_.size(), P = pairs_.size();
        std::vector<complex> g(K);
        parallel_for(K, [&](std::size_t k) {
            complex sum{};
            for (std::size_t l = 0; l < K; ++l) {
                const double bx = xi_[l][0] + xi_[k][0], by = xi_[l][1] + xi_[k][1];
                complex inner{};
                for (std::size_t p = 0; p < P; ++p) {
                    const double ex = sx_[p] - bx, ey = sy_[p] - by;
                    inner += c[p] * (sinc(ex) * sinc(ey)) * e(ex * cx + ey * cy);
                }
                sum += std::conj(a[l]) * inner;
            }
            g[k] = 2.0 * sum;
        });
        return g;
    }

    /// Coarse grid over [-L/2, L/2]^2 (at most 96 intervals per axis), then
    /// local grids around the 32 best coarse local maxima: 17 x 17 at a
    /// spacing of hc/8, then 9 x 9 shrinking by 4 until the spacing reaches
    /// `step`. A multistart search: the landscape is a near-constant
    /// diagonal plus small fast ripples, so its global maximum is resolved to
    /// roughly 1e-4 relative, not certified.
    [[nodiscard]] SquareScanResult scan(const std::vector<complex>& a, double L, double step) const {
        const auto c = pair_coefficients(a);
        SquareScanResult out;
        out.route = ScanRoute::Analytic;
        out.exponent = 4.0;
        const double half = 0.5 * L;
        const auto coarse_n = static_cast<std::size_t>(std::min(96.0, std::ceil(L / step - 1e-9)));
        const double hc = L / double(coarse_n);
        const std::size_t m = coarse_n + 1;
        Array2D<double> grid(m, m);
        parallel_for(m, [&](std::size_t j) {
            for (std::size_t i = 0; i < m; ++i)
                grid(j, i) = integral(c, -half + double(i) * hc, -half + double(j) * hc);
        });
        out.windows = m * m;

        struct Candidate {
            double value;
            double x, y;
        };
        std::vector<Candidate> cands;
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t i = 0; i < m; ++i) {
                const double v = grid(j, i);
                bool peak = true;
                for (int dj = -1; dj <= 1 && peak; ++dj)
                    for (int di = -1; di <= 1; ++di) {
                        const auto jj = static_cast<long>(j) + dj, ii = static_cast<long>(i) + di;
                        if ((dj || di) && jj >= 0 && ii >= 0 && jj < long(m) && ii < long(m) && grid(jj, ii) > v) {
                            peak = false;
                            break;
                        }
                    }
                if (peak) cands.push_back({v, -half + double(i) * hc, -half + double(j) * hc});
            }
        std::stable_sort(cands.begin(), cands.end(), [](const Candidate& p, const Candidate& q) { return p.value > q.value; });
        if (cands.size() > max_candidates) cands.resize(max_candidates);

        double spacing = hc;
        for (int level = 0; spacing > step * (1.0 + 1e-12); ++level) {
            const int reach = level == 0 ? 8 : 4;
            spacing = std::max(spacing / reach, step);
            std::vector<Candidate> next(cands.size());
            parallel_for(cands.size(), [&](std::size_t t) {
                Candidate best = cands[t];
                for (int dj = -reach; dj <= reach; ++dj)
                    for (int di = -reach; di <= reach; ++di) {
                        const double x = std::clamp(cands[t].x + di * spacing, -half, half);
                        const double y = std::clamp(cands[t].y + dj * spacing, -half, half);
                        const double v = integral(c, x, y);
                        if (v > best.value) best = {v, x, y};
                    }
                next[t] = best;
            });
            out.windows += std::size_t(2 * reach + 1) * std::size_t(2 * reach + 1) * cands.size();
            cands = std::move(next);
        }
        const auto best = std::max_element(cands.begin(), cands.end(),
                                           [](const Candidate& p, const Candidate& q) { return p.value < q.value; });
        out.integral = std::max(0.0, best->value);
        out.value = std::pow(out.integral, 0.25);
        out.center = {best->x, best->y, 0.0};
        out.step = std::min(step, hc);
        return out;
    }

private:
    std::vector<Point> xi_;
    std::vector<std::pair<std::size_t, std::size_t>> pairs_;
    std::vector<double> sx_, sy_;
    std::vector<double> w_;
};

/// sup over axis-aligned unit squares with centres in [-L/2, L/2]^2 of
/// (int_Q |F|^p)^{1/p}. Auto picks the summed-area route when the sampled
/// region fits the cell budget, else the analytic route (p = 4).
inline SquareScanResult sup_square_scan(const std::vector<Point>& xi, const std::vector<complex>& a, double L,
                                        double step, ScanRoute route = ScanRoute::Auto, double p = 4.0) {
    if (!(L >= 3.0)) throw std::invalid_argument("sup_square_scan: search region side must be >= 3");
    detail::check_step(step, max_frequency(xi));
    if (route == ScanRoute::Auto) {
        const double cells = (L + 1.0) * double(detail::cells_per_unit(step));
        route = (cells * cells <= double(summed_area_cell_cap) || p != 4.0 || xi.size() > AnalyticWindow::max_points)
                    ? ScanRoute::SummedArea
                    : ScanRoute::Analytic;
    }
    if (route == ScanRoute::Analytic) {
        if (p != 4.0) throw std::invalid_argument("analytic scan needs exponent 4");
        return AnalyticWindow(xi).scan(a, L, step);
    }
    const auto table = window_table(xi, a, L, step, p);
    SquareScanResult out;
    out.route = ScanRoute::SummedArea;
    out.exponent = p;
    out.step = table.h;
    out.windows = table.integrals.size();
    std::size_t arg = 0;
    const auto& v = table.integrals.data();
    for (std::size_t q = 1; q < v.size(); ++q)
        if (v[q] > v[arg]) arg = q;
    out.integral = v[arg];
    out.value = std::pow(std::max(0.0, out.integral), 1.0 / p);
    out.center = table.center(arg / table.integrals.cols(), arg % table.integrals.cols());
    return out;
}

inline double default_step(const std::vector<Point>& xi) {
    const double r = max_frequency(xi);
    return r > 0.0 ? 1.0 / (8.0 * r) : 0.125;
}

inline SquareScanResult sup_square_scan(const PointConfiguration& config, double L = 3.0, double step = 0.0,
                                        ScanRoute route = ScanRoute::Auto) {
    config.validate();
    if (config.dimension != 2) throw std::invalid_argument("sup_square_scan: planar configurations only");
    if (step <= 0.0) step = default_step(config.points);
    return sup_square_scan(config.points, config.coefficients, L, step, route);
}

// ---------------------------------------------------------------------------
// Ratio statistics

struct RatioResult {
    double ratio = 0.0;
    int M = 1;
    double mass = 0.0;  // sum |a_k|^2
    SquareScanResult scan;
};

/// sup_Q ||F||_{L^4(Q)} / (M^{1/2} ||a||_2).
inline RatioResult ratio_statistic(const PointConfiguration& config, double L = 3.0, double step = 0.0,
                                   ScanRoute route = ScanRoute::Auto) {
    RatioResult r;
    r.mass = coefficient_mass(config.coefficients);
    if (!(r.mass > 0.0)) throw std::invalid_argument("ratio_statistic: coefficients are all zero");
    r.M = separation_M(config);
    r.scan = sup_square_scan(config, L, step, route);
    r.ratio = r.scan.value / (std::sqrt(double(r.M)) * std::sqrt(r.mass));
    return r;
}

/// Same scan with frequencies (t_j, t_j^2) and no M factor.
inline RatioResult parabola_ratio(const ParabolaConfiguration& config, double L = 3.0, double step = 0.0,
                                  ScanRoute route = ScanRoute::Auto) {
    config.validate();
    RatioResult r;
    r.mass = coefficient_mass(config.coefficients);
    if (!(r.mass > 0.0)) throw std::invalid_argument("parabola_ratio: coefficients are all zero");
    const auto xi = config.frequencies();
    if (step <= 0.0) step = default_step(xi);
    r.scan = sup_square_scan(xi, config.coefficients, L, step, route);
    r.ratio = r.scan.value / std::sqrt(r.mass);
    return r;
}

struct AscentResult {
    std::vector<complex> coefficients;  // unit l2 norm
    double ratio = 0.0;                 // best scanned ratio seen
    double initial_ratio = 0.0;
    std::vector<double> history;  // running best after each re-scan
    Point center{};
    int iterations = 0;
};

/// Projected gradient ascent of the windowed quartic on the unit l2 sphere.
/// The gradient is taken at the current best square, which is re-scanned
/// every 10 steps; a step is kept only if it raises the integral over that
/// square (backtracking by halving). The seed drives a 1e-3 perturbation of
/// the start that breaks exact symmetric stationary points.
inline AscentResult maximize_ratio(const PointConfiguration& config, int iterations, std::uint64_t seed,
                                   double L = 3.0, double step = 0.0, ScanRoute route = ScanRoute::Auto) {
    config.validate();
    if (config.dimension != 2) throw std::invalid_argument("maximize_ratio: planar configurations only");
    const std::size_t K = config.size();
    if (K < 1) throw std::invalid_argument("maximize_ratio: need at least one point");
    if (step <= 0.0) step = default_step(config.points);
    const int M = separation_M(config);
    const AnalyticWindow window(config.points);

    auto normalise = [](std::vector<complex>& a) {
        const double s = std::sqrt(coefficient_mass(a));
        for (auto& v : a) v /= s;
    };
    auto scan_ratio = [&](const std::vector<complex>& a, SquareScanResult& scan) {
        scan = sup_square_scan(config.points, a, L, step, route);
        return scan.value / std::sqrt(double(M));
    };

    AscentResult out;
    std::vector<complex> a = config.coefficients;
    if (!(coefficient_mass(a) > 0.0)) a.assign(K, complex(1.0, 0.0));
    normalise(a);
    SquareScanResult scan;
    out.initial_ratio = scan_ratio(a, scan);
    out.ratio = out.initial_ratio;
    out.coefficients = a;
    out.center = scan.center;

    const auto noise = random_coefficients(K, seed);
    for (std::size_t k = 0; k < K; ++k) a[k] += 1e-3 * noise[k];
    normalise(a);
    auto record = [&](const std::vector<complex>& cur) {
        SquareScanResult s;
        const double r = scan_ratio(cur, s);
        scan = s;
        if (r > out.ratio) {
            out.ratio = r;
            out.coefficients = cur;
            out.center = s.center;
        }
        out.history.push_back(out.ratio);
    };
    record(a);

    double tau = 0.25;
    for (int it = 0; it < iterations; ++it) {
        out.iterations = it + 1;
        const double cx = scan.center[0], cy = scan.center[1];
        const double f0 = window.integral(window.pair_coefficients(a), cx, cy);
        auto g = window.gradient(a, cx, cy);
        complex radial{};
        for (std::size_t k = 0; k < K; ++k) radial += std::conj(a[k]) * g[k];
        for (std::size_t k = 0; k < K; ++k) g[k] -= radial.real() * a[k];
        const double gnorm = std::sqrt(coefficient_mass(g));
        if (gnorm > 1e-14 * std::max(1.0, std::abs(f0))) {
            bool moved = false;
            for (int tries = 0; tries < 30 && !moved; ++tries) {
                std::vector<complex> trial(K);
                for (std::size_t k = 0; k < K; ++k) trial[k] = a[k] + (tau / gnorm) * g[k];
                normalise(trial);
                if (window.integral(window.pair_coefficients(trial), cx, cy) > f0) {
                    a = std::move(trial);
                    moved = true;
                    tau = std::min(1.0, 2.0 * tau);
                } else {
                    tau *= 0.5;
                }
            }
            if (!moved) tau = 0.25;
        }
        if ((it + 1) % 10 == 0 || it + 1 == iterations) record(a);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Three-dimensional explorer

inline constexpr std::size_t conjecture_cell_cap = std::size_t(40) << 20;
inline constexpr std::size_t conjecture_point_cap = 500;
inline constexpr std::string_view conjecture_label = "UNPROVEN";

struct ConjectureResult {
    double ratio = 0.0;  // (sup_Q int_Q |F|^3)^{1/3} / (M^{1/2} ||a||_2)
    int M = 1;
    double mass = 0.0;
    double value = 0.0;
    double integral = 0.0;
    Point center{};
    double step = 0.0;
    std::size_t cells_per_axis = 0;
    std::string_view label = conjecture_label;
};

/// Windowed L^3 over axis-aligned unit cubes with centres in [-L/2, L/2]^3,
/// Gauss cell averages on cells of side 1/n (n >= 8R), 3-D summed-area table.
inline ConjectureResult conjecture_experiment(const PointConfiguration& config, double L = 1.0, double step = 0.0) {
    config.validate();
    if (config.dimension != 3) throw std::invalid_argument("conjecture_experiment: needs a configuration in R^3");
    if (config.size() > conjecture_point_cap) throw resolution_error("conjecture_experiment: at most 500 points");
    ConjectureResult out;
    out.mass = coefficient_mass(config.coefficients);
    if (!(out.mass > 0.0)) throw std::invalid_argument("conjecture_experiment: coefficients are all zero");
    if (!(L > 0.0)) throw std::invalid_argument("conjecture_experiment: region side must be positive");
    if (step <= 0.0) step = default_step(config.points);
    detail::check_step(step, max_frequency(config.points));
    out.M = separation_M(config);

    const std::size_t n = detail::cells_per_unit(step);
    const double h = 1.0 / double(n);
    const auto centers = static_cast<std::size_t>(std::llround(L * double(n))) + 1;
    const std::size_t cells = centers - 1 + n;
    if (double(cells) * double(cells) * double(cells) > double(conjecture_cell_cap))
        throw resolution_error("conjecture_experiment: " + std::to_string(cells) + "^3 cells exceed the grid budget");
    out.step = h;
    out.cells_per_axis = cells;

    const double half = 0.5 * double(centers - 1) * h;
    const double origin = -half - 0.5 + 0.5 * h;
    SummedAreaTable3D sat(cells, cells, cells);
    parallel_for(cells * cells, [&](std::size_t kj) {
        const std::size_t k = kj / cells, j = kj % cells;
        detail::cell_average_line(config.points, config.coefficients, origin, origin + double(j) * h,
                                  origin + double(k) * h, h, cells, 3.0, 3, sat.line(k, j));
    });
    sat.build();

    std::vector<double> best_val(centers, -1.0);
    std::vector<std::size_t> best_arg(centers, 0);
    parallel_for(centers, [&](std::size_t k) {
        for (std::size_t j = 0; j < centers; ++j)
            for (std::size_t i = 0; i < centers; ++i) {
                const double v = sat.cube(k, j, i, n);
                if (v > best_val[k]) {
                    best_val[k] = v;
                    best_arg[k] = j * centers + i;
                }
            }
    });
    const auto kbest = static_cast<std::size_t>(std::max_element(best_val.begin(), best_val.end()) - best_val.begin());
    out.integral = std::max(0.0, best_val[kbest]) * h * h * h;
    out.value = std::cbrt(out.integral);
    const std::size_t j = best_arg[kbest] / centers, i = best_arg[kbest] % centers;
    out.center = {-half + double(i) * h, -half + double(j) * h, -half + double(kbest) * h};
    out.ratio = out.value / (std::sqrt(double(out.M)) * std::sqrt(out.mass));
    return out;
}

struct TrendRow {
    std::string family;
    double R = 0.0;
    std::size_t K = 0;
    int M = 1;
    double ratio = 0.0;
    double unnormalised = 0.0;  // value / ||a||_2, i.e. ratio * M^{1/2}
    double step = 0.0;
};

struct ConjectureTrend {
    std::vector<TrendRow> rows;
    double slope_vs_log_M = std::numeric_limits<double>::quiet_NaN();  // d log(ratio) / d log(M), cap family
    std::string_view label = conjecture_label;
};

/// Axis points plus a cap-cluster family with growing M at one radius.
inline ConjectureTrend conjecture_sweep(double R, const std::vector<int>& cap_sizes, double step = 0.0) {
    ConjectureTrend trend;
    auto add = [&](std::string family, const PointConfiguration& c) {
        const auto res = conjecture_experiment(c, 1.0, step);
        trend.rows.push_back({std::move(family), c.R, c.size(), res.M, res.ratio, res.ratio * std::sqrt(double(res.M)),
                              res.step});
    };
    add("axis", axis_points_3d(R));
    std::vector<double> lx, ly;
    for (int K : cap_sizes) {
        add("cap", cap_cluster_3d(R, K));
        const auto& row = trend.rows.back();
        lx.push_back(std::log(double(row.M)));
        ly.push_back(std::log(row.ratio));
    }
    if (lx.size() >= 2) {
        double mx = 0, my = 0;
        for (std::size_t i = 0; i < lx.size(); ++i) mx += lx[i], my += ly[i];
        mx /= double(lx.size());
        my /= double(ly.size());
        double sxy = 0, sxx = 0;
        for (std::size_t i = 0; i < lx.size(); ++i) sxy += (lx[i] - mx) * (ly[i] - my), sxx += (lx[i] - mx) * (lx[i] - mx);
        if (sxx > 0) trend.slope_vs_log_M = sxy / sxx;
    }
    return trend;
}

}  // namespace restriction_lab::discrete
