#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <fftw3.h>

#include "restriction_lab/array.hpp"
#include "restriction_lab/bessel.hpp"
#include "restriction_lab/errors.hpp"
#include "restriction_lab/grids_norms.hpp"
#include "restriction_lab/parallel.hpp"
#include "restriction_lab/profile.hpp"
#include "restriction_lab/quadrature.hpp"
#include "restriction_lab/spherical.hpp"

namespace restriction_lab::extension {

using complex = std::complex<double>;

/// Gamma = {(g(z) theta, z)} in R^{n+1} with dGamma = G1 dz dtheta,
/// G1 = g^{n-1} sqrt(1 + g'^2) and G2 = g^{n/2} sqrt(1 + g'^2).
struct SurfaceOfRevolution {
    int n = 2;
    ProfileFunction profile;
    std::vector<double> G1;
    std::vector<double> G2;
    double sup_A = 0.0;
    double sup_B = 0.0;
};

inline SurfaceOfRevolution surface_measure_factors(const ProfileFunction& profile, int n) {
    spherical::check_dimension(n);
    for (double g : profile.g)
        if (g < 0.0) throw std::invalid_argument("surface: profile has a negative sample");
    SurfaceOfRevolution s;
    s.n = n;
    s.profile = profile;
    s.G1 = spherical::area_factor(profile, n);
    s.G2.resize(profile.size());
    for (std::size_t i = 0; i < profile.size(); ++i)
        s.G2[i] = std::pow(profile.g[i], 0.5 * n) * std::sqrt(1.0 + profile.dg[i] * profile.dg[i]);
    s.sup_A = profile.sup_A;
    s.sup_B = profile.sup_B;
    return s;
}

/// (2 pi)^{n/2}: the factor in int_{S^{n-1}} Y_k(theta) e^{-i x theta.phi} dtheta
///   = (2 pi)^{n/2} i^{-k} x^{-(n-2)/2} J_{k+(n-2)/2}(x) Y_k(phi).
inline double extension_constant(int n) { return std::pow(2.0 * std::numbers::pi, 0.5 * n); }

inline complex phase(int k) {
    static const complex powers[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
    return powers[k % 4];
}

namespace detail {

/// rho^{-(n-2)/2} J_nu(rho g) for nu = k + (n-2)/2, finite at rho = 0.
inline double radial_factor(int n, int k, double rho, double g) {
    const double nu = k + 0.5 * (n - 2);
    const double x = rho * g;
    if (n == 2) return bessel::j(bessel::Order(nu), x);
    if (x == 0.0) {
        if (k != 0) return 0.0;
        // x^{-nu} J_nu(x) -> 1 / (2^nu Gamma(nu + 1)), times g^nu
        return std::pow(g, nu) / (std::pow(2.0, nu) * std::tgamma(nu + 1.0));
    }
    return std::pow(rho, -0.5 * (n - 2)) * bessel::j(bessel::Order(nu), x);
}

/// J_{k+(n-2)/2}(x), k = 0..K, into out.
inline void degree_sequence(int n, int k_max, double x, double* out) {
    bessel::j_sequence(0.5 * (n - 2), k_max + 1, x, out);
}

/// One reusable out-of-place complex DFT of length N.
class Dft {
public:
    explicit Dft(int size) : size_(size) {
        static std::mutex planner;
        std::lock_guard lock(planner);
        auto* in = fftw_alloc_complex(size);
        auto* out = fftw_alloc_complex(size);
        plan_ = fftw_plan_dft_1d(size, in, out, FFTW_FORWARD, FFTW_ESTIMATE);
        fftw_free(in);
        fftw_free(out);
        if (plan_ == nullptr) throw std::runtime_error("fftw: planning failed");
    }
    ~Dft() { fftw_destroy_plan(plan_); }
    Dft(const Dft&) = delete;
    Dft& operator=(const Dft&) = delete;

    [[nodiscard]] int size() const noexcept { return size_; }

    /// Thread-safe execution on caller-owned buffers.
    void operator()(std::vector<complex>& in, std::vector<complex>& out) const {
        fftw_execute_dft(plan_, reinterpret_cast<fftw_complex*>(in.data()), reinterpret_cast<fftw_complex*>(out.data()));
    }

private:
    int size_;
    fftw_plan plan_ = nullptr;
};

}  // namespace detail

/// Coefficients E_{k,j}(rho, zeta) = rho^{-(n-2)/2} int G2 a_{k,j} J_nu(rho g) e^{-i z zeta} dz
/// of the extension (without the (2 pi)^{n/2} i^{-k} factor); rows rho, columns zeta.
struct ExtensionSamples {
    int n = 2;
    int k_max = 0;
    std::vector<double> rho;
    std::vector<double> zeta;
    double zeta_step = 0.0;
    std::vector<Array2D<complex>> values;  // one per harmonic (flat index)
};

/// The z-integral by trapezoid on the profile grid: zero-padded to
/// `padding` times the grid length and transformed by one DFT per (k,j,rho),
/// zeta_m = 2 pi m / (N dz). Frequencies beyond `zeta_max` are dropped;
/// asking for more than the Nyquist limit pi/dz is an aliasing error.
inline ExtensionSamples extend(const spherical::CoefficientField& field, const SurfaceOfRevolution& surface,
                               const std::vector<double>& rho, int padding = 4, double zeta_max = -1.0) {
    if (!(field.z() == surface.profile.z)) throw std::invalid_argument("extend: field and profile grids differ");
    if (field.n() != surface.n) throw std::invalid_argument("extend: dimension mismatch");
    if (padding < 1) throw std::invalid_argument("extend: padding must be >= 1");
    const auto& zg = field.z();
    const double dz = zg.step();
    const double nyquist = std::numbers::pi / dz;
    if (zeta_max < 0.0) zeta_max = nyquist;
    if (zeta_max > nyquist * (1.0 + 1e-12))
        throw resolution_error("extend: zeta_max " + std::to_string(zeta_max) + " beyond the z-grid Nyquist limit " +
                               std::to_string(nyquist) + " (aliasing)");
    const int nz = zg.count;
    const int N = padding * nz;
    const double step = 2.0 * std::numbers::pi / (N * dz);
    const int m_max = std::min(N / 2, static_cast<int>(std::floor(zeta_max / step + 1e-9)));

    ExtensionSamples out;
    out.n = field.n();
    out.k_max = field.k_max();
    out.rho = rho;
    out.zeta_step = step;
    std::vector<int> ms;
    for (int m = -m_max; m <= m_max; ++m) {
        if (m == -N / 2 && N % 2 == 0 && m_max == N / 2) continue;  // same bin as +N/2
        ms.push_back(m);
        out.zeta.push_back(m * step);
    }
    // e^{-i z_a zeta} for the grid offset
    std::vector<complex> shift(ms.size());
    for (std::size_t c = 0; c < ms.size(); ++c) shift[c] = std::polar(1.0, -zg.lo * out.zeta[c]);

    const std::vector<double> w = quadrature::trapezoid_weights(zg);
    const int H = field.harmonics();
    out.values.assign(H, Array2D<complex>(rho.size(), ms.size()));
    const detail::Dft dft(N);
    parallel_for(rho.size(), [&](std::size_t i) {
        std::vector<complex> in(N), res(N);
        std::vector<double> seq(field.k_max() + 1);
        Array2D<double> jz(field.k_max() + 1, nz);
        for (int l = 0; l < nz; ++l) {
            detail::degree_sequence(out.n, field.k_max(), rho[i] * surface.profile.g[l], seq.data());
            for (int k = 0; k <= field.k_max(); ++k)
                jz(k, l) = out.n == 2 ? seq[k] : detail::radial_factor(out.n, k, rho[i], surface.profile.g[l]);
        }
        for (int h = 0; h < H; ++h) {
            const int k = spherical::from_flat(out.n, h).degree;
            const auto a = field.row(h);
            std::fill(in.begin(), in.end(), complex{});
            bool any = false;
            for (int l = 0; l < nz; ++l) {
                in[l] = w[l] * surface.G2[l] * a[l] * jz(k, l);
                any = any || in[l] != complex{};
            }
            if (!any) continue;
            dft(in, res);
            for (std::size_t c = 0; c < ms.size(); ++c) out.values[h](i, c) = shift[c] * res[(ms[c] + N) % N];
        }
    });
    return out;
}

/// (f dGamma)^ at one point (rho phi, zeta) by direct trapezoid summation in z,
/// including the (2 pi)^{n/2} i^{-k} factors.
inline complex extension_value(const spherical::CoefficientField& field, const SurfaceOfRevolution& surface, double rho,
                               spherical::SpherePoint phi, double zeta) {
    if (!(field.z() == surface.profile.z)) throw std::invalid_argument("extension_value: grids differ");
    const auto& zg = field.z();
    const std::vector<double> w = quadrature::trapezoid_weights(zg);
    complex total{};
    for (int h = 0; h < field.harmonics(); ++h) {
        const auto idx = spherical::from_flat(field.n(), h);
        const auto a = field.row(h);
        complex sum{};
        for (int l = 0; l < zg.count; ++l) {
            if (a[l] == 0.0) continue;
            sum += w[l] * surface.G2[l] * a[l] * detail::radial_factor(field.n(), idx.degree, rho, surface.profile.g[l]) *
                   std::polar(1.0, -zg.at(l) * zeta);
        }
        total += phase(idx.degree) * spherical::harmonic(field.n(), idx, phi) * sum;
    }
    return extension_constant(field.n()) * total;
}

/// ||(f dGamma)^||_{L^{q,2,2}}: the zeta-integral over R is taken exactly by
/// Plancherel, int |E|^2 dzeta = 2 pi int |G2 a J|^2 dz (Simpson in z), and
/// the angular one by orthonormality of the Y_k^j.
inline MixedNormReport extension_mixed_norm(const spherical::CoefficientField& field,
                                            const SurfaceOfRevolution& surface, double q, const RadialGrid& grid) {
    if (!(field.z() == surface.profile.z)) throw std::invalid_argument("extension norm: grids differ");
    const int n = field.n();
    const auto& zg = field.z();
    const std::vector<double> w = quadrature::simpson_weights(zg);
    const int K = field.k_max();
    // per degree: sum over members of |a|^2, weighted by G2^2
    Array2D<double> weight(K + 1, zg.count);
    for (int h = 0; h < field.harmonics(); ++h) {
        const int k = spherical::from_flat(n, h).degree;
        const auto a = field.row(h);
        for (int l = 0; l < zg.count; ++l) weight(k, l) += w[l] * surface.G2[l] * surface.G2[l] * a[l] * a[l];
    }
    std::vector<double> squares(grid.size());
    const double c2 = std::pow(extension_constant(n), 2) * 2.0 * std::numbers::pi;
    parallel_for(grid.size(), [&](std::size_t i) {
        const double rho = grid.nodes()[i];
        std::vector<double> seq(K + 1);
        double sum = 0.0;
        for (int l = 0; l < zg.count; ++l) {
            detail::degree_sequence(n, K, rho * surface.profile.g[l], seq.data());
            for (int k = 0; k <= K; ++k) sum += weight(k, l) * seq[k] * seq[k];
        }
        squares[i] = c2 * std::pow(rho, -(n - 2)) * sum;
    });
    return mixed_norm_from_squares(grid, n, q, [&](std::size_t i) { return squares[i]; });
}

struct ExtensionQuotient {
    double q = 0.0;
    MixedNormReport numerator;
    double denominator = 0.0;  // ||f||_{L^2(Gamma)}
    double quotient = 0.0;     // tail-corrected numerator / denominator
    double raw_quotient = 0.0; // truncated at r_max
};

inline ExtensionQuotient extension_quotient(const spherical::CoefficientField& field, const SurfaceOfRevolution& surface,
                                            double q, const RadialGrid& grid) {
    if (!(q > 2.0)) throw std::invalid_argument("extension quotient: q must exceed 2");
    ExtensionQuotient out;
    out.q = q;
    out.denominator = std::sqrt(spherical::plancherel_l2_on_gamma(field, surface.profile));
    if (!(out.denominator > 0.0)) throw std::invalid_argument("extension quotient: f has zero L^2(Gamma) norm");
    out.numerator = extension_mixed_norm(field, surface, q, grid);
    out.quotient = out.numerator.corrected / out.denominator;
    out.raw_quotient = out.numerator.value / out.denominator;
    return out;
}

// ---------------------------------------------------------------------------
// Bessel-weighted families: the radial lemma
//   int_0^inf rho^{-q(n-2)/2 + n - 1} (sum_j int |b_j|^2 |J_{nu_j}(rho g)|^2 dz)^{q/2} drho
//     <~ (sum_j int |b_j|^2 dz)^{q/2}.
// ---------------------------------------------------------------------------

struct BesselWeightedFamily {
    int n = 2;
    quadrature::UniformGrid z;
    std::vector<double> orders;
    std::vector<std::vector<double>> b;  // b[j][l] on z

    void validate() const {
        spherical::check_dimension(n);
        if (orders.size() != b.size()) throw std::invalid_argument("family: one profile per order");
        for (double nu : orders)
            if (!(nu >= 0.5 * (n - 2)) || !std::isfinite(nu))
                throw std::invalid_argument("family: orders must be >= (n-2)/2");
        for (const auto& bj : b)
            if (static_cast<int>(bj.size()) != z.count) throw std::invalid_argument("family: profile/grid mismatch");
    }

    /// sum_j int |b_j|^2 dz (Simpson).
    [[nodiscard]] double mass() const {
        const auto w = quadrature::simpson_weights(z);
        double total = 0.0;
        for (const auto& bj : b)
            for (int l = 0; l < z.count; ++l) total += w[l] * bj[l] * bj[l];
        return total;
    }

    static BesselWeightedFamily single(int n, double nu, quadrature::UniformGrid z,
                                       const std::function<double(double)>& bfn) {
        BesselWeightedFamily f{n, z, {nu}, {std::vector<double>(z.count)}};
        for (int l = 0; l < z.count; ++l) f.b[0][l] = bfn(z.at(l));
        f.validate();
        return f;
    }

    /// Integer orders in [lo M, hi M) with b_j = 1.
    static BesselWeightedFamily spread(int n, double M, quadrature::UniformGrid z, double lo = 0.5, double hi = 4.0) {
        BesselWeightedFamily f{n, z, {}, {}};
        for (long v = static_cast<long>(std::ceil(lo * M)); v < hi * M; ++v) {
            f.orders.push_back(static_cast<double>(v));
            f.b.emplace_back(z.count, 1.0);
        }
        f.validate();
        return f;
    }
};

namespace detail {

/// J_{nu0 + i}(x) for i = 0..count-1, for sums of squares: upward
/// recurrence below the turning point x, downward recurrence (stable there)
/// from just above it, and zero for orders beyond x + 12 x^{1/3} + 40, where
/// |J| < 1e-16 of its peak.
inline void consecutive_orders(double nu0, int count, double x, double* out) {
    int turn = 0;  // first index with nu >= x
    while (turn < count && nu0 + turn < x) ++turn;
    for (int i = 0; i < turn; ++i)
        out[i] = i < 2 ? bessel::j(bessel::Order(nu0 + i), x)
                       : (2.0 * (nu0 + i - 1) / x) * out[i - 1] - out[i - 2];
    if (turn == count) return;
    const int top = std::min(count - 1, turn + static_cast<int>(std::ceil(12.0 * std::cbrt(x) + 40.0)));
    for (int i = top + 1; i < count; ++i) out[i] = 0.0;
    out[top] = bessel::j(bessel::Order(nu0 + top), x);
    if (top - 1 >= turn) out[top - 1] = bessel::j(bessel::Order(nu0 + top - 1), x);
    for (int i = top - 2; i >= turn; --i) out[i] = (2.0 * (nu0 + i + 1) / x) * out[i + 1] - out[i + 2];
}

inline bool consecutive_integer_spacing(const std::vector<double>& orders) {
    for (std::size_t j = 1; j < orders.size(); ++j)
        if (orders[j] - orders[j - 1] != 1.0) return false;
    return orders.size() >= 2;
}

/// S(rho_i) = sum_j int |b_j|^2 |J_{nu_j}(rho_i g)|^2 dz. Grid points that
/// share a profile value share their Bessel evaluations.
inline std::vector<double> family_sums(const BesselWeightedFamily& family, const ProfileFunction& profile,
                                       const std::vector<double>& rho) {
    family.validate();
    if (!(family.z == profile.z)) throw std::invalid_argument("family and profile grids differ");
    const auto w = quadrature::simpson_weights(family.z);
    std::map<double, std::vector<double>> by_g;  // g -> per-order weight sum_l w |b_j|^2
    for (int l = 0; l < family.z.count; ++l) {
        auto& acc = by_g[profile.g[l]];
        acc.resize(family.orders.size(), 0.0);
        for (std::size_t j = 0; j < family.orders.size(); ++j) acc[j] += w[l] * family.b[j][l] * family.b[j][l];
    }
    const bool fast = consecutive_integer_spacing(family.orders);
    const int count = static_cast<int>(family.orders.size());
    std::vector<double> out(rho.size());
    parallel_for(rho.size(), [&](std::size_t i) {
        std::vector<double> seq(fast ? count : 0);
        double sum = 0.0;
        for (const auto& [g, acc] : by_g) {
            const double x = rho[i] * g;
            if (fast && x > 0.0) {
                consecutive_orders(family.orders.front(), count, x, seq.data());
                for (int j = 0; j < count; ++j) sum += acc[j] * seq[j] * seq[j];
                continue;
            }
            for (std::size_t j = 0; j < family.orders.size(); ++j) {
                if (acc[j] == 0.0) continue;
                const double v = bessel::j(bessel::Order(family.orders[j]), x);
                sum += acc[j] * v * v;
            }
        }
        out[i] = sum;
    });
    return out;
}

inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace detail

struct RestrictionLemmaReport {
    double q = 0.0;
    int n = 2;
    double lhs = 0.0;            // truncated at r_max
    double lhs_corrected = 0.0;  // plus geometric tail
    double rhs = 0.0;
    double ratio = 0.0;          // lhs_corrected / rhs (0 when both vanish)
    std::vector<int> block_m;    // dyadic index of each block (-1: [0, 1))
    std::vector<double> block_powers;
    double fitted_exponent = 0.0;  // slope of log2(block) over the fit range
    double expected_exponent = 0.0;  // -q(n-1)/2 + n
    bool divergent = false;
};

inline RestrictionLemmaReport restriction_lemma_ratio(const BesselWeightedFamily& family, const ProfileFunction& profile,
                                                      double q, const RadialGrid& grid, int fit_lo = 3, int fit_hi = 8) {
    const int n = family.n;
    RestrictionLemmaReport rep;
    rep.q = q;
    rep.n = n;
    rep.expected_exponent = -0.5 * q * (n - 1) + n;
    const auto sums = detail::family_sums(family, profile, grid.nodes());
    // rho^{n-1} (rho^{-(n-2)} S)^{q/2} = rho^{-q(n-2)/2 + n - 1} S^{q/2}
    const auto norm = mixed_norm_from_squares(grid, n, q, [&](std::size_t i) {
        return std::pow(grid.nodes()[i], -(n - 2)) * sums[i];
    });
    for (const auto& block : grid.blocks()) rep.block_m.push_back(block.m);
    rep.block_powers = norm.block_powers;
    rep.lhs = std::pow(norm.value, q);
    rep.lhs_corrected = std::isinf(norm.tail) ? std::numeric_limits<double>::infinity() : std::pow(norm.corrected, q);
    rep.rhs = std::pow(family.mass(), 0.5 * q);
    rep.ratio = rep.rhs > 0.0 ? rep.lhs_corrected / rep.rhs : 0.0;
    if (rep.rhs == 0.0) rep.lhs_corrected = rep.lhs;
    std::vector<double> xs, ys;
    for (std::size_t b = 0; b < rep.block_m.size(); ++b)
        if (rep.block_m[b] >= fit_lo && rep.block_m[b] <= fit_hi && rep.block_powers[b] > 0.0) {
            xs.push_back(rep.block_m[b]);
            ys.push_back(std::log2(rep.block_powers[b]));
        }
    if (xs.size() >= 2) rep.fitted_exponent = detail::fit_slope(xs, ys);
    rep.divergent = rep.rhs > 0.0 && ((xs.size() >= 2 && rep.fitted_exponent >= 0.0) || std::isinf(norm.tail));
    return rep;
}

// ---------------------------------------------------------------------------
// Dyadic claim and Bessel regimes.
// ---------------------------------------------------------------------------

struct RegimeWindow {
    int alpha = 0;
    double lo = 0.0;
    double hi = 0.0;
    int count = 0;
    double A = 0.0;  // sum of |b_j(z)|^2 over orders in the window
};

/// Orders split at a point z for the block [M, 2M):
/// I0 = [0, Mg/2), Ic = [Mg/2, 4Mg), Iinf = [4Mg, inf), with turning
/// windows G_alpha = [M/2 + alpha w, M/2 + (alpha+1) w), w = M^{1/3} g^{-2/3}.
struct RegimePartition {
    double M = 0.0;
    double z = 0.0;
    double g = 0.0;
    std::vector<std::size_t> members[3];  // 0: I0, 1: Ic, 2: Iinf
    double contribution[3] = {0, 0, 0};   // sum_j |b_j(z)|^2 int_M^{2M} rho |J(rho g)|^2 drho
    std::vector<RegimeWindow> windows;

    [[nodiscard]] std::size_t count(int regime) const { return members[regime].size(); }
    [[nodiscard]] double share(int regime) const {
        const double t = contribution[0] + contribution[1] + contribution[2];
        return t > 0.0 ? contribution[regime] / t : 0.0;
    }
};

inline const char* regime_name(int regime) {
    static const char* names[3] = {"I0", "Ic", "Iinf"};
    return names[regime];
}

inline RegimePartition regime_split(const BesselWeightedFamily& family, const ProfileFunction& profile, double M,
                                    int z_index) {
    family.validate();
    if (z_index < 0 || z_index >= profile.z.count) throw std::out_of_range("regime_split: z index outside the grid");
    RegimePartition part;
    part.M = M;
    part.z = profile.z.at(z_index);
    part.g = profile.g[z_index];
    const double mg = M * part.g;
    for (std::size_t j = 0; j < family.orders.size(); ++j) {
        const double nu = family.orders[j];
        const int r = nu < 0.5 * mg ? 0 : (nu < 4.0 * mg ? 1 : 2);
        part.members[r].push_back(j);
    }
    if (part.g > 0.0) {
        const double width = std::cbrt(M) * std::pow(part.g, -2.0 / 3.0);
        // enough windows to reach past 2M as well as the nominal (Mg)^{2/3}
        const int alpha_max = std::max(static_cast<int>(std::floor(std::pow(mg, 2.0 / 3.0))),
                                       static_cast<int>(std::ceil(1.5 * M / width)) - 1);
        for (int a = 0; a <= alpha_max; ++a)
            part.windows.push_back({a, 0.5 * M + a * width, 0.5 * M + (a + 1) * width, 0, 0.0});
        for (std::size_t j = 0; j < family.orders.size(); ++j) {
            const double nu = family.orders[j];
            if (nu < part.windows.front().lo || nu >= part.windows.back().hi) continue;
            auto& win = part.windows[static_cast<std::size_t>(std::floor((nu - 0.5 * M) / width))];
            ++win.count;
            win.A += family.b[j][z_index] * family.b[j][z_index];
        }
    }
    const auto rule = quadrature::composite_gauss(M, 2.0 * M, 16, std::min(1.0, std::numbers::pi / std::max(part.g, 1e-12)));
    std::vector<int> regime_of(family.orders.size());
    for (int r = 0; r < 3; ++r)
        for (std::size_t j : part.members[r]) regime_of[j] = r;
    const bool fast = detail::consecutive_integer_spacing(family.orders);
    const int count = static_cast<int>(family.orders.size());
    std::vector<double> seq(count);
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const double rho = rule.nodes[i];
        const double x = rho * part.g;
        if (fast && x > 0.0)
            detail::consecutive_orders(family.orders.front(), count, x, seq.data());
        else
            for (int j = 0; j < count; ++j) seq[j] = bessel::j(bessel::Order(family.orders[j]), x);
        for (int j = 0; j < count; ++j) {
            const double b = family.b[j][z_index];
            part.contribution[regime_of[j]] += rule.weights[i] * rho * b * b * seq[j] * seq[j];
        }
    }
    return part;
}

struct ClaimRow {
    int m = 0;
    double M = 0.0;
    double lhs = 0.0;         // int_M^{2M} rho S(rho)^{q/2} drho
    double rhs = 0.0;         // (sum_j int |b_j|^2)^{q/2}
    double normalized = 0.0;  // lhs / (M^{(4-q)/2} rhs)
    double bound = 0.0;       // C M^{(4-q)/2} rhs
    bool holds = true;
    double shares[3] = {0, 0, 0};  // regime shares at the middle of the z-grid
};

namespace detail {

struct BlockSums {
    quadrature::Rule rule;
    std::vector<double> sums;
    double mass = 0.0;
    double shares[3] = {0, 0, 0};
};

inline BlockSums block_sums(const BesselWeightedFamily& family, const ProfileFunction& profile, double M) {
    BlockSums b;
    b.rule = quadrature::composite_gauss(M, 2.0 * M, 16, std::min(1.0, std::numbers::pi / std::max(profile.sup_A, 1e-12)));
    b.sums = family_sums(family, profile, b.rule.nodes);
    b.mass = family.mass();
    const auto part = regime_split(family, profile, M, profile.z.count / 2);
    for (int r = 0; r < 3; ++r) b.shares[r] = part.share(r);
    return b;
}

inline ClaimRow claim_row(const BlockSums& b, double q, int m, double C) {
    if (!(q > 4.0)) throw std::invalid_argument("dyadic claim: q must exceed 4");
    ClaimRow row;
    row.m = m;
    row.M = std::ldexp(1.0, m);
    for (std::size_t i = 0; i < b.rule.size(); ++i)
        row.lhs += b.rule.weights[i] * b.rule.nodes[i] * std::pow(b.sums[i], 0.5 * q);
    row.rhs = std::pow(b.mass, 0.5 * q);
    const double scale = std::pow(row.M, 0.5 * (4.0 - q));
    row.normalized = row.rhs > 0.0 ? row.lhs / (scale * row.rhs) : 0.0;
    row.bound = std::isinf(C) ? C : C * scale * row.rhs;
    row.holds = row.lhs <= row.bound * (1.0 + 1e-12);
    for (int r = 0; r < 3; ++r) row.shares[r] = b.shares[r];
    return row;
}

}  // namespace detail

/// One block of the claim (weight rho, n = 2 form): lhs_block against
/// C M^{(4-q)/2} rhs.
inline ClaimRow dyadic_claim_check(const BesselWeightedFamily& family, const ProfileFunction& profile, double q, int m,
                                   double C = std::numeric_limits<double>::infinity()) {
    return detail::claim_row(detail::block_sums(family, profile, std::ldexp(1.0, m)), q, m, C);
}

struct ClaimSweep {
    double q = 0.0;
    double C = 0.0;  // normalized value on the calibration block, then frozen
    std::vector<ClaimRow> rows;
    [[nodiscard]] bool all_hold() const {
        return std::all_of(rows.begin(), rows.end(), [](const ClaimRow& r) { return r.holds; });
    }
    [[nodiscard]] double max_normalized() const {
        double v = 0.0;
        for (const auto& r : rows) v = std::max(v, r.normalized);
        return v;
    }
};

/// For each q: calibrates C on the first block in `ms`, freezes it, then
/// checks every block. `family_for(M)` supplies the family used on block M;
/// the Bessel sums of a block are shared by all q.
inline std::vector<ClaimSweep> dyadic_claim_sweep(const std::function<BesselWeightedFamily(double M)>& family_for,
                                                  const ProfileFunction& profile, const std::vector<double>& qs,
                                                  const std::vector<int>& ms) {
    if (ms.empty()) throw std::invalid_argument("dyadic claim: no blocks");
    std::vector<ClaimSweep> sweeps(qs.size());
    for (std::size_t b = 0; b < ms.size(); ++b) {
        const double M = std::ldexp(1.0, ms[b]);
        const auto sums = detail::block_sums(family_for(M), profile, M);
        for (std::size_t iq = 0; iq < qs.size(); ++iq) {
            auto& sweep = sweeps[iq];
            sweep.q = qs[iq];
            ClaimRow row = detail::claim_row(sums, qs[iq], ms[b], std::numeric_limits<double>::infinity());
            if (b == 0) sweep.C = row.normalized;
            row.bound = sweep.C * std::pow(M, 0.5 * (4.0 - qs[iq])) * row.rhs;
            row.holds = row.lhs <= row.bound * (1.0 + 1e-12);
            sweep.rows.push_back(row);
        }
    }
    return sweeps;
}

inline ClaimSweep dyadic_claim_sweep(const std::function<BesselWeightedFamily(double M)>& family_for,
                                     const ProfileFunction& profile, double q, const std::vector<int>& ms) {
    return dyadic_claim_sweep(family_for, profile, std::vector<double>{q}, ms).front();
}

// ---------------------------------------------------------------------------
// Duality pairing <(f dGamma)^, h> for a Gaussian h on R^3 (n = 2).
// ---------------------------------------------------------------------------

/// h(xi) = exp(-|xi - c|^2 / (2 sigma^2)).
struct GaussianProbe {
    double cx = 0.0, cy = 0.0, cz = 0.0;
    double sigma = 1.0;
    [[nodiscard]] double operator()(double rho, double phi, double zeta) const {
        const double x = rho * std::cos(phi) - cx, y = rho * std::sin(phi) - cy, z = zeta - cz;
        return std::exp(-(x * x + y * y + z * z) / (2.0 * sigma * sigma));
    }
    [[nodiscard]] double reach() const { return std::hypot(cx, cy, cz) + 9.0 * sigma; }
};

/// int_{R^3} (f dGamma)^(xi) h(xi) dxi from extend(): Gauss in rho, trapezoid
/// in phi, the DFT zeta-grid (trapezoid) in zeta.
inline complex pairing_extension_side(const spherical::CoefficientField& field, const SurfaceOfRevolution& surface,
                                      const GaussianProbe& h, int padding = 16, int phi_nodes = 128) {
    if (field.n() != 2) throw std::invalid_argument("pairing: implemented for surfaces in R^3 (n = 2)");
    const double reach = h.reach();
    const auto rho_rule = quadrature::composite_gauss(0.0, reach, 16, 0.5);
    const auto ext = extend(field, surface, rho_rule.nodes, padding, std::min(reach, std::numbers::pi / field.z().step()));
    const auto q = spherical::angular_quadrature(2, phi_nodes);
    complex total{};
    for (std::size_t i = 0; i < rho_rule.size(); ++i) {
        const double rho = rho_rule.nodes[i];
        for (std::size_t c = 0; c < ext.zeta.size(); ++c) {
            complex inner{};
            for (int hh = 0; hh < field.harmonics(); ++hh) {
                const auto idx = spherical::from_flat(2, hh);
                double ang = 0.0;  // int Y(phi) h(rho, phi, zeta) dphi
                for (std::size_t l = 0; l < q.size(); ++l)
                    ang += q.weights[l] * spherical::harmonic(2, idx, q.points[l]) * h(rho, q.points[l].theta, ext.zeta[c]);
                inner += phase(idx.degree) * ang * ext.values[hh](i, c);
            }
            total += rho_rule.weights[i] * rho * ext.zeta_step * inner;
        }
    }
    return extension_constant(2) * total;
}

}  // namespace restriction_lab::extension
