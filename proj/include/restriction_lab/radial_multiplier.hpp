#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "restriction_lab/array.hpp"
#include "restriction_lab/bessel.hpp"
#include "restriction_lab/errors.hpp"
#include "restriction_lab/grids_norms.hpp"
#include "restriction_lab/parallel.hpp"
#include "restriction_lab/quadrature.hpp"
#include "restriction_lab/spherical.hpp"

namespace restriction_lab::multiplier {

using bessel::Order;

/// Radial multiplier m supported on [a, b] with 0 < a < b, given analytically
/// together with m'. Samples on a uniform s-grid, the total variation
/// int_a^b |m'| and sup |m| are recorded at construction.
struct MultiplierSpec {
    std::string name;
    double a = 1.0;
    double b = 2.0;
    std::function<double(double)> m;
    std::function<double(double)> dm;
    quadrature::UniformGrid s_grid;
    std::vector<double> m_samples;
    std::vector<double> dm_samples;
    double total_variation = 0.0;
    double sup_abs = 0.0;

    static MultiplierSpec make(std::string name, double a, double b, std::function<double(double)> m,
                               std::function<double(double)> dm, int samples = 1025) {
        if (!(a > 0.0) || !(b > a) || !std::isfinite(b))
            throw std::invalid_argument("multiplier support must satisfy 0 < a < b < inf");
        MultiplierSpec spec;
        spec.name = std::move(name);
        spec.a = a;
        spec.b = b;
        spec.m = std::move(m);
        spec.dm = std::move(dm);
        spec.s_grid = {a, b, samples};
        for (int i = 0; i < samples; ++i) {
            const double s = spec.s_grid.at(i);
            spec.m_samples.push_back(spec.m(s));
            spec.dm_samples.push_back(spec.dm(s));
            spec.sup_abs = std::max(spec.sup_abs, std::abs(spec.m_samples.back()));
        }
        const auto rule = quadrature::composite_gauss(a, b, 16, (b - a) / 256.0);
        spec.total_variation = rule.integrate([&](double s) { return std::abs(spec.dm(s)); });
        for (double s : rule.nodes) spec.sup_abs = std::max(spec.sup_abs, std::abs(spec.m(s)));
        if (!std::isfinite(spec.total_variation)) throw std::invalid_argument("multiplier has infinite variation");
        return spec;
    }

    /// m extended by zero outside [a, b].
    [[nodiscard]] double operator()(double s) const { return (s < a || s > b) ? 0.0 : m(s); }
};

namespace multipliers {

inline MultiplierSpec zero(double a = 1.0, double b = 2.0) {
    return MultiplierSpec::make("zero", a, b, [](double) { return 0.0; }, [](double) { return 0.0; });
}

inline MultiplierSpec constant(double c, double a = 1.0, double b = 2.0) {
    return MultiplierSpec::make("constant", a, b, [c](double) { return c; }, [](double) { return 0.0; });
}

/// m(s) = s: jumps at both ends, constant slope inside.
inline MultiplierSpec linear(double a = 1.0, double b = 2.0) {
    return MultiplierSpec::make("linear", a, b, [](double s) { return s; }, [](double) { return 1.0; });
}

/// sin^4 of the rescaled support: C^3 at the ends, vanishing there.
inline MultiplierSpec sin4_bump(double a = 1.0, double b = 2.0) {
    const double w = std::numbers::pi / (b - a);
    return MultiplierSpec::make(
        "sin4_bump", a, b, [a, w](double s) { return std::pow(std::sin(w * (s - a)), 4); },
        [a, w](double s) {
            const double x = w * (s - a);
            return 4.0 * w * std::pow(std::sin(x), 3) * std::cos(x);
        });
}

/// exp(1 - 1/(1 - u^2)), u the support mapped to (-1, 1); C-infinity.
inline MultiplierSpec smooth_bump(double a = 1.0, double b = 2.0) {
    auto u_of = [a, b](double s) { return (2.0 * s - a - b) / (b - a); };
    auto m = [u_of](double s) {
        const double u = u_of(s);
        return std::abs(u) >= 1.0 ? 0.0 : std::exp(1.0 - 1.0 / (1.0 - u * u));
    };
    auto dm = [u_of, m, a, b](double s) {
        const double u = u_of(s);
        if (std::abs(u) >= 1.0) return 0.0;
        const double v = 1.0 - u * u;
        return m(s) * (-2.0 * u / (v * v)) * (2.0 / (b - a));
    };
    return MultiplierSpec::make("smooth_bump", a, b, m, dm);
}

inline MultiplierSpec by_name(const std::string& name, double a, double b) {
    if (name == "zero") return zero(a, b);
    if (name == "constant") return constant(1.0, a, b);
    if (name == "linear") return linear(a, b);
    if (name == "sin4_bump") return sin4_bump(a, b);
    if (name == "smooth_bump") return smooth_bump(a, b);
    throw std::invalid_argument("unknown multiplier '" + name + "'");
}

}  // namespace multipliers

// ---------------------------------------------------------------------------
// Kernels.  U_r(s) = sqrt(rs) J_alpha(rs);
//   K_alpha(t, r)    = sqrt(rt) int_a^b m(s) J_alpha(ts) J_alpha(rs) s ds
//   k_alpha(t, r, s) = (U_r U_t' - U_t U_r')(s) / (t^2 - r^2)
//                    = s sqrt(rt) [t J(rs) J'(ts) - r J(ts) J'(rs)] / (t^2 - r^2)
// d/ds k_alpha = -sqrt(rt) J(ts) J(rs) s, hence for m with m' integrable
//   K_alpha = m(a) k(a) - m(b) k(b) + int_a^b m'(s) k(s) ds.
// ---------------------------------------------------------------------------

/// Panel budget for the oscillatory s-quadrature of kernel_K.
inline constexpr long default_max_panels = 1L << 22;

/// K_alpha(t, r) by Gauss panels of width <= pi / (4 max(t, r) b).
inline double kernel_K(double alpha, double t, double r, const MultiplierSpec& spec, int nodes = 8,
                       long max_panels = default_max_panels) {
    if (!(t > 0.0) || !(r > 0.0)) throw std::invalid_argument("kernel_K: t and r must be positive");
    const Order order(alpha);
    const double width = std::numbers::pi / (4.0 * std::max(t, r) * spec.b);
    const double panels = std::ceil((spec.b - spec.a) / width);
    if (panels > static_cast<double>(max_panels))
        throw resolution_error("kernel_K: oscillation needs " + std::to_string(panels) + " panels (budget " +
                               std::to_string(max_panels) + ")");
    const auto rule = quadrature::composite_gauss(spec.a, spec.b, nodes, width);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const double s = rule.nodes[i];
        const double ms = spec.m(s);
        if (ms == 0.0) continue;
        sum += rule.weights[i] * ms * bessel::j(order, t * s) * bessel::j(order, r * s) * s;
    }
    return std::sqrt(r * t) * sum;
}

/// k_alpha(r, r, s) = -(s/2) [x J'(x)^2 + (x - alpha^2/x) J(x)^2], x = rs.
inline double kernel_k_diagonal(double alpha, double r, double s) {
    const double x = r * s;
    const auto jd = bessel::j_and_prime(Order(alpha), x);
    return -0.5 * s * (x * jd.derivative * jd.derivative + (x - alpha * alpha / x) * jd.value * jd.value);
}

/// Below this |t - r| the kernel is replaced by its diagonal value at the
/// midpoint (error O((t - r)^2)).
inline constexpr double diagonal_switch = 1e-4;

inline double kernel_k_core(double alpha, double t, double r, double s) {
    if (!(s > 0.0) || !(t > 0.0) || !(r > 0.0)) throw std::invalid_argument("kernel_k_core: t, r, s must be positive");
    if (std::abs(t - r) < diagonal_switch) return kernel_k_diagonal(alpha, 0.5 * (t + r), s);
    const Order order(alpha);
    const auto jt = bessel::j_and_prime(order, t * s);
    const auto jr = bessel::j_and_prime(order, r * s);
    const double w = s * std::sqrt(r * t) * (t * jr.value * jt.derivative - r * jt.value * jr.derivative);
    return w / ((t - r) * (t + r));
}

/// Partial-fraction split of k_alpha: two terms carry 1/(t - r), two carry
/// 1/(t + r).
struct CoreTerms {
    double t1 = 0.0;  // s sqrt(tr) J'(ts) J(rs) / (2 (t - r))
    double t2 = 0.0;  // s sqrt(tr) J'(ts) J(rs) / (2 (t + r))
    double t3 = 0.0;  // s sqrt(tr) J(ts) J'(rs) / (2 (r - t))
    double t4 = 0.0;  // s sqrt(tr) J(ts) J'(rs) / (2 (t + r))
    [[nodiscard]] double sum() const noexcept { return t1 + t2 + t3 + t4; }
};

inline CoreTerms kernel_core_terms(double alpha, double t, double r, double s) {
    if (t == r) throw std::invalid_argument("kernel_core_terms: singular at t == r");
    const Order order(alpha);
    const auto jt = bessel::j_and_prime(order, t * s);
    const auto jr = bessel::j_and_prime(order, r * s);
    const double c = s * std::sqrt(t * r);
    const double first = c * jt.derivative * jr.value;
    const double second = c * jt.value * jr.derivative;
    return {first / (2.0 * (t - r)), first / (2.0 * (t + r)), second / (2.0 * (r - t)), second / (2.0 * (t + r))};
}

// ---------------------------------------------------------------------------
// Fields and operators.
// ---------------------------------------------------------------------------

/// Order of the radial kernel for degree k in R^n: nu_k = k + (n - 2)/2.
inline double harmonic_order(int n, int k) { return k + 0.5 * (n - 2); }

/// Per-harmonic radial profile f_{k,j}(t), supported in [0, support].
struct RadialField {
    int n = 2;
    int k_max = 0;
    double support = 8.5;
    std::function<double(int flat, double t)> value;

    [[nodiscard]] int harmonics() const { return spherical::harmonic_count(n, k_max); }

    [[nodiscard]] RadialCoefficients<double> sample(const std::vector<double>& nodes) const {
        RadialCoefficients<double> out(n, k_max, nodes.size());
        for (int h = 0; h < out.harmonics(); ++h)
            for (std::size_t i = 0; i < nodes.size(); ++i)
                out.values(h, i) = nodes[i] <= support ? value(h, nodes[i]) : 0.0;
        return out;
    }

    /// t -> f(t / s).
    [[nodiscard]] RadialField dilated(double s) const {
        RadialField g = *this;
        g.support = support * s;
        g.value = [f = value, s](int h, double t) { return f(h, t / s); };
        return g;
    }
};

/// Composite Gauss rule over the support of an input field, fine enough for
/// Bessel oscillation at frequency s_max.
inline quadrature::Rule input_rule(double support, double s_max, int nodes = 16) {
    const double width = std::min(0.5, std::numbers::pi / (2.0 * s_max));
    return quadrature::composite_gauss(0.0, support, nodes, width);
}

/// Dyadic output grid with panels short enough for oscillation at s_max.
inline RadialGrid output_grid(double r_max, double s_max, int nodes = 16) {
    return RadialGrid::dyadic(r_max, nodes, std::min(1.0, std::numbers::pi / (2.0 * s_max)));
}

/// Gauss rule on [a, b] resolving s-oscillation at frequency omega (the
/// largest t + r in play), with at least min_panels panels.
inline quadrature::Rule s_rule(double a, double b, double omega, int nodes = 8, int min_panels = 16) {
    const double width = std::min((b - a) / min_panels, std::numbers::pi / std::max(omega, 1.0));
    return quadrature::composite_gauss(a, b, nodes, width);
}

/// Precomputed Bessel tables for a fixed input rule, output radii and set
/// of s values; evaluates linear combinations sum_i c_i T^{s_i} f (via the
/// k_alpha kernel) and the product-kernel sum sum_i c_i s_i sqrt(rt) J J.
class KernelPlan {
public:
    KernelPlan(int n, int k_max, quadrature::Rule t_rule, std::vector<double> r_nodes, std::vector<double> s_nodes)
        : n_(n), k_max_(k_max), t_(std::move(t_rule)), r_(std::move(r_nodes)), s_(std::move(s_nodes)) {
        spherical::check_dimension(n);
        for (double s : s_)
            if (!(s > 0.0)) throw std::invalid_argument("KernelPlan: s values must be positive");
        for (double r : r_)
            if (!(r > 0.0)) throw std::invalid_argument("KernelPlan: output radii must be positive");
        jt_ = tables(t_.nodes);
        jr_ = tables(r_);
        near_.resize(r_.size());
        for (std::size_t j = 0; j < r_.size(); ++j)
            for (std::size_t l = 0; l < t_.size(); ++l)
                if (std::abs(t_.nodes[l] - r_[j]) < diagonal_switch) near_[j].push_back(l);
    }

    [[nodiscard]] int n() const noexcept { return n_; }
    [[nodiscard]] int k_max() const noexcept { return k_max_; }
    [[nodiscard]] const quadrature::Rule& t_rule() const noexcept { return t_; }
    [[nodiscard]] const std::vector<double>& r_nodes() const noexcept { return r_; }
    [[nodiscard]] const std::vector<double>& s_nodes() const noexcept { return s_; }

    /// Input samples on the plan's t-rule.
    [[nodiscard]] RadialCoefficients<double> sample(const RadialField& f) const {
        if (f.n != n_ || f.k_max > k_max_) throw std::invalid_argument("KernelPlan: field does not match the plan");
        RadialCoefficients<double> in(n_, k_max_, t_.size());
        for (int h = 0; h < f.harmonics(); ++h)
            for (std::size_t l = 0; l < t_.size(); ++l)
                in.values(h, l) = t_.nodes[l] <= f.support ? f.value(h, t_.nodes[l]) : 0.0;
        return in;
    }

    /// sum_i coef_i (T^{s_i} f)(r_j), the t-integral taken against k_alpha.
    [[nodiscard]] RadialCoefficients<double> combine_core(const RadialCoefficients<double>& in,
                                                          const std::vector<double>& coef) const {
        check(in, coef);
        RadialCoefficients<double> out(n_, k_max_, r_.size());
        const std::size_t T = t_.size(), S = s_.size();
        for (int h = 0; h < in.harmonics(); ++h) {
            const int k = spherical::from_flat(n_, h).degree;
            const double nu = harmonic_order(n_, k);
            const auto f = in.values.row(h);
            if (std::all_of(f.begin(), f.end(), [](double v) { return v == 0.0; })) continue;
            // P_il = F_l t^{n/2} t J'(t s_i), Q_il = F_l t^{n/2} J(t s_i), F = weight * f.
            Array2D<double> P(S, T), Q(S, T);
            for (std::size_t i = 0; i < S; ++i) {
                if (coef[i] == 0.0) continue;
                for (std::size_t l = 0; l < T; ++l) {
                    const double t = t_.nodes[l];
                    const double F = t_.weights[l] * f[l] * std::pow(t, 0.5 * n_);
                    const double x = t * s_[i];
                    const double jv = jt_[k](i, l), jn = jt_[k + 1](i, l);
                    P(i, l) = F * t * ((nu / x) * jv - jn);
                    Q(i, l) = F * jv;
                }
            }
            parallel_for(r_.size(), [&](std::size_t j) {
                const double r = r_[j];
                std::vector<double> c(T);
                for (std::size_t l = 0; l < T; ++l) {
                    const double t = t_.nodes[l];
                    c[l] = std::abs(t - r) < diagonal_switch ? 0.0 : 1.0 / ((t - r) * (t + r));
                }
                const double scale = std::pow(r, -0.5 * (n_ - 2));
                double acc = 0.0;
                for (std::size_t i = 0; i < S; ++i) {
                    if (coef[i] == 0.0) continue;
                    const double s = s_[i];
                    const double x = r * s;
                    const double jv = jr_[k](i, j), jn = jr_[k + 1](i, j);
                    const double jp = (nu / x) * jv - jn;
                    const double* Pi = &P(i, 0);
                    const double* Qi = &Q(i, 0);
                    double sp = 0.0, sq = 0.0;
                    for (std::size_t l = 0; l < T; ++l) {
                        sp += Pi[l] * c[l];
                        sq += Qi[l] * c[l];
                    }
                    double value = scale * s * (jv * sp - r * jp * sq);
                    for (std::size_t l : near_[j]) {
                        const double t = t_.nodes[l];
                        value += t_.weights[l] * f[l] * std::pow(t / r, 0.5 * (n_ - 1)) *
                                 kernel_k_diagonal(nu, 0.5 * (t + r), s);
                    }
                    acc += coef[i] * value;
                }
                out.values(h, j) = acc;
            });
        }
        return out;
    }

    /// sum_i coef_i s_i int f(t) (t/r)^{(n-1)/2} sqrt(rt) J(t s_i) J(r s_i) dt:
    /// the kernel K_alpha with the s-integral replaced by the plan's rule.
    [[nodiscard]] RadialCoefficients<double> combine_product(const RadialCoefficients<double>& in,
                                                             const std::vector<double>& coef) const {
        check(in, coef);
        RadialCoefficients<double> out(n_, k_max_, r_.size());
        const std::size_t T = t_.size(), S = s_.size();
        for (int h = 0; h < in.harmonics(); ++h) {
            const int k = spherical::from_flat(n_, h).degree;
            const auto f = in.values.row(h);
            std::vector<double> g(S, 0.0);  // Hankel-type transform of f at each s
            for (std::size_t i = 0; i < S; ++i) {
                if (coef[i] == 0.0) continue;
                double sum = 0.0;
                for (std::size_t l = 0; l < T; ++l)
                    sum += t_.weights[l] * f[l] * std::pow(t_.nodes[l], 0.5 * n_) * jt_[k](i, l);
                g[i] = coef[i] * s_[i] * sum;
            }
            parallel_for(r_.size(), [&](std::size_t j) {
                double acc = 0.0;
                for (std::size_t i = 0; i < S; ++i) acc += g[i] * jr_[k](i, j);
                out.values(h, j) = std::pow(r_[j], -0.5 * (n_ - 2)) * acc;
            });
        }
        return out;
    }

private:
    void check(const RadialCoefficients<double>& in, const std::vector<double>& coef) const {
        if (in.n != n_ || in.k_max > k_max_ || in.nodes() != t_.size())
            throw std::invalid_argument("KernelPlan: input does not match the plan");
        if (coef.size() != s_.size()) throw std::invalid_argument("KernelPlan: one coefficient per s value");
    }

    // J_{nu_k}(x s_i) for k = 0..k_max+1, rows s, columns x. Upward recurrence
    // where it is stable (order below the argument), direct evaluation elsewhere.
    std::vector<Array2D<double>> tables(const std::vector<double>& xs) const {
        const int orders = k_max_ + 2;
        std::vector<Array2D<double>> out(orders, Array2D<double>(s_.size(), xs.size()));
        parallel_for(s_.size(), [&](std::size_t i) {
            std::vector<double> seq(orders);
            for (std::size_t l = 0; l < xs.size(); ++l) {
                bessel::j_sequence(harmonic_order(n_, 0), orders, xs[l] * s_[i], seq.data());
                for (int k = 0; k < orders; ++k) out[k](i, l) = seq[k];
            }
        });
        return out;
    }

    int n_;
    int k_max_;
    quadrature::Rule t_;
    std::vector<double> r_;
    std::vector<double> s_;
    std::vector<Array2D<double>> jt_;
    std::vector<Array2D<double>> jr_;
    std::vector<std::vector<std::size_t>> near_;
};

/// T^s f on the given output radii (full-kernel route).
inline RadialCoefficients<double> apply_Ts(const RadialField& f, double s, const std::vector<double>& r_nodes) {
    KernelPlan plan(f.n, f.k_max, input_rule(f.support, s), r_nodes, {s});
    return plan.combine_core(plan.sample(f), {1.0});
}

inline RadialCoefficients<double> apply_Ts(const RadialField& f, double s, const RadialGrid& out) {
    return apply_Ts(f, s, out.nodes());
}

namespace detail {

/// Gauss panels on [lo, hi] that grow geometrically away from `anchor`
/// (one of the ends), starting at width h and capped at max_width.
inline quadrature::Rule graded_rule(double lo, double hi, bool anchor_at_lo, double h, double max_width, int nodes) {
    quadrature::Rule rule;
    double pos = 0.0;
    const double length = hi - lo;
    double width = h;
    while (pos < length) {
        const double next = std::min(length, pos + width);
        if (anchor_at_lo)
            quadrature::append_gauss_panel(rule, lo + pos, lo + next, nodes);
        else
            quadrature::append_gauss_panel(rule, hi - next, hi - pos, nodes);
        pos = next;
        width = std::min(2.0 * width, max_width);
    }
    return rule;
}

/// PV int_lo^hi H(t) / (t - r) dt for lo < r < hi: the symmetric window
/// [r - h, r + h] contributes int_0^h (H(r+u) - H(r-u)) / u du; h is halved
/// until two estimates agree to `tol` (at most `max_halvings` times).
template <class H>
double principal_value(H&& fn, double r, double lo, double hi, double max_width, double tol = 1e-7,
                       int max_halvings = 12) {
    const int nodes = 16;
    if (!(r > lo && r < hi)) {
        const auto rule = quadrature::composite_gauss(lo, hi, nodes, max_width);
        return rule.integrate([&](double t) { return fn(t) / (t - r); });
    }
    auto estimate = [&](double h) {
        quadrature::Rule window;
        quadrature::append_gauss_panel(window, 0.0, h, nodes);
        double value = window.integrate([&](double u) { return (fn(r + u) - fn(r - u)) / u; });
        if (r - h > lo)
            value += graded_rule(lo, r - h, false, h, max_width, nodes).integrate([&](double t) { return fn(t) / (t - r); });
        if (r + h < hi)
            value += graded_rule(r + h, hi, true, h, max_width, nodes).integrate([&](double t) { return fn(t) / (t - r); });
        return value;
    };
    double h = 0.5 * std::min({r - lo, hi - r, max_width});
    double prev = estimate(h);
    for (int i = 0; i < max_halvings; ++i) {
        h *= 0.5;
        const double cur = estimate(h);
        if (std::abs(cur - prev) <= tol * std::max(1.0, std::abs(cur))) return cur;
        prev = cur;
    }
    throw resolution_error("principal value did not stabilise after " + std::to_string(max_halvings) + " halvings");
}

}  // namespace detail

/// T^s f at the given radii through the four-term split of k_alpha: the two
/// 1/(t - r) terms as principal values, the two 1/(t + r) terms as ordinary
/// integrals. Independent cross-check of apply_Ts.
inline RadialCoefficients<double> apply_Ts_principal_value(const RadialField& f, double s,
                                                           const std::vector<double>& r_nodes) {
    RadialCoefficients<double> out(f.n, f.k_max, r_nodes.size());
    const double max_width = std::min(0.5, std::numbers::pi / (2.0 * s));
    for (int h = 0; h < f.harmonics(); ++h) {
        const Order order(harmonic_order(f.n, spherical::from_flat(f.n, h).degree));
        parallel_for(r_nodes.size(), [&](std::size_t j) {
            const double r = r_nodes[j];
            const auto jr = bessel::j_and_prime(order, r * s);
            auto weight = [&](double t) { return f.value(h, t) * std::pow(t / r, 0.5 * (f.n - 1)) * s * std::sqrt(t * r); };
            // t1 + t3 = [H1(t) - H3(t)] / (t - r) with
            // H1 = w J'(ts) J(rs) / 2, H3 = w J(ts) J'(rs) / 2.
            auto singular = [&](double t) {
                if (t <= 0.0) return 0.0;
                const auto jt = bessel::j_and_prime(order, t * s);
                return 0.5 * weight(t) * jt.derivative * jr.value;
            };
            auto singular3 = [&](double t) {
                if (t <= 0.0) return 0.0;
                return 0.5 * weight(t) * bessel::j(order, t * s) * jr.derivative;
            };
            const double pv1 = detail::principal_value(singular, r, 0.0, f.support, max_width);
            const double pv3 = -detail::principal_value(singular3, r, 0.0, f.support, max_width);
            const auto rule = quadrature::composite_gauss(0.0, f.support, 16, max_width);
            const double regular = rule.integrate([&](double t) {
                const auto jt = bessel::j_and_prime(order, t * s);
                return 0.5 * weight(t) * (jt.derivative * jr.value + jt.value * jr.derivative) / (t + r);
            });
            out.values(h, j) = pv1 + pv3 + regular;
        });
    }
    return out;
}

enum class TmRoute { Decomposition, DirectKernel };

/// Reusable evaluation of T_m for one multiplier, input support and output
/// grid. The s-rule on [a, b] resolves oscillation at t_max + r_max.
class MultiplierPlan {
public:
    MultiplierPlan(MultiplierSpec spec, int n, int k_max, double support, std::vector<double> r_nodes)
        : spec_(std::move(spec)) {
        const double r_max = r_nodes.empty() ? 1.0 : *std::max_element(r_nodes.begin(), r_nodes.end());
        rule_ = s_rule(spec_.a, spec_.b, support + r_max);
        std::vector<double> s_nodes{spec_.a, spec_.b};
        s_nodes.insert(s_nodes.end(), rule_.nodes.begin(), rule_.nodes.end());
        plan_.emplace(KernelPlan(n, k_max, input_rule(support, spec_.b), std::move(r_nodes), std::move(s_nodes)));
    }

    [[nodiscard]] const MultiplierSpec& spec() const noexcept { return spec_; }
    [[nodiscard]] const KernelPlan& kernel() const { return *plan_; }
    [[nodiscard]] const quadrature::Rule& s_quadrature() const noexcept { return rule_; }

    /// Coefficients of m(a) T^a - m(b) T^b + int m'(s) T^s ds on the plan's s values.
    [[nodiscard]] std::vector<double> decomposition_weights() const {
        std::vector<double> c{spec_.m(spec_.a), -spec_.m(spec_.b)};
        for (std::size_t i = 0; i < rule_.size(); ++i) c.push_back(rule_.weights[i] * spec_.dm(rule_.nodes[i]));
        return c;
    }

    [[nodiscard]] RadialCoefficients<double> apply(const RadialField& f, TmRoute route = TmRoute::Decomposition) const {
        const auto in = plan_->sample(f);
        if (route == TmRoute::Decomposition) return plan_->combine_core(in, decomposition_weights());
        std::vector<double> c{0.0, 0.0};
        for (std::size_t i = 0; i < rule_.size(); ++i) c.push_back(rule_.weights[i] * spec_.m(rule_.nodes[i]));
        return plan_->combine_product(in, c);
    }

    /// T^{s_i} f for a single entry of the plan's s values.
    [[nodiscard]] RadialCoefficients<double> apply_single(const RadialCoefficients<double>& in, std::size_t i) const {
        std::vector<double> c(plan_->s_nodes().size(), 0.0);
        c.at(i) = 1.0;
        return plan_->combine_core(in, c);
    }

private:
    MultiplierSpec spec_;
    quadrature::Rule rule_;
    std::optional<KernelPlan> plan_;
};

inline RadialCoefficients<double> apply_Tm(const RadialField& f, const MultiplierSpec& spec, const RadialGrid& out,
                                           TmRoute route = TmRoute::Decomposition) {
    return MultiplierPlan(spec, f.n, f.k_max, f.support, out.nodes()).apply(f, route);
}

// ---------------------------------------------------------------------------
// Norm experiments.
// ---------------------------------------------------------------------------

/// Random Gaussian-mixture profiles: every harmonic gets 1-3 bumps with
/// centres in [0, 3.5], widths in [0.3, 0.6] and normal amplitudes.
inline std::vector<RadialField> random_trial_fields(int n, int k_max, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> centre(0.0, 3.5), width(0.3, 0.6);
    std::uniform_int_distribution<int> bumps(1, 3);
    std::normal_distribution<double> amp;
    std::vector<RadialField> fields;
    const int hcount = spherical::harmonic_count(n, k_max);
    for (int c = 0; c < count; ++c) {
        struct Bump { double c, w, a; };
        std::vector<std::vector<Bump>> per(hcount);
        for (auto& list : per) {
            const int nb = bumps(rng);
            for (int b = 0; b < nb; ++b) list.push_back({centre(rng), width(rng), amp(rng)});
        }
        RadialField f;
        f.n = n;
        f.k_max = k_max;
        f.support = 8.5;
        f.value = [per](int h, double t) {
            double v = 0.0;
            for (const auto& b : per[h]) v += b.a * std::exp(-0.5 * (t - b.c) * (t - b.c) / (b.w * b.w));
            return v;
        };
        fields.push_back(std::move(f));
    }
    return fields;
}

using RadialOperator = std::function<RadialCoefficients<double>(const RadialField&)>;

struct NormEstimate {
    double value = 0.0;  // max quotient over the trials
    std::vector<double> quotients;
};

/// max over trials of ||T f||_{p,2} / ||f||_{p,2}; both norms on `grid`.
inline NormEstimate operator_norm_estimate(const RadialOperator& op, const std::vector<RadialField>& trials,
                                           const RadialGrid& grid, double p) {
    if (trials.empty()) throw std::invalid_argument("operator_norm_estimate: need at least one trial");
    NormEstimate est;
    for (const auto& f : trials) {
        const double denom = mixed_norm_p2(f.sample(grid.nodes()), grid, p);
        const double num = mixed_norm_p2(op(f), grid, p);
        est.quotients.push_back(denom > 0.0 ? num / denom : 0.0);
        est.value = std::max(est.value, est.quotients.back());
    }
    return est;
}

inline NormEstimate operator_norm_estimate(const RadialOperator& op, int n, int k_max, int trials, std::uint64_t seed,
                                           const RadialGrid& grid, double p) {
    return operator_norm_estimate(op, random_trial_fields(n, k_max, trials, seed), grid, p);
}

/// One row of the subordination budget.
struct BudgetTerm {
    double s = 0.0;
    double m = 0.0;
    double abs_dm = 0.0;
    double weight = 0.0;     // boundary: 1; interior: quadrature weight
    double norm_Ts = 0.0;    // ||T^s f||_{p,2}
    double contribution = 0.0;
};

struct SubordinationReport {
    double p = 2.0;
    double lhs = 0.0;          // ||T_m f||_{p,2}
    double norm_f = 0.0;
    double rhs = 0.0;          // (sup|m| + TV(m)) ||f||_{p,2}
    double budget = 0.0;       // |m(a)| ||T^a f|| + |m(b)| ||T^b f|| + int |m'| ||T^s f|| ds
    double c_grid = 0.0;       // max_s ||T^s f|| / ||f|| over the s values used
    double constant = 0.0;     // 2 c_grid: lhs <= constant * rhs follows from the budget
    std::vector<BudgetTerm> terms;
    [[nodiscard]] bool holds(double tol = 1e-9) const {
        return lhs <= budget * (1.0 + tol) + tol && lhs <= constant * rhs * (1.0 + tol) + tol;
    }
};

/// ||T_m f|| <= |m(a)| ||T^a f|| + |m(b)| ||T^b f|| + int_a^b |m'(s)| ||T^s f|| ds
///          <= 2 max_s ||T^s f||/||f|| (sup|m| + TV(m)) ||f||.
inline SubordinationReport subordination_check(const RadialField& f, const MultiplierPlan& plan, const RadialGrid& grid,
                                               double p) {
    if (plan.kernel().r_nodes() != grid.nodes()) throw std::invalid_argument("subordination_check: plan/grid mismatch");
    const auto& spec = plan.spec();
    SubordinationReport rep;
    rep.p = p;
    rep.norm_f = mixed_norm_p2(f.sample(grid.nodes()), grid, p);
    rep.lhs = mixed_norm_p2(plan.apply(f), grid, p);
    rep.rhs = (spec.sup_abs + spec.total_variation) * rep.norm_f;
    const auto in = plan.kernel().sample(f);
    const auto& s_nodes = plan.kernel().s_nodes();
    const auto& rule = plan.s_quadrature();
    for (std::size_t i = 0; i < s_nodes.size(); ++i) {
        BudgetTerm term;
        term.s = s_nodes[i];
        term.m = spec.m(term.s);
        term.abs_dm = std::abs(spec.dm(term.s));
        const bool boundary = i < 2;
        term.weight = boundary ? 1.0 : rule.weights[i - 2];
        const double factor = boundary ? std::abs(term.m) : term.weight * term.abs_dm;
        term.norm_Ts = mixed_norm_p2(plan.apply_single(in, i), grid, p);
        term.contribution = factor * term.norm_Ts;
        rep.budget += term.contribution;
        if (rep.norm_f > 0.0) rep.c_grid = std::max(rep.c_grid, term.norm_Ts / rep.norm_f);
        rep.terms.push_back(term);
    }
    rep.constant = 2.0 * rep.c_grid;
    return rep;
}

}  // namespace restriction_lab::multiplier
