#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/bessel_prime.hpp>

namespace restriction_lab::bessel {

/// Real order nu in [0, max_order].
class Order {
public:
    static constexpr double max_order = 1e4;

    constexpr Order() = default;
    explicit Order(double nu) : nu_(nu) {
        if (!std::isfinite(nu) || nu < 0.0)
            throw std::domain_error("bessel order must be finite and >= 0");
        if (nu > max_order) throw std::out_of_range("bessel order above supported range (1e4)");
    }

    [[nodiscard]] constexpr double nu() const noexcept { return nu_; }

private:
    double nu_ = 0.0;
};

namespace detail {
inline void check_argument(double x) {
    if (!(x >= 0.0)) throw std::domain_error("bessel argument must be >= 0");
    if (!std::isfinite(x)) throw std::domain_error("bessel argument must be finite");
}
}  // namespace detail

/// J_nu(x). Backed by Boost.Math (series / Miller recurrence / Debye and
/// Hankel asymptotics, selected per regime).
inline double j(Order order, double x) {
    detail::check_argument(x);
    if (x == 0.0) return order.nu() == 0.0 ? 1.0 : 0.0;
    return boost::math::cyl_bessel_j(order.nu(), x);
}

/// dJ_nu/dx.
inline double j_prime(Order order, double x) {
    detail::check_argument(x);
    const double nu = order.nu();
    if (x == 0.0) {
        if (nu == 1.0) return 0.5;
        if (nu == 0.0 || nu > 1.0) return 0.0;
        return std::numeric_limits<double>::infinity();
    }
    return boost::math::cyl_bessel_j_prime(nu, x);
}

/// J_nu(x) and J'_nu(x) from two evaluations, J' = (nu/x) J_nu - J_{nu+1}.
struct ValueAndDerivative {
    double value = 0.0;
    double derivative = 0.0;
};

inline ValueAndDerivative j_and_prime(Order order, double x) {
    detail::check_argument(x);
    if (x == 0.0) return {j(order, 0.0), j_prime(order, 0.0)};
    const double nu = order.nu();
    const double jv = boost::math::cyl_bessel_j(nu, x);
    const double jn = boost::math::cyl_bessel_j(nu + 1.0, x);
    return {jv, (nu / x) * jv - jn};
}

/// out[k] = J_{nu0 + k}(x), k = 0..count-1. Upward recurrence
/// J_{v+1} = (2v/x) J_v - J_{v-1} while v < x (where it is stable), direct
/// evaluation beyond.
inline void j_sequence(double nu0, int count, double x, double* out) {
    for (int k = 0; k < count; ++k) {
        const double nu = nu0 + k;
        if (k >= 2 && nu - 1.0 < x)
            out[k] = (2.0 * (nu - 1.0) / x) * out[k - 1] - out[k - 2];
        else
            out[k] = j(Order(nu), x);
    }
}

enum class Regime { Oscillatory, Exponential, TurningPointAbove, TurningPointBelow, Origin, Unclassified };

inline std::string_view to_string(Regime r) {
    switch (r) {
        case Regime::Oscillatory: return "oscillatory";
        case Regime::Exponential: return "exponential";
        case Regime::TurningPointAbove: return "turning_above";
        case Regime::TurningPointBelow: return "turning_below";
        case Regime::Origin: return "origin";
        case Regime::Unclassified: return "unclassified";
    }
    return "unknown";
}

struct RegimeBound {
    Regime regime = Regime::Unclassified;
    double bound = std::numeric_limits<double>::infinity();
    double rho = 0.0;  // turning-point offset |r - nu| / nu^{1/3}; 0 elsewhere
};

// Envelope right-hand sides, one per clause.
inline double oscillatory_bound(double r) { return 1.0 / std::sqrt(r); }
inline double exponential_bound(double nu) { return 1.0 / nu; }
inline double turning_above_bound(double nu, double rho) { return 1.0 / (std::pow(rho, 0.25) * std::cbrt(nu)); }
inline double turning_below_bound(double nu, double rho) { return 1.0 / (rho * std::cbrt(nu)); }
inline double origin_bound(double nu, double r) { return std::pow(r, nu); }

/// Classifies (nu, r) into the first applicable decay clause, in the order
/// oscillatory, exponential, turning point above, turning point below,
/// origin. Points covered by no clause come back Unclassified with an
/// infinite bound.
inline RegimeBound decay_bound(Order order, double r) {
    detail::check_argument(r);
    const double nu = order.nu();
    if (nu >= 1.0) {
        if (r >= 2.0 * nu) return {Regime::Oscillatory, oscillatory_bound(r), 0.0};
        if (r <= 0.5 * nu) return {Regime::Exponential, exponential_bound(nu), 0.0};
        const double scale = std::cbrt(nu);
        const double rho = std::abs(r - nu) / scale;
        const double rho_max = 1.5 * scale * scale;
        if (r >= nu && rho <= rho_max) return {Regime::TurningPointAbove, turning_above_bound(nu, rho), rho};
        if (r < nu && rho >= 1.0 && rho <= rho_max)
            return {Regime::TurningPointBelow, turning_below_bound(nu, rho), rho};
    }
    if (r <= std::min(1.0, nu))
        return {Regime::Origin, origin_bound(nu, r), 0.0};
    return {};
}

/// |J_nu(r)| / r^nu for small r, stable when r^nu underflows: uses the
/// series J_nu(r)/r^nu = 2^-nu/Gamma(nu+1) * sum_m (-r^2/4)^m / (m! (nu+1)_m).
inline double origin_ratio(Order order, double r) {
    const double nu = order.nu();
    const double power = std::pow(r, nu);
    if (power > 1e-250) {
        const double value = j(order, r);
        if (value != 0.0 || r == 0.0) return std::abs(value) / power;
    }
    const double y = -0.25 * r * r;
    double term = 1.0, sum = 1.0;
    for (int m = 1; m < 200; ++m) {
        term *= y / (m * (nu + m));
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return std::exp(std::log(std::abs(sum)) - nu * std::log(2.0) - std::lgamma(nu + 1.0));
}

/// Result of sampling one envelope clause for one order.
struct EnvelopeRow {
    int item = 0;  // 1..5 in the order of decay_bound's clauses
    Regime regime = Regime::Unclassified;
    double nu = 0.0;
    double window_lo = 0.0;
    double window_hi = 0.0;
    int samples = 0;
    double worst_r = 0.0;
    double max_ratio = 0.0;
    double tolerance = 1.0;

    [[nodiscard]] bool holds() const noexcept { return max_ratio <= tolerance; }
};

struct EnvelopeReport {
    std::vector<EnvelopeRow> rows;

    [[nodiscard]] bool all_hold() const noexcept {
        return std::all_of(rows.begin(), rows.end(), [](const EnvelopeRow& r) { return r.holds(); });
    }
    [[nodiscard]] double max_ratio(Regime regime) const noexcept {
        double m = 0.0;
        for (const auto& r : rows)
            if (r.regime == regime) m = std::max(m, r.max_ratio);
        return m;
    }
};

/// Samples each decay clause on its own window and reports the worst
/// |J_nu(r)| / bound. Windows (nu >= 1 for clauses 1-4):
///   1: r in [2 nu, max(200, 4 nu)]
///   2: r in (0, nu/2]
///   3: rho in [0, 1.5 nu^{2/3}],   r = nu + rho nu^{1/3}
///   4: rho in [1, nu^{2/3}],           r = nu - rho nu^{1/3} (the part with r >= 0)
///   5: r in (0, min(1, nu)]
inline EnvelopeReport verify_decay_envelope(const std::vector<double>& nu_grid, int density) {
    if (density < 2) throw std::invalid_argument("verify_decay_envelope: density must be >= 2");
    EnvelopeReport report;
    auto sample = [&](int item, Regime regime, double nu, double lo, double hi, bool open_lo,
                      double tolerance, auto&& ratio_at) {
        EnvelopeRow row{item, regime, nu, lo, hi, density, lo, 0.0, tolerance};
        for (int i = 0; i < density; ++i) {
            // open_lo drops the left endpoint and keeps the right one.
            const double f = open_lo ? double(i + 1) / density : double(i) / (density - 1);
            const double r = lo + f * (hi - lo);
            const double ratio = ratio_at(r);
            if (ratio > row.max_ratio || i == 0) {
                row.max_ratio = ratio;
                row.worst_r = r;
            }
        }
        report.rows.push_back(row);
    };
    for (double nu : nu_grid) {
        const Order order(nu);
        if (nu >= 1.0) {
            const double scale = std::cbrt(nu);
            sample(1, Regime::Oscillatory, nu, 2.0 * nu, std::max(200.0, 4.0 * nu), false, 1.0 + 1e-12,
                   [&](double r) { return std::abs(j(order, r)) / oscillatory_bound(r); });
            sample(2, Regime::Exponential, nu, 0.0, 0.5 * nu, true, 1.0 + 1e-12,
                   [&](double r) { return std::abs(j(order, r)) / exponential_bound(nu); });
            sample(3, Regime::TurningPointAbove, nu, nu, nu + 1.5 * nu, false, 1.0, [&](double r) {
                const double rho = (r - nu) / scale;
                return rho == 0.0 ? 0.0 : std::abs(j(order, r)) / turning_above_bound(nu, rho);
            });
            const double rho_hi = scale * scale;
            if (rho_hi >= 1.0)
                sample(4, Regime::TurningPointBelow, nu, std::max(0.0, nu - rho_hi * scale), nu - scale, false, 1.0,
                       [&](double r) {
                           const double rho = (nu - r) / scale;
                           return std::abs(j(order, r)) / turning_below_bound(nu, rho);
                       });
        }
        if (nu > 0.0)
            sample(5, Regime::Origin, nu, 0.0, std::min(1.0, nu), true, 1.0 + 1e-12,
                   [&](double r) { return origin_ratio(order, r); });
    }
    return report;
}

}  // namespace restriction_lab::bessel
