#pragma once

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace restriction_lab::quadrature {

/// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

namespace detail {

inline GaussRule compute_gauss_legendre(int n) {
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Tricomi's initial guess, then Newton on P_n.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0, p1 = x;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

}  // namespace detail

/// Cached Gauss-Legendre rule; n >= 1.
inline const GaussRule& gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    static std::mutex mutex;
    static std::map<int, GaussRule> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, detail::compute_gauss_legendre(n)).first;
    return it->second;
}

/// A flat list of quadrature nodes and weights on some interval.
struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;

    [[nodiscard]] std::size_t size() const noexcept { return nodes.size(); }

    template <class F>
    double integrate(F&& f) const {
        double sum = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(nodes[i]);
        return sum;
    }
};

/// Appends an n-point Gauss rule mapped onto [lo, hi].
inline void append_gauss_panel(Rule& rule, double lo, double hi, int n) {
    const GaussRule& g = gauss_legendre(n);
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    for (int i = 0; i < n; ++i) {
        rule.nodes.push_back(mid + half * g.nodes[i]);
        rule.weights.push_back(half * g.weights[i]);
    }
}

/// Composite Gauss rule on [lo, hi] with panels no wider than max_width.
inline Rule composite_gauss(double lo, double hi, int nodes_per_panel, double max_width) {
    Rule rule;
    if (!(hi > lo)) return rule;
    int panels = 1;
    if (std::isfinite(max_width) && max_width > 0.0)
        panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / max_width - 1e-12)));
    const double width = (hi - lo) / panels;
    rule.nodes.reserve(static_cast<std::size_t>(panels) * nodes_per_panel);
    rule.weights.reserve(static_cast<std::size_t>(panels) * nodes_per_panel);
    for (int p = 0; p < panels; ++p)
        append_gauss_panel(rule, lo + p * width, p + 1 == panels ? hi : lo + (p + 1) * width,
                           nodes_per_panel);
    return rule;
}

/// Uniform grid of `count` points from lo to hi inclusive.
struct UniformGrid {
    double lo = 0.0;
    double hi = 1.0;
    int count = 2;

    [[nodiscard]] double step() const noexcept { return count > 1 ? (hi - lo) / (count - 1) : 0.0; }
    [[nodiscard]] double at(int i) const noexcept { return lo + i * step(); }
    friend bool operator==(const UniformGrid&, const UniformGrid&) = default;
};

/// Trapezoid weights on a uniform grid.
inline std::vector<double> trapezoid_weights(const UniformGrid& grid) {
    std::vector<double> w(grid.count, grid.step());
    if (grid.count == 1) {
        w[0] = 0.0;
        return w;
    }
    w.front() *= 0.5;
    w.back() *= 0.5;
    return w;
}

/// Composite Simpson weights on a uniform grid. An odd number of intervals
/// closes with Simpson's 3/8 rule on the last three.
inline std::vector<double> simpson_weights(const UniformGrid& grid) {
    const int n = grid.count;
    const double h = grid.step();
    if (n < 3) return trapezoid_weights(grid);
    std::vector<double> w(n, 0.0);
    const int intervals = n - 1;
    const int simpson_intervals = (intervals % 2 == 0) ? intervals : intervals - 3;
    for (int i = 0; i < simpson_intervals; i += 2) {
        w[i] += h / 3.0;
        w[i + 1] += 4.0 * h / 3.0;
        w[i + 2] += h / 3.0;
    }
    if (simpson_intervals != intervals) {
        const int s = simpson_intervals;
        w[s] += 3.0 * h / 8.0;
        w[s + 1] += 9.0 * h / 8.0;
        w[s + 2] += 9.0 * h / 8.0;
        w[s + 3] += 3.0 * h / 8.0;
    }
    return w;
}

}  // namespace restriction_lab::quadrature
