#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "restriction_lab/quadrature.hpp"

namespace restriction_lab {

/// Profile g >= 0 of a surface of revolution, sampled with its derivative on
/// a uniform z-grid over the compact support [z_a, z_b].
struct ProfileFunction {
    std::string name;
    quadrature::UniformGrid z;
    std::vector<double> g;
    std::vector<double> dg;
    double sup_A = 0.0;  // sup |g|
    double sup_B = 0.0;  // sup |g'|
    // Analytic forms, when known (used by quadrature oracles off the grid).
    std::function<double(double)> g_fn;
    std::function<double(double)> dg_fn;

    [[nodiscard]] std::size_t size() const noexcept { return g.size(); }

    /// Samples an analytic profile and its derivative.
    static ProfileFunction sample(std::string name, quadrature::UniformGrid grid,
                                  std::function<double(double)> g, std::function<double(double)> dg) {
        ProfileFunction p;
        p.name = std::move(name);
        p.z = grid;
        p.g.resize(grid.count);
        p.dg.resize(grid.count);
        for (int i = 0; i < grid.count; ++i) {
            p.g[i] = g(grid.at(i));
            p.dg[i] = dg(grid.at(i));
        }
        p.g_fn = std::move(g);
        p.dg_fn = std::move(dg);
        p.finish();
        return p;
    }

    /// Builds a profile from g samples only; g' by central differences
    /// (one-sided second-order at the ends).
    static ProfileFunction from_samples(std::string name, quadrature::UniformGrid grid, std::vector<double> g) {
        if (static_cast<int>(g.size()) != grid.count || grid.count < 3)
            throw std::invalid_argument("profile: sample count must match the grid (>= 3)");
        ProfileFunction p;
        p.name = std::move(name);
        p.z = grid;
        p.g = std::move(g);
        const double h = grid.step();
        const int n = grid.count;
        p.dg.resize(n);
        for (int i = 1; i + 1 < n; ++i) p.dg[i] = (p.g[i + 1] - p.g[i - 1]) / (2.0 * h);
        p.dg[0] = (-3.0 * p.g[0] + 4.0 * p.g[1] - p.g[2]) / (2.0 * h);
        p.dg[n - 1] = (3.0 * p.g[n - 1] - 4.0 * p.g[n - 2] + p.g[n - 3]) / (2.0 * h);
        p.finish();
        return p;
    }

private:
    void finish() {
        sup_A = 0.0;
        sup_B = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (!std::isfinite(g[i]) || !std::isfinite(dg[i])) throw std::domain_error("profile: non-finite sample");
            sup_A = std::max(sup_A, std::abs(g[i]));
            sup_B = std::max(sup_B, std::abs(dg[i]));
        }
    }
};

namespace profiles {

inline ProfileFunction cylinder(int count, double lo = 0.0, double hi = 1.0) {
    return ProfileFunction::sample("cylinder", {lo, hi, count}, [](double) { return 1.0; },
                                   [](double) { return 0.0; });
}

inline ProfileFunction cone(int count, double lo = 1.0, double hi = 2.0) {
    return ProfileFunction::sample("cone", {lo, hi, count}, [](double z) { return z; }, [](double) { return 1.0; });
}

inline ProfileFunction bump(int count) {
    return ProfileFunction::sample("bump", {0.0, 1.0, count}, [](double z) { return 1.0 + z * (1.0 - z); },
                                   [](double z) { return 1.0 - 2.0 * z; });
}

/// sqrt(1 - z^2) cut at |z| <= 0.9 so that sup|g'| stays finite.
inline ProfileFunction truncated_sphere(int count) {
    return ProfileFunction::sample("truncated_sphere", {-0.9, 0.9, count},
                                   [](double z) { return std::sqrt(1.0 - z * z); },
                                   [](double z) { return -z / std::sqrt(1.0 - z * z); });
}

inline ProfileFunction by_name(const std::string& name, int count) {
    if (name == "cylinder") return cylinder(count);
    if (name == "cone") return cone(count);
    if (name == "bump") return bump(count);
    if (name == "truncated_sphere") return truncated_sphere(count);
    throw std::invalid_argument("unknown profile '" + name + "'");
}

}  // namespace profiles
}  // namespace restriction_lab
