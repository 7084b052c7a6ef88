#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "restriction_lab/oracles/planar_multiplier.hpp"
#include "restriction_lab/radial_multiplier.hpp"

using namespace restriction_lab;
using namespace restriction_lab::multiplier;

namespace {

// k_{1/2} from U_r(s) = sqrt(2/pi) sin(rs).
double half_order_k(double t, double r, double s) {
    const double u = 2.0 / std::numbers::pi;
    return u * (t * std::sin(r * s) * std::cos(t * s) - r * std::sin(t * s) * std::cos(r * s)) / (t * t - r * r);
}

// K_{1/2} for m = 1 on [a, b]: (2/pi) int_a^b sin(ts) sin(rs) ds.
double half_order_K(double t, double r, double a, double b) {
    auto prim = [&](double s) {
        return 0.5 * (std::sin((t - r) * s) / (t - r) - std::sin((t + r) * s) / (t + r));
    };
    return 2.0 / std::numbers::pi * (prim(b) - prim(a));
}

RadialField gaussian_field(int n, int k_max, double width = 1.0) {
    RadialField f;
    f.n = n;
    f.k_max = k_max;
    f.support = 12.0 * width;
    f.value = [width](int h, double t) {
        const double u = t / width;
        return (1.0 + 0.3 * h) * std::pow(u, h % 3) * std::exp(-0.5 * u * u);
    };
    return f;
}

double relative_gap(const RadialCoefficients<double>& a, const RadialCoefficients<double>& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        num = std::max(num, std::abs(a.values.data()[i] - b.values.data()[i]));
        den = std::max(den, std::abs(b.values.data()[i]));
    }
    return num / den;
}

}  // namespace

TEST(MultiplierSpec, BuiltinsAndVariation) {
    EXPECT_THROW(MultiplierSpec::make("x", 0.0, 1.0, [](double) { return 1.0; }, [](double) { return 0.0; }),
                 std::invalid_argument);
    EXPECT_THROW(multipliers::by_name("nope", 1, 2), std::invalid_argument);
    const auto lin = multipliers::linear(1.0, 2.0);
    EXPECT_NEAR(lin.total_variation, 1.0, 1e-13);
    EXPECT_NEAR(lin.sup_abs, 2.0, 1e-13);
    const auto bump = multipliers::sin4_bump(1.0, 3.0);
    EXPECT_NEAR(bump.total_variation, 2.0, 1e-10);  // rises 0 -> 1 -> 0
    EXPECT_NEAR(bump.sup_abs, 1.0, 1e-10);
    const auto smooth = multipliers::smooth_bump(1.0, 2.0);
    EXPECT_NEAR(smooth.total_variation, 2.0, 1e-10);
    EXPECT_EQ(smooth(0.5), 0.0);
    EXPECT_EQ(smooth(2.5), 0.0);
    // dm agrees with a finite difference of m
    for (const auto& spec : {bump, smooth})
        for (double s : {1.2, 1.5, 1.77}) {
            const double h = 1e-6;
            EXPECT_NEAR(spec.dm(s), (spec.m(s + h) - spec.m(s - h)) / (2 * h), 1e-6) << spec.name;
        }
}

TEST(KernelK, ZeroMultiplier) {
    EXPECT_EQ(kernel_K(0.0, 2.0, 3.0, multipliers::zero()), 0.0);
}

TEST(KernelK, HalfOrderClosedForm) {
    const auto one = multipliers::constant(1.0, 0.5, 2.5);
    for (auto [t, r] : {std::pair{2.0, 3.0}, std::pair{0.3, 7.0}, std::pair{40.0, 41.5}, std::pair{90.0, 5.0}})
        EXPECT_NEAR(kernel_K(0.5, t, r, one), half_order_K(t, r, 0.5, 2.5), 1e-10) << t << "," << r;
}

TEST(KernelK, BoundaryTermIdentityForConstantMultiplier) {
    const double eps = 1e-3;
    const auto one = multipliers::constant(1.0, eps, 1.0);
    const double boundary = kernel_k_core(0.0, 2.0, 3.0, eps) - kernel_k_core(0.0, 2.0, 3.0, 1.0);
    EXPECT_NEAR(kernel_K(0.0, 2.0, 3.0, one), boundary, 1e-8);
}

TEST(KernelK, Symmetric) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.1, 50.0), al(0.0, 20.0);
    const auto spec = multipliers::sin4_bump(1.0, 2.0);
    for (int i = 0; i < 10; ++i) {
        const double a = al(rng), t = u(rng), r = u(rng);
        EXPECT_NEAR(kernel_K(a, t, r, spec), kernel_K(a, r, t, spec), 1e-12);
    }
}

TEST(KernelK, ReportsPanelBudget) {
    EXPECT_THROW(kernel_K(0.0, 1e4, 1e4, multipliers::linear(1.0, 2.0), 8, 1000), resolution_error);
}

TEST(KernelCore, HalfOrderClosedForm) {
    for (auto [t, r, s] : {std::array{2.0, 3.0, 1.5}, std::array{0.2, 9.0, 0.7}, std::array{30.0, 29.0, 2.0}})
        EXPECT_NEAR(kernel_k_core(0.5, t, r, s), half_order_k(t, r, s), 1e-10);
}

TEST(KernelCore, DerivativeInSIsProductKernel) {
    // d/ds k = -sqrt(rt) J(ts) J(rs) s
    for (double alpha : {0.0, 1.0, 3.5}) {
        const double t = 2.3, r = 4.1, s = 1.3, h = 1e-5;
        const double fd = (kernel_k_core(alpha, t, r, s + h) - kernel_k_core(alpha, t, r, s - h)) / (2 * h);
        const Order o(alpha);
        EXPECT_NEAR(fd, -std::sqrt(r * t) * bessel::j(o, t * s) * bessel::j(o, r * s) * s, 1e-8);
    }
}

TEST(KernelCore, DiagonalLimit) {
    for (double alpha : {0.0, 0.5, 2.0, 7.0})
        for (double r : {0.5, 3.0, 12.0}) {
            const double s = 1.7;
            // symmetric in (t, r), so the midpoint diagonal is second-order accurate
            EXPECT_NEAR(kernel_k_core(alpha, r + 1e-3, r, s), kernel_k_diagonal(alpha, r + 5e-4, s), 1e-4);
            // and the one-sided gap shrinks at least linearly (up to the O(delta^2) part)
            const double g3 = std::abs(kernel_k_core(alpha, r + 1e-3, r, s) - kernel_k_diagonal(alpha, r, s));
            const double g4 = std::abs(kernel_k_core(alpha, r + 1e-4 * 1.5, r, s) - kernel_k_diagonal(alpha, r, s));
            EXPECT_LE(g4, 0.2 * g3 + 1e-6);
            // inside the switch the diagonal form is used
            EXPECT_NEAR(kernel_k_core(alpha, r + 5e-5, r, s), kernel_k_diagonal(alpha, r + 2.5e-5, s), 1e-15);
        }
    // Taylor oracle at alpha = 1/2: the closed form approached along t -> r.
    EXPECT_NEAR(kernel_k_diagonal(0.5, 2.0, 1.5), half_order_k(2.0 + 1e-6, 2.0, 1.5), 1e-6);
}

TEST(KernelCore, FourTermsReproduceKernel) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.1, 30.0), al(0.0, 10.0), ss(0.5, 3.0);
    for (int i = 0; i < 50; ++i) {
        const double a = al(rng), t = u(rng), r = u(rng), s = ss(rng);
        const auto terms = kernel_core_terms(a, t, r, s);
        const double k = kernel_k_core(a, t, r, s);
        EXPECT_NEAR(terms.sum(), k, 1e-10 * std::max(1.0, std::abs(k)));
    }
    EXPECT_THROW(kernel_core_terms(1.0, 2.0, 2.0, 1.0), std::invalid_argument);
}

TEST(ApplyTs, ZeroField) {
    RadialField f{2, 2, 4.0, [](int, double) { return 0.0; }};
    const auto out = apply_Ts(f, 1.5, RadialGrid::dyadic(16));
    for (double v : out.values.data()) EXPECT_EQ(v, 0.0);
}

TEST(ApplyTs, DilationCovariance) {
    const auto f = gaussian_field(2, 2);
    const std::vector<double> radii{0.05, 0.7, 1.9, 3.3, 8.0, 17.5, 40.0};
    for (double s : {0.5, 2.0, 4.0}) {
        const auto lhs = apply_Ts(f, s, radii);
        std::vector<double> scaled;
        for (double r : radii) scaled.push_back(s * r);
        const auto rhs = apply_Ts(f.dilated(s), 1.0, scaled);
        for (std::size_t i = 0; i < lhs.values.size(); ++i)
            EXPECT_NEAR(lhs.values.data()[i], rhs.values.data()[i], 1e-9) << s;
    }
}

TEST(ApplyTs, PrincipalValueRouteAgrees) {
    for (int n : {2, 3}) {
        const auto f = gaussian_field(n, 1);
        const std::vector<double> radii{0.4, 1.25, 2.0, 5.5};
        const auto full = apply_Ts(f, 1.3, radii);
        const auto pv = apply_Ts_principal_value(f, 1.3, radii);
        for (std::size_t i = 0; i < full.values.size(); ++i)
            EXPECT_NEAR(full.values.data()[i], pv.values.data()[i], 1e-6) << n;
    }
}

TEST(ApplyTs, HalfOrderClosedFormKernel) {
    // n = 3, k = 0 gives order 1/2; integrate f against the closed-form kernel.
    RadialField f{3, 0, 6.0, [](int, double t) { return std::exp(-t * t); }};
    const double s = 2.0;
    const std::vector<double> radii{0.3, 1.0, 2.7};
    const auto out = apply_Ts(f, s, radii);
    for (std::size_t j = 0; j < radii.size(); ++j) {
        const double r = radii[j];
        // split at r so the removable singularity sits on a panel end
        auto rule = quadrature::composite_gauss(0.0, r, 30, 0.1);
        const auto right = quadrature::composite_gauss(r, 6.0, 30, 0.1);
        rule.nodes.insert(rule.nodes.end(), right.nodes.begin(), right.nodes.end());
        rule.weights.insert(rule.weights.end(), right.weights.begin(), right.weights.end());
        const double ref = rule.integrate([&](double t) { return f.value(0, t) * (t / r) * half_order_k(t, r, s); });
        EXPECT_NEAR(out.values(0, j), ref, 1e-10);
    }
}

TEST(ApplyTs, DiskMultiplierAtPTwo) {
    // T^s is minus the ball multiplier of radius s: an L^2 contraction.
    const auto grid = output_grid(64, 2.0);
    for (const auto& f : random_trial_fields(2, 2, 3, 17)) {
        const double in = mixed_norm_p2(f.sample(grid.nodes()), grid, 2.0);
        for (double s : {1.0, 2.0}) EXPECT_LE(mixed_norm_p2(apply_Ts(f, s, grid), grid, 2.0), in * (1 + 1e-8));
    }
}

TEST(ApplyTm, ZeroMultiplier) {
    const auto out = apply_Tm(gaussian_field(2, 1), multipliers::zero(), RadialGrid::dyadic(16));
    for (double v : out.values.data()) EXPECT_EQ(v, 0.0);
}

TEST(ApplyTm, DecompositionMatchesDirectKernel) {
    const auto grid = output_grid(64, 2.0);
    for (const auto& spec : {multipliers::linear(1.0, 2.0), multipliers::sin4_bump(1.0, 2.0)}) {
        const auto f = random_trial_fields(2, 2, 1, 5).front();
        const MultiplierPlan plan(spec, 2, 2, f.support, grid.nodes());
        const auto dec = plan.apply(f, TmRoute::Decomposition);
        const auto dir = plan.apply(f, TmRoute::DirectKernel);
        for (double p : {2.0, 3.0})
            EXPECT_NEAR(mixed_norm_p2(dec, grid, p), mixed_norm_p2(dir, grid, p), 1e-7 * mixed_norm_p2(dir, grid, p));
        EXPECT_LE(relative_gap(dec, dir), 1e-7) << spec.name;
    }
}

TEST(ApplyTm, DirectRouteMatchesKernelK) {
    const auto spec = multipliers::sin4_bump(1.0, 2.0);
    const auto f = gaussian_field(2, 0);
    const std::vector<double> radii{0.5, 2.5, 6.0};
    const auto out = MultiplierPlan(spec, 2, 0, f.support, radii).apply(f, TmRoute::DirectKernel);
    const auto rule = input_rule(f.support, spec.b, 16);
    for (std::size_t j = 0; j < radii.size(); ++j) {
        double ref = 0.0;
        for (std::size_t l = 0; l < rule.size(); ++l) {
            const double t = rule.nodes[l];
            ref += rule.weights[l] * f.value(0, t) * std::sqrt(t / radii[j]) * kernel_K(0.0, t, radii[j], spec);
        }
        EXPECT_NEAR(out.values(0, j), ref, 1e-9);
    }
}

TEST(ApplyTm, HarmonicChannelsDoNotMix) {
    const auto grid = RadialGrid::dyadic(16);
    RadialField f{3, 2, 5.0, [](int h, double t) { return h == 4 ? std::exp(-t * t) : 0.0; }};
    const auto out = apply_Tm(f, multipliers::sin4_bump(), grid);
    for (int h = 0; h < out.harmonics(); ++h) {
        double m = 0.0;
        for (std::size_t i = 0; i < out.nodes(); ++i) m = std::max(m, std::abs(out.values(h, i)));
        if (h == 4)
            EXPECT_GT(m, 1e-3);
        else
            EXPECT_EQ(m, 0.0) << h;
    }
}

TEST(ApplyTm, PlanarDftOracle) {
    // Radial f(|x|) in the plane is the single coefficient sqrt(2 pi) f of Y_0.
    auto gauss = [](double r) { return std::exp(-0.5 * r * r); };
    const auto spec = multipliers::smooth_bump(1.0, 2.0);
    RadialField f{2, 0, 10.0, [&](int, double t) { return std::sqrt(2 * std::numbers::pi) * gauss(t); }};
    const auto grid = output_grid(64, 2.0);
    const auto radial = apply_Tm(f, spec, grid);
    const auto planar = oracles::planar_radial_multiplier(gauss, [&](double s) { return spec(s); }, 512, 128.0);
    for (double p : {1.5, 2.0, 3.0}) {
        const double a = mixed_norm_p2(radial, grid, p), b = planar.mixed_norm(p);
        EXPECT_NEAR(a, b, 1e-3 * b) << p;
    }
}

TEST(OperatorNorm, ZeroAndIdentity) {
    const auto grid = RadialGrid::dyadic(16);
    const auto trials = random_trial_fields(2, 1, 4, 3);
    const RadialOperator zero = [&](const RadialField& f) { return RadialCoefficients<double>(f.n, f.k_max, grid.size()); };
    const RadialOperator id = [&](const RadialField& f) { return f.sample(grid.nodes()); };
    EXPECT_EQ(operator_norm_estimate(zero, trials, grid, 2.0).value, 0.0);
    EXPECT_NEAR(operator_norm_estimate(id, trials, grid, 1.7).value, 1.0, 1e-10);
    EXPECT_THROW(operator_norm_estimate(id, std::vector<RadialField>{}, grid, 2.0), std::invalid_argument);
    // reproducible under a fixed seed
    EXPECT_EQ(operator_norm_estimate(id, 2, 1, 3, 9, grid, 3.0).quotients,
              operator_norm_estimate(id, 2, 1, 3, 9, grid, 3.0).quotients);
}

TEST(Subordination, ZeroMultiplier) {
    const auto grid = output_grid(32, 2.0);
    const auto f = gaussian_field(2, 1);
    const MultiplierPlan plan(multipliers::zero(), 2, 1, f.support, grid.nodes());
    const auto rep = subordination_check(f, plan, grid, 2.0);
    EXPECT_EQ(rep.lhs, 0.0);
    EXPECT_EQ(rep.rhs, 0.0);
    EXPECT_TRUE(rep.holds());
}

TEST(Subordination, PlancherelCase) {
    const auto grid = output_grid(64, 2.0);
    const auto spec = multipliers::smooth_bump(1.0, 2.0);
    for (const auto& f : random_trial_fields(2, 2, 3, 31)) {
        const MultiplierPlan plan(spec, 2, 2, f.support, grid.nodes());
        const auto rep = subordination_check(f, plan, grid, 2.0);
        EXPECT_LE(rep.lhs / rep.norm_f, spec.sup_abs + 1e-8);
        EXPECT_LE(rep.c_grid, 1.0 + 1e-8);
        EXPECT_TRUE(rep.holds());
    }
}

TEST(Subordination, BudgetAtPOneHalf) {
    const auto grid = output_grid(64, 2.0);
    const auto spec = multipliers::linear(1.0, 2.0);
    const auto trials = random_trial_fields(2, 1, 4, 77);
    const MultiplierPlan plan(spec, 2, 1, trials.front().support, grid.nodes());
    for (const auto& f : trials) {
        const auto rep = subordination_check(f, plan, grid, 1.5);
        EXPECT_TRUE(rep.holds()) << rep.lhs << " " << rep.budget << " " << rep.constant * rep.rhs;
        EXPECT_EQ(rep.terms.size(), plan.kernel().s_nodes().size());
        EXPECT_GT(rep.c_grid, 0.0);
    }
}
