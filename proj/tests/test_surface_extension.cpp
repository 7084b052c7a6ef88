#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "restriction_lab/oracles/extension_quadrature.hpp"
#include "restriction_lab/oracles/gaussian_duality.hpp"
#include "restriction_lab/surface_extension.hpp"

using namespace restriction_lab;
using namespace restriction_lab::extension;
using spherical::CoefficientField;

namespace {

// a_{k,j}(z) = c0 + c1 cos(3z) + c2 z^2 with normal c's
CoefficientField smooth_random_field(int n, int k_max, quadrature::UniformGrid z, unsigned seed) {
    CoefficientField field(n, k_max, z);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    for (int h = 0; h < field.harmonics(); ++h) {
        const double c0 = normal(rng), c1 = normal(rng), c2 = normal(rng);
        for (int l = 0; l < z.count; ++l) {
            const double zz = z.at(l);
            field.data()(h, l) = c0 + c1 * std::cos(3 * zz) + c2 * zz * zz;
        }
    }
    return field;
}

}  // namespace

TEST(SurfaceFactors, CylinderConeBump) {
    const auto cyl = surface_measure_factors(profiles::cylinder(33), 2);
    for (std::size_t i = 0; i < cyl.G1.size(); ++i) {
        EXPECT_DOUBLE_EQ(cyl.G1[i], 1.0);
        EXPECT_DOUBLE_EQ(cyl.G2[i], 1.0);
    }
    const auto cone = surface_measure_factors(profiles::cone(33), 2);
    for (int i = 0; i < 33; ++i) {
        const double z = cone.profile.z.at(i);
        EXPECT_NEAR(cone.G1[i], z * std::sqrt(2.0), 1e-14);
        EXPECT_NEAR(cone.G2[i], z * std::sqrt(2.0), 1e-14);
    }
    const auto bump = surface_measure_factors(profiles::bump(33), 2);
    EXPECT_NEAR(bump.G1[16], 1.25, 1e-14);
    EXPECT_NEAR(bump.G2[16], 1.25, 1e-14);
    const auto bump3 = surface_measure_factors(profiles::bump(33), 3);
    EXPECT_NEAR(bump3.G1[16], 1.25 * 1.25, 1e-14);
    EXPECT_NEAR(bump3.G2[16], std::pow(1.25, 1.5), 1e-14);
    EXPECT_EQ(bump.sup_A, bump.profile.sup_A);
    EXPECT_NEAR(bump.sup_B, 1.0, 1e-14);
}

TEST(SurfaceFactors, RejectsNegativeProfile) {
    const auto p = ProfileFunction::from_samples("neg", {0, 1, 3}, {1.0, -0.1, 1.0});
    EXPECT_THROW(surface_measure_factors(p, 2), std::invalid_argument);
}

TEST(Extend, ZeroField) {
    const auto s = surface_measure_factors(profiles::bump(33), 2);
    const auto e = extend(CoefficientField(2, 2, s.profile.z), s, {0.5, 3.0});
    for (const auto& block : e.values)
        for (const auto& v : block.data()) EXPECT_EQ(v, complex{});
}

TEST(Extend, AliasingReported) {
    const auto s = surface_measure_factors(profiles::cylinder(33), 2);
    CoefficientField f(2, 0, s.profile.z);
    const double nyquist = std::numbers::pi / s.profile.z.step();
    EXPECT_THROW(extend(f, s, {1.0}, 4, 1.01 * nyquist), resolution_error);
    EXPECT_NO_THROW(extend(f, s, {1.0}, 4, nyquist));
}

TEST(Extend, GridMatchesDirectSummation) {
    for (int n : {2, 3}) {
        const auto s = surface_measure_factors(profiles::bump(65), n);
        const auto field = smooth_random_field(n, 3, s.profile.z, 2);
        const std::vector<double> rho{0.3, 2.0, 7.5};
        const auto e = extend(field, s, rho, 4, 20.0);
        for (std::size_t i = 0; i < rho.size(); ++i)
            for (std::size_t c = 0; c < e.zeta.size(); c += 7)
                for (int h = 0; h < field.harmonics(); ++h) {
                    // single-harmonic field through the direct pointwise sum
                    CoefficientField one(n, 3, s.profile.z);
                    for (int l = 0; l < s.profile.z.count; ++l) one.data()(h, l) = field.data()(h, l);
                    const auto idx = spherical::from_flat(n, h);
                    const spherical::SpherePoint pole{0.4, 1.1};
                    const complex direct = extension_value(one, s, rho[i], pole, e.zeta[c]);
                    const complex expected = extension_constant(n) * phase(idx.degree) *
                                             spherical::harmonic(n, idx, pole) * e.values[h](i, c);
                    EXPECT_NEAR(std::abs(direct - expected), 0.0, 1e-11 * (1 + std::abs(direct)));
                }
    }
}

TEST(Extend, CylinderSingleHarmonicAgainstOscillatoryQuadrature) {
    // g = 1: E(rho, zeta) = J_k(rho) int_0^1 a(z) e^{-i z zeta} dz
    const auto s = surface_measure_factors(profiles::cylinder(513), 2);
    CoefficientField f(2, 4, s.profile.z);
    const int h = spherical::flat_index(2, {3, 2});
    auto a = [](double z) { return std::exp(-z) * (1 + z); };
    for (int l = 0; l < s.profile.z.count; ++l) f.data()(h, l) = a(s.profile.z.at(l));
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> ur(0.2, 30.0);
    std::vector<double> rho(20);
    for (double& r : rho) r = ur(rng);
    const auto e = extend(f, s, rho, 4, 12.0);
    std::uniform_int_distribution<std::size_t> pick(0, e.zeta.size() - 1);
    const auto rule = quadrature::composite_gauss(0.0, 1.0, 20, 0.05);
    for (std::size_t i = 0; i < rho.size(); ++i) {
        const std::size_t c = pick(rng);
        const double zeta = e.zeta[c];
        const double re = rule.integrate([&](double z) { return a(z) * std::cos(z * zeta); });
        const double im = rule.integrate([&](double z) { return -a(z) * std::sin(z * zeta); });
        const complex ref = bessel::j(bessel::Order(3.0), rho[i]) * complex(re, im);
        // trapezoid error O(dz^2 zeta^2)
        EXPECT_NEAR(std::abs(e.values[h](i, c) - ref), 0.0, 2e-5) << rho[i] << " " << zeta;
    }
}

TEST(Extend, BruteForceSurfaceIntegral) {
    const auto s = surface_measure_factors(profiles::bump(1025), 2);
    // f = 1 + z cos t + sin 2t in the orthonormal basis of S^1
    CoefficientField field(2, 2, s.profile.z);
    const double r2pi = std::sqrt(2 * std::numbers::pi), rpi = std::sqrt(std::numbers::pi);
    for (int l = 0; l < s.profile.z.count; ++l) {
        field({0, 1}, l) = r2pi;
        field({1, 1}, l) = rpi * s.profile.z.at(l);
        field({2, 2}, l) = rpi;
    }
    auto f = [](double z, double t) { return 1.0 + z * std::cos(t) + std::sin(2 * t); };
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> ur(0.5, 8.0), up(0.0, 2 * std::numbers::pi), uz(-8.0, 8.0);
    for (int i = 0; i < 5; ++i) {
        const double rho = ur(rng), phi = up(rng), zeta = uz(rng);
        const complex ref = oracles::surface_fourier_transform(f, s.profile.g_fn, s.profile.dg_fn, 0.0, 1.0, rho, phi, zeta);
        const complex got = extension_value(field, s, rho, {phi}, zeta);
        EXPECT_LE(std::abs(got - ref), 1e-4 * std::abs(ref)) << rho << " " << phi << " " << zeta;
    }
}

TEST(Extend, DiscreteParsevalInZeta) {
    const auto s = surface_measure_factors(profiles::bump(65), 2);
    const auto field = smooth_random_field(2, 1, s.profile.z, 8);
    const double dz = s.profile.z.step();
    const auto e = extend(field, s, {2.5}, 4);  // full period of zeta
    const auto w = quadrature::trapezoid_weights(s.profile.z);
    for (int h = 0; h < field.harmonics(); ++h) {
        const int k = spherical::from_flat(2, h).degree;
        double sum = 0.0, expected = 0.0;
        for (std::size_t c = 0; c < e.zeta.size(); ++c) sum += std::norm(e.values[h](0, c)) * e.zeta_step;
        for (int l = 0; l < s.profile.z.count; ++l) {
            const double F = w[l] * s.G2[l] * field.data()(h, l) * bessel::j(bessel::Order(k), 2.5 * s.profile.g[l]);
            expected += 2 * std::numbers::pi / dz * F * F;
        }
        EXPECT_NEAR(sum, expected, 1e-11 * expected);
    }
}

TEST(Duality, PairingMatchesSurfaceSide) {
    for (const auto& prof : {profiles::cylinder(129), profiles::bump(129)}) {
        const auto s = surface_measure_factors(prof, 2);
        const auto field = smooth_random_field(2, 3, s.profile.z, 40);
        std::vector<double> zs(prof.z.count);
        for (int l = 0; l < prof.z.count; ++l) zs[l] = prof.z.at(l);
        const GaussianProbe h{0.4, -0.3, 0.7, 1.0};
        const complex lhs = pairing_extension_side(field, s, h);
        const complex rhs = oracles::pairing_surface_side(
            [&](int l, double t) {
                double v = 0.0;
                for (int hh = 0; hh < field.harmonics(); ++hh)
                    v += field.data()(hh, l) * spherical::harmonic(2, field.index(hh), {t});
                return v;
            },
            zs, prof.g, s.G1, quadrature::trapezoid_weights(prof.z), h.cx, h.cy, h.cz, h.sigma);
        EXPECT_LE(std::abs(lhs - rhs), 1e-6 * std::abs(rhs)) << prof.name << " " << lhs << " " << rhs;
    }
}

TEST(ExtensionQuotient, HomogeneousAndRotationInvariant) {
    const auto s = surface_measure_factors(profiles::bump(65), 2);
    const auto grid = RadialGrid::dyadic(256, 16, 1.0);
    auto field = smooth_random_field(2, 3, s.profile.z, 5);
    const double base = extension_quotient(field, s, 5.0, grid).quotient;
    auto scaled = field;
    for (double& v : scaled.data().data()) v *= -4.0;
    EXPECT_NEAR(extension_quotient(scaled, s, 5.0, grid).quotient, base, 1e-12 * base);
    // rotation by pi/2: cos(k t) <-> sin(k t) up to sign for odd k
    auto rotated = field;
    for (int k = 1; k <= 3; ++k)
        for (int l = 0; l < s.profile.z.count; ++l) {
            std::swap(rotated({k, 1}, l), rotated({k, 2}, l));
            rotated({k, 1}, l) *= -1;
        }
    EXPECT_NEAR(extension_quotient(rotated, s, 5.0, grid).quotient, base, 1e-12 * base);
    EXPECT_THROW(extension_quotient(CoefficientField(2, 1, s.profile.z), s, 5.0, grid), std::invalid_argument);
    EXPECT_THROW(extension_quotient(field, s, 2.0, grid), std::invalid_argument);
}

TEST(ExtensionQuotient, StableUnderRefinement) {
    const auto s = surface_measure_factors(profiles::cylinder(65), 2);
    auto make = [&](int k_max) {
        CoefficientField f(2, k_max, s.profile.z);
        for (int l = 0; l < s.profile.z.count; ++l) f({0, 1}, l) = 1.0;
        return f;
    };
    const double a = extension_quotient(make(2), s, 5.0, RadialGrid::dyadic(512, 16, 1.0)).quotient;
    const double b = extension_quotient(make(4), s, 5.0, RadialGrid::dyadic(1024, 16, 1.0)).quotient;
    EXPECT_TRUE(std::isfinite(a));
    EXPECT_NEAR(a, b, 0.02 * b);
}

TEST(ExtensionQuotient, SweepInQ) {
    const auto s = surface_measure_factors(profiles::bump(65), 2);
    const auto field = smooth_random_field(2, 2, s.profile.z, 6);
    const auto grid = RadialGrid::dyadic(512, 16, 1.0);
    const auto q45 = extension_quotient(field, s, 4.5, grid);
    const auto q6 = extension_quotient(field, s, 6.0, grid);
    EXPECT_TRUE(std::isfinite(q45.quotient));
    EXPECT_TRUE(std::isfinite(q6.quotient));
    EXPECT_GT(q45.quotient, 0.0);
    EXPECT_GT(q6.quotient, 0.0);
}

TEST(RestrictionLemma, ZeroFamily) {
    const auto prof = profiles::cylinder(33);
    const auto fam = BesselWeightedFamily::single(2, 3.0, prof.z, [](double) { return 0.0; });
    const auto rep = restriction_lemma_ratio(fam, prof, 5.0, RadialGrid::dyadic(64));
    EXPECT_EQ(rep.lhs, 0.0);
    EXPECT_EQ(rep.rhs, 0.0);
    EXPECT_EQ(rep.ratio, 0.0);
    EXPECT_FALSE(rep.divergent);
}

TEST(RestrictionLemma, FamilyValidation) {
    const auto prof = profiles::cylinder(33);
    EXPECT_THROW(BesselWeightedFamily::single(3, 0.25, prof.z, [](double) { return 1.0; }), std::invalid_argument);
    EXPECT_NO_THROW(BesselWeightedFamily::single(3, 0.5, prof.z, [](double) { return 1.0; }));
}

TEST(RestrictionLemma, BlockDecayAboveThreshold) {
    const auto prof = profiles::cylinder(65);
    const auto fam = BesselWeightedFamily::single(2, 3.0, prof.z, [](double) { return 1.0; });
    const auto a = restriction_lemma_ratio(fam, prof, 5.0, RadialGrid::dyadic(512, 16, 1.0));
    const auto b = restriction_lemma_ratio(fam, prof, 5.0, RadialGrid::dyadic(1024, 16, 1.0));
    EXPECT_NEAR(a.expected_exponent, -0.5, 1e-15);
    EXPECT_NEAR(a.fitted_exponent, a.expected_exponent, 0.3);
    EXPECT_FALSE(a.divergent);
    EXPECT_NEAR(a.ratio, b.ratio, 0.01 * b.ratio);
}

TEST(RestrictionLemma, BelowThresholdFlagged) {
    const auto prof = profiles::cylinder(65);
    const auto fam = BesselWeightedFamily::single(2, 3.0, prof.z, [](double) { return 1.0; });
    const auto rep = restriction_lemma_ratio(fam, prof, 3.5, RadialGrid::dyadic(1024, 16, 1.0));
    EXPECT_TRUE(rep.divergent);
    EXPECT_GT(rep.fitted_exponent, 0.0);
}

TEST(RestrictionLemma, ConsecutiveOrderRecurrence) {
    std::vector<double> seq(600);
    for (double nu0 : {0.0, 0.5, 4.0})
        for (double x : {0.3, 3.0, 17.3, 120.0, 450.0}) {
            extension::detail::consecutive_orders(nu0, 600, x, seq.data());
            for (int i = 0; i < 600; ++i)
                EXPECT_NEAR(seq[i], bessel::j(bessel::Order(nu0 + i), x), 1e-14) << nu0 << " " << x << " " << i;
        }
}

TEST(RegimeSplit, AllInOrigin) {
    const auto prof = profiles::cylinder(9);
    BesselWeightedFamily fam{2, prof.z, {1, 2, 3}, {std::vector<double>(9, 1.0), std::vector<double>(9, 1.0),
                                                    std::vector<double>(9, 1.0)}};
    const auto part = regime_split(fam, prof, 16.0, 4);
    EXPECT_EQ(part.count(0), 3u);
    EXPECT_EQ(part.count(1), 0u);
    EXPECT_EQ(part.count(2), 0u);
    EXPECT_NEAR(part.share(0), 1.0, 1e-15);
}

TEST(RegimeSplit, HalfOpenBoundary) {
    const auto prof = profiles::cylinder(9);
    BesselWeightedFamily fam{2, prof.z, {64.0, 8.0}, {std::vector<double>(9, 1.0), std::vector<double>(9, 1.0)}};
    const auto part = regime_split(fam, prof, 16.0, 0);  // 4 M g = 64, M g / 2 = 8
    EXPECT_EQ(part.count(2), 1u);
    EXPECT_EQ(part.members[2].front(), 0u);
    EXPECT_EQ(part.count(1), 1u);
}

TEST(RegimeSplit, WindowsMatchEnumeration) {
    for (double M : {8.0, 32.0, 128.0}) {
        const auto prof = profiles::bump(33);
        const auto fam = BesselWeightedFamily::spread(2, M, prof.z);
        for (int zi : {0, 10, 16}) {
            const auto part = regime_split(fam, prof, M, zi);
            EXPECT_EQ(part.count(0) + part.count(1) + part.count(2), fam.orders.size());
            const double width = std::cbrt(M) * std::pow(part.g, -2.0 / 3.0);
            EXPECT_LE(part.windows.front().lo, M);
            EXPECT_GE(part.windows.back().hi, 2 * M);
            EXPECT_GE(static_cast<double>(part.windows.size()), std::floor(std::pow(M * part.g, 2.0 / 3.0)) + 1);
            for (const auto& win : part.windows) {
                int count = 0;
                for (double nu : fam.orders)
                    if (nu >= M / 2 + win.alpha * width && nu < M / 2 + (win.alpha + 1) * width) ++count;
                EXPECT_EQ(win.count, count);
                EXPECT_DOUBLE_EQ(win.A, count);
            }
        }
    }
}

TEST(DyadicClaim, ZeroFamilyAndQRange) {
    const auto prof = profiles::cylinder(33);
    auto fam = BesselWeightedFamily::spread(2, 8.0, prof.z);
    for (auto& b : fam.b) std::fill(b.begin(), b.end(), 0.0);
    const auto row = dyadic_claim_check(fam, prof, 5.0, 3, 1.0);
    EXPECT_EQ(row.lhs, 0.0);
    EXPECT_EQ(row.bound, 0.0);
    EXPECT_TRUE(row.holds);
    EXPECT_THROW(dyadic_claim_check(fam, prof, 4.0, 3), std::invalid_argument);
}

TEST(DyadicClaim, UniformAcrossBlocks) {
    const auto prof = profiles::cylinder(33);
    const auto sweeps = dyadic_claim_sweep([&](double M) { return BesselWeightedFamily::spread(2, M, prof.z); }, prof,
                                           std::vector<double>{5.0, 6.0}, {3, 4, 5, 6, 7});
    for (const auto& sweep : sweeps) {
        EXPECT_TRUE(sweep.all_hold()) << sweep.q;
        EXPECT_LE(sweep.max_normalized(), sweep.C * (1 + 1e-12));
        EXPECT_GE(sweep.rows.back().normalized, 0.5 * sweep.C);  // no decay to zero either: a genuine band
    }
}
