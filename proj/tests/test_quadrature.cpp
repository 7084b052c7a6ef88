#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "restriction_lab/quadrature.hpp"

namespace q = restriction_lab::quadrature;

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
    for (int n : {1, 2, 5, 8, 16, 33}) {
        const auto& rule = q::gauss_legendre(n);
        for (int deg = 0; deg <= 2 * n - 1; ++deg) {
            double sum = 0.0;
            for (int i = 0; i < n; ++i) sum += rule.weights[i] * std::pow(rule.nodes[i], deg);
            const double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1);
            EXPECT_NEAR(sum, exact, 1e-14) << "n=" << n << " deg=" << deg;
        }
    }
}

TEST(GaussLegendre, NodesAreSortedAndSymmetric) {
    const auto& rule = q::gauss_legendre(17);
    for (int i = 0; i + 1 < 17; ++i) EXPECT_LT(rule.nodes[i], rule.nodes[i + 1]);
    for (int i = 0; i < 17; ++i) EXPECT_NEAR(rule.nodes[i], -rule.nodes[16 - i], 1e-15);
}

TEST(CompositeGauss, RespectsPanelWidth) {
    const auto rule = q::composite_gauss(0.0, 10.0, 8, 0.3);
    EXPECT_EQ(rule.size(), 34u * 8u);
    EXPECT_NEAR(rule.integrate([](double x) { return std::sin(x); }), 1.0 - std::cos(10.0), 1e-13);
}

TEST(Simpson, ExactForCubicsWithEvenAndOddIntervalCounts) {
    for (int count : {5, 6, 7, 64, 129}) {
        const q::UniformGrid grid{-1.0, 2.0, count};
        const auto w = q::simpson_weights(grid);
        double sum = 0.0;
        for (int i = 0; i < count; ++i) {
            const double x = grid.at(i);
            sum += w[i] * (x * x * x - 2 * x + 1);
        }
        EXPECT_NEAR(sum, (16.0 - 1.0) / 4.0 - (4.0 - 1.0) + 3.0, 1e-12) << count;
    }
}

TEST(Trapezoid, SpectralForPeriodicIntegrands) {
    const q::UniformGrid grid{0.0, 2.0 * std::numbers::pi, 33};
    const auto w = q::trapezoid_weights(grid);
    double sum = 0.0;
    for (int i = 0; i < grid.count; ++i) sum += w[i] * std::exp(std::cos(grid.at(i)));
    EXPECT_NEAR(sum, 2.0 * std::numbers::pi * std::cyl_bessel_i(0.0, 1.0), 1e-13);
}
