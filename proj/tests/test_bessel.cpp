#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "restriction_lab/bessel.hpp"
#include "restriction_lab/oracles/bessel_integral.hpp"
#include "restriction_lab/oracles/bessel_series.hpp"

namespace bessel = restriction_lab::bessel;
using bessel::Order;
using bessel::Regime;
using restriction_lab::oracles::bessel_j_integral;
using restriction_lab::oracles::bessel_j_series;

TEST(BesselJ, ValuesAtOrigin) {
    EXPECT_EQ(bessel::j(Order(0), 0.0), 1.0);
    EXPECT_EQ(bessel::j(Order(1), 0.0), 0.0);
    EXPECT_EQ(bessel::j(Order(2.5), 0.0), 0.0);
}

TEST(BesselJ, OrderZeroAtOneMatchesSeries) {
    const double ref = bessel_j_series(0.0, 1.0);
    EXPECT_NEAR(ref, 0.7651976866, 1e-10);
    EXPECT_NEAR(bessel::j(Order(0), 1.0), ref, 1e-12);
}

TEST(BesselJ, HalfOrderClosedForm) {
    const double x = std::numbers::pi / 2;
    EXPECT_NEAR(bessel::j(Order(0.5), x), 2.0 / std::numbers::pi, 1e-15);
    for (double y : {0.1, 1.0, 7.3, 40.0, 900.0}) {
        const double closed = std::sqrt(2.0 / (std::numbers::pi * y)) * std::sin(y);
        EXPECT_NEAR(bessel::j(Order(0.5), y), closed, 1e-13 * std::sqrt(2.0 / y)) << y;
    }
}

TEST(BesselJ, RejectsInvalidArguments) {
    EXPECT_THROW(bessel::j(Order(1), -1e-3), std::domain_error);
    EXPECT_THROW(Order(-0.5), std::domain_error);
    EXPECT_THROW(Order(1e4 + 1), std::out_of_range);
    EXPECT_NO_THROW(bessel::j(Order(1e4), 1.2e4));
}

TEST(BesselJ, AgreesWithSeriesOracleUpToThirty) {
    double worst = 0.0;
    for (double nu : {0.0, 0.5, 1.0, 1.5, 2.0, 3.7, 5.0, 10.0, 20.0, 33.3, 50.0, 100.0, 150.5, 200.0}) {
        for (int i = 1; i <= 60; ++i) {
            const double x = 0.5 * i;
            const double ref = bessel_j_series(nu, x);
            if (std::abs(ref) < 1e-280) continue;  // underflow: relative error meaningless
            const double rel = std::abs(bessel::j(Order(nu), x) - ref) / std::abs(ref);
            worst = std::max(worst, rel);
            EXPECT_LE(rel, 1e-10) << "nu=" << nu << " x=" << x;
        }
    }
    RecordProperty("worst_relative_error", std::to_string(worst));
}

TEST(BesselJ, AgreesWithIntegralOracleForLargeArguments) {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> order(0, 200);
    std::uniform_real_distribution<double> arg(30.0, 2000.0);
    int checked = 0;
    while (checked < 300) {
        const int n = order(rng);
        const double x = arg(rng);
        const double ref = bessel_j_integral(n, x);
        // The oracle's own absolute error is ~1e-17; stay clear of zeros.
        if (std::abs(ref) < 1e-5) continue;
        EXPECT_LE(std::abs(bessel::j(Order(n), x) - ref), 1e-10 * std::abs(ref)) << "n=" << n << " x=" << x;
        ++checked;
    }
}

TEST(BesselJ, ContinuousAcrossEvaluationRegimes) {
    // Sweep through the branch switch points of a typical implementation.
    for (double nu : {0.0, 3.5, 20.0, 150.0}) {
        double prev = bessel::j(Order(nu), 0.01);
        for (double x = 0.02; x < 400.0; x += 0.01) {
            const double cur = bessel::j(Order(nu), x);
            EXPECT_LT(std::abs(cur - prev), 0.011) << nu << " " << x;  // |J'| <= 1
            prev = cur;
        }
    }
}

TEST(BesselJ, RecurrenceResidual) {
    for (double nu : {1.0, 1.5, 2.0, 7.25, 30.0, 120.0, 199.0})
        for (double x : {0.3, 1.0, 5.0, 29.0, 31.0, 77.7, 150.0, 500.0, 1999.0}) {
            const double jm = bessel::j(Order(nu - 1), x);
            const double jp = bessel::j(Order(nu + 1), x);
            const double j0 = bessel::j(Order(nu), x);
            EXPECT_LE(std::abs(jm + jp - (2 * nu / x) * j0), 1e-9 * std::max(1.0, std::abs(j0))) << nu << " " << x;
        }
}

TEST(BesselJPrime, MatchesRecurrence) {
    for (double nu : {1.0, 1.5, 2.0, 4.5, 10.0, 60.0, 200.0})
        for (double x : {0.2, 1.0, 3.3, 12.0, 45.0, 250.0, 1500.0}) {
            const double rec = 0.5 * (bessel::j(Order(nu - 1), x) - bessel::j(Order(nu + 1), x));
            EXPECT_NEAR(bessel::j_prime(Order(nu), x), rec, 1e-10) << nu << " " << x;
        }
}

TEST(BesselJPrime, SmallArgumentLimit) {
    EXPECT_NEAR(bessel::j_prime(Order(1), 1e-8), 0.5, 1e-12);
    EXPECT_EQ(bessel::j_prime(Order(1), 0.0), 0.5);
}

TEST(BesselJPrime, OrderZeroIsMinusJ1) {
    EXPECT_NEAR(bessel::j_prime(Order(0), 1.0), -bessel::j(Order(1), 1.0), 1e-15);
}

TEST(BesselJPrime, MatchesCentralDifferences) {
    const double h = 1e-5;
    for (auto [nu, x] : std::vector<std::pair<double, double>>{{2, 5}, {0, 3}, {0.5, 2}, {7.5, 9}, {30, 31}}) {
        const double fd = (bessel::j(Order(nu), x + h) - bessel::j(Order(nu), x - h)) / (2 * h);
        EXPECT_NEAR(bessel::j_prime(Order(nu), x), fd, 1e-6);
    }
}

TEST(BesselJPrime, OneSignChangeBetweenConsecutiveZeros) {
    for (double nu : {0.0, 1.0, 5.0, 20.0}) {
        const double lo = 2 * nu, hi = 2 * nu + 50;
        const double step = 1e-3;
        std::vector<double> zeros;
        double prev = bessel::j(Order(nu), lo);
        for (double x = lo + step; x <= hi; x += step) {
            const double cur = bessel::j(Order(nu), x);
            if ((prev < 0) != (cur < 0)) zeros.push_back(x);
            prev = cur;
        }
        ASSERT_GE(zeros.size(), 10u);
        for (std::size_t z = 0; z + 1 < zeros.size(); ++z) {
            int changes = 0;
            double dprev = bessel::j_prime(Order(nu), zeros[z]);
            for (double x = zeros[z] + step; x < zeros[z + 1]; x += step) {
                const double d = bessel::j_prime(Order(nu), x);
                if ((dprev < 0) != (d < 0)) ++changes;
                dprev = d;
            }
            EXPECT_EQ(changes, 1) << "nu=" << nu << " between " << zeros[z] << " and " << zeros[z + 1];
        }
    }
}

TEST(DecayBound, LemmaExamples) {
    auto b = bessel::decay_bound(Order(1), 4);
    EXPECT_EQ(b.regime, Regime::Oscillatory);
    EXPECT_DOUBLE_EQ(b.bound, 0.5);

    b = bessel::decay_bound(Order(10), 5);
    EXPECT_EQ(b.regime, Regime::Exponential);
    EXPECT_DOUBLE_EQ(b.bound, 0.1);

    b = bessel::decay_bound(Order(8), 10);
    EXPECT_EQ(b.regime, Regime::TurningPointAbove);
    EXPECT_NEAR(b.rho, 1.0, 1e-15);
    EXPECT_NEAR(b.bound, 0.5, 1e-15);
}

TEST(DecayBound, TurningBelowAndGaps) {
    // nu = 8: r = 8 - 2 rho; rho = 1.5 -> r = 5 (r > nu/2 = 4).
    auto b = bessel::decay_bound(Order(8), 5);
    EXPECT_EQ(b.regime, Regime::TurningPointBelow);
    EXPECT_NEAR(b.bound, 1.0 / (1.5 * 2.0), 1e-15);
    // Just below nu with rho < 1: no clause applies.
    b = bessel::decay_bound(Order(8), 7.5);
    EXPECT_EQ(b.regime, Regime::Unclassified);
    EXPECT_TRUE(std::isinf(b.bound));
}

TEST(DecayBound, PriorityOrder) {
    // r = 2 nu is both oscillatory and turning-above (rho = nu^{2/3} <= 1.5 nu^{2/3}).
    EXPECT_EQ(bessel::decay_bound(Order(27), 54).regime, Regime::Oscillatory);
    // r small is both exponential and origin for nu >= 2.
    EXPECT_EQ(bessel::decay_bound(Order(4), 0.5).regime, Regime::Exponential);
    // nu = 1.5: r = 0.9 is above nu/2 but inside (0, min(1, nu)].
    const auto b = bessel::decay_bound(Order(1.5), 0.9);
    EXPECT_EQ(b.regime, Regime::Origin);
    EXPECT_NEAR(b.bound, std::pow(0.9, 1.5), 1e-15);
    // Orders below 1 only have the origin clause.
    EXPECT_EQ(bessel::decay_bound(Order(0.5), 0.3).regime, Regime::Origin);
    EXPECT_EQ(bessel::decay_bound(Order(0.5), 3.0).regime, Regime::Unclassified);
}

TEST(DecayBound, BoundHoldsWheneverClassified) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> nu_dist(1.0, 200.0), frac(0.0, 3.0);
    for (int i = 0; i < 20000; ++i) {
        const double nu = nu_dist(rng);
        const double r = frac(rng) * nu;
        const auto b = bessel::decay_bound(Order(nu), r);
        if (b.regime == Regime::Unclassified) continue;
        EXPECT_LE(std::abs(bessel::j(Order(nu), r)), b.bound * (1 + 1e-12)) << nu << " " << r;
    }
}

TEST(DecayEnvelope, ItemOneOrderOne) {
    const auto report = bessel::verify_decay_envelope({1.0}, 256);
    const auto& row = report.rows.front();
    EXPECT_EQ(row.item, 1);
    EXPECT_DOUBLE_EQ(row.window_lo, 2.0);
    EXPECT_DOUBLE_EQ(row.window_hi, 200.0);
    EXPECT_LT(row.max_ratio, 1.0);
}

TEST(DecayEnvelope, ExponentialSmallnessAtFifty) {
    const auto report = bessel::verify_decay_envelope({50.0}, 256);
    for (const auto& row : report.rows)
        if (row.item == 2) {
            EXPECT_DOUBLE_EQ(row.window_hi, 25.0);
            EXPECT_LT(row.max_ratio, 1e-3);
        }
}

TEST(DecayEnvelope, TurningBelowAtRhoOne) {
    const double nu = 8.0;
    const double r = nu - std::cbrt(nu);
    EXPECT_LT(std::abs(bessel::j(Order(nu), r)) / bessel::turning_below_bound(nu, 1.0), 1.0);
}

TEST(DecayEnvelope, FullGridHolds) {
    const auto report = bessel::verify_decay_envelope({1, 2, 5, 10, 20, 50, 100, 200}, 256);
    EXPECT_EQ(report.rows.size(), 8u * 5u);
    for (const auto& row : report.rows)
        EXPECT_TRUE(row.holds()) << "item " << row.item << " nu=" << row.nu << " worst r=" << row.worst_r
                                 << " ratio=" << row.max_ratio;
    EXPECT_TRUE(report.all_hold());
}

TEST(DecayEnvelope, OriginRatioStableUnderUnderflow) {
    // J_200(1e-3) / (1e-3)^200 = 2^-200 / 200! (1 + O(r^2)), far below 1 but finite.
    const double ratio = bessel::origin_ratio(Order(200), 1e-3);
    EXPECT_GE(ratio, 0.0);
    EXPECT_LT(ratio, 1e-300);
    const double direct = std::abs(bessel::j(Order(5), 0.5)) / std::pow(0.5, 5);
    EXPECT_NEAR(bessel::origin_ratio(Order(5), 0.5), direct, 1e-15 * direct);
    // Series path against the direct path where both are representable.
    const double nu = 30, r = 0.7;
    double term = 1, sum = 1;
    for (int m = 1; m < 40; ++m) sum += (term *= -0.25 * r * r / (m * (nu + m)));
    EXPECT_NEAR(bessel::origin_ratio(Order(nu), r), sum / (std::pow(2.0, nu) * std::tgamma(nu + 1)), 1e-14 * sum / (std::pow(2.0, nu) * std::tgamma(nu + 1)));
}
