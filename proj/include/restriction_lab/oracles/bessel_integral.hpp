#pragma once

// Reference J_n for integer n from Bessel's integral
//   J_n(x) = (1/2pi) int_0^{2pi} cos(n t - x sin t) dt,
// whose periodic integrand makes the trapezoid rule converge geometrically
// once the node count exceeds x + n.

#include <cmath>
#include <numbers>

namespace restriction_lab::oracles {

inline double bessel_j_integral(int n, double x) {
    const int nodes = 2 * static_cast<int>(x + n) + 128;
    long double sum = 0.0L;
    for (int i = 0; i < nodes; ++i) {
        const long double t = 2.0L * std::numbers::pi_v<long double> * i / nodes;
        sum += std::cos(static_cast<long double>(n) * t - static_cast<long double>(x) * std::sin(t));
    }
    return static_cast<double>(sum / nodes);
}

}  // namespace restriction_lab::oracles
