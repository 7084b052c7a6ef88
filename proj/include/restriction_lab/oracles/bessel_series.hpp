#pragma once

// Reference J_nu by the ascending power series in 50-digit arithmetic.
// Independent of the library's evaluation path; used only for verification.

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

namespace restriction_lab::oracles {

using wide = boost::multiprecision::cpp_bin_float_50;

/// sum_m (-1)^m (x/2)^{2m+nu} / (m! Gamma(m+nu+1)), summed until the terms
/// drop below 1e-45 of the running sum. Converges for the whole desk range,
/// though cancellation eats digits beyond x ~ 60.
inline double bessel_j_series(double nu, double x) {
    if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
    const wide half = wide(x) / 2;
    const wide y = -half * half;
    wide term = boost::multiprecision::pow(half, wide(nu)) / boost::math::tgamma(wide(nu) + 1);
    wide sum = term;
    for (int m = 1; m < 2000; ++m) {
        term *= y / (wide(m) * (wide(nu) + m));
        sum += term;
        if (m > x && abs(term) < abs(sum) * wide("1e-45")) break;
    }
    return static_cast<double>(sum);
}

}  // namespace restriction_lab::oracles
