// Radial profile of T_m applied to a planar Gaussian, for a smooth bump
// multiplier on [1, 2]; two-column output (r, T_m f(r)) for plotting.
//   multiplier_profile [r_max]   (r_max a power of two, default 32)
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>

#include "restriction_lab/radial_multiplier.hpp"

using namespace restriction_lab;
using namespace restriction_lab::multiplier;

int main(int argc, char** argv) {
    const double r_max = argc > 1 ? std::atof(argv[1]) : 32.0;
    const auto spec = multipliers::smooth_bump(1.0, 2.0);
    // radial f(|x|) in the plane is sqrt(2 pi) f times the constant harmonic
    RadialField f{2, 0, 10.0, [](int, double t) { return std::sqrt(2 * std::numbers::pi) * std::exp(-0.5 * t * t); }};
    const auto grid = output_grid(r_max, spec.b);
    const auto out = apply_Tm(f, spec, grid);
    std::printf("# r  T_m f(r)   (||T_m f||_{2,2} = %.6g, ||f||_{2,2} = %.6g)\n", mixed_norm_p2(out, grid, 2.0),
                mixed_norm_p2(f.sample(grid.nodes()), grid, 2.0));
    for (std::size_t i = 0; i < grid.size(); i += 4)
        std::printf("%.6f %.10e\n", grid.nodes()[i], out.values(0, i) / std::sqrt(2 * std::numbers::pi));
}
