// Lattice points on x^2 + y^2 = N: how the clustering statistic M and the
// L^4 square-ratio behave as N picks up more representations.
//   lattice_circle [N ...]
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "restriction_lab/discrete_restriction.hpp"

using namespace restriction_lab::discrete;

int main(int argc, char** argv) {
    std::vector<long long> Ns{5, 25, 65, 325, 1105, 5525};
    if (argc > 1) {
        Ns.clear();
        for (int i = 1; i < argc; ++i) Ns.push_back(std::atoll(argv[i]));
    }
    std::printf("%8s %6s %4s %10s %10s\n", "N", "points", "M", "ratio", "sup_int");
    for (long long N : Ns) {
        const auto config = lattice_points_on_circle(N);
        if (config.points.empty()) {
            std::printf("%8lld %6d  (not a sum of two squares)\n", N, 0);
            continue;
        }
        const auto r = ratio_statistic(config);
        std::printf("%8lld %6zu %4d %10.6f %10.3f\n", N, config.size(), r.M, r.ratio, r.scan.integral);
    }
}
