#pragma once

// The ten batch experiments. Each runner first pulls every parameter out of
// the config (so bad configs fail before any work), then computes tables in
// memory. Verification experiments report invariant violations instead of
// throwing, so their evidence is still written.

#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "driver/artifacts.hpp"
#include "driver/config.hpp"
#include "restriction_lab/bessel.hpp"
#include "restriction_lab/discrete_restriction.hpp"
#include "restriction_lab/oracles/gaussian_duality.hpp"
#include "restriction_lab/oracles/planar_multiplier.hpp"
#include "restriction_lab/radial_multiplier.hpp"
#include "restriction_lab/surface_extension.hpp"

namespace restriction_lab::driver {

struct Outcome {
    Echo echo;
    std::vector<Table> tables;
    std::vector<PlotData> plots;
    std::vector<std::string> violations;
    std::vector<std::string> notes;  // one-line summaries for stdout
};

inline std::vector<Artifact> render(const Outcome& o, const Provenance& prov) {
    std::vector<Artifact> out;
    for (const auto& t : o.tables) out.push_back(render_csv(t, prov, o.echo));
    for (const auto& d : o.plots) out.push_back(render_plot(d, prov));
    return out;
}

inline double relative_gap(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

/// a_{k,j}(z) = c0 + c1 cos(3 z) + c2 z^2 with standard normal c's.
inline spherical::CoefficientField smooth_random_field(int n, int k_max, quadrature::UniformGrid z, std::uint64_t seed) {
    spherical::CoefficientField field(n, k_max, z);
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

inline bool power_of_two(double x) { return x > 0.0 && std::abs(std::log2(x) - std::round(std::log2(x))) <= 1e-12; }

inline const std::set<std::string> multiplier_names{"zero", "constant", "linear", "sin4_bump", "smooth_bump"};
inline const std::set<std::string> profile_names{"cylinder", "cone", "bump", "truncated_sphere"};

// ---------------------------------------------------------------------------

inline Outcome run_bessel_check(Params& p) {
    const auto nus = p.numbers("nu", {1, 2, 5, 10, 20, 50, 100, 200}, 0.0, bessel::Order::max_order);
    const int density = static_cast<int>(p.integer("density", 256, 2, 100000));
    Outcome o;
    o.echo = p.finish();
    const auto rep = bessel::verify_decay_envelope(nus, density);
    Table t{"bessel_envelope", {"item", "regime", "nu", "window_lo", "window_hi", "samples", "worst_r", "max_ratio", "holds"}, {}};
    for (const auto& r : rep.rows) {
        t.add(r.item, std::string(bessel::to_string(r.regime)), r.nu, r.window_lo, r.window_hi, r.samples, r.worst_r,
              r.max_ratio, r.holds());
        if (!r.holds())
            o.violations.push_back("envelope item " + fmt(r.item) + " fails at nu=" + fmt(r.nu) + " r=" + fmt(r.worst_r) +
                                   " ratio=" + fmt(r.max_ratio));
    }
    o.tables.push_back(std::move(t));
    o.notes.push_back(fmt(rep.rows.size()) + " envelope rows, all hold: " + fmt(rep.all_hold()));
    return o;
}

// ---------------------------------------------------------------------------

inline discrete::ScanRoute route_from(const std::string& s) {
    if (s == "summed-area") return discrete::ScanRoute::SummedArea;
    if (s == "analytic") return discrete::ScanRoute::Analytic;
    return discrete::ScanRoute::Auto;
}

inline Outcome run_discrete(Params& p) {
    const auto source = p.choice("source", "lattice", {"lattice", "random-separated", "cap-cluster"});
    long long N = 0;
    double R = 0.0;
    int K = 0;
    if (source == "lattice") {
        N = p.integer("N", 25, 1, 100000000);
    } else {
        R = p.number("R", 100.0, 1.0, 1e8);
        K = static_cast<int>(p.integer("K", 12, 1, 10000));
    }
    const auto coeffs = p.choice("coefficients", "unit", {"unit", "random"});
    const int draws = static_cast<int>(p.integer("draws", 1, 1, 100000));
    const int iterations = static_cast<int>(p.integer("ascent_iterations", 0, 0, 100000));
    const double L = p.number("region_side", 3.0, 3.0, 64.0);
    const double step = p.number("step", 0.0, 0.0, 1.0);
    const auto route = p.choice("route", "auto", {"auto", "summed-area", "analytic"});
    const bool randomized = source == "random-separated" || coeffs == "random" || iterations > 0;
    const std::uint64_t seed = randomized ? p.seed() : 0;
    if (coeffs == "unit" && draws > 1) throw config_error("draws > 1 needs random coefficients");
    Outcome o;
    o.echo = p.finish();

    discrete::PointConfiguration config = source == "lattice"            ? discrete::lattice_points_on_circle(N)
                                          : source == "random-separated" ? discrete::random_separated(R, K, seed)
                                                                         : discrete::cap_cluster(R, K);
    if (config.points.empty()) throw config_error("configuration has no points (N not a sum of two squares)");
    const int M = discrete::separation_M(config);
    Table t{"discrete_ratios",
            {"kind", "draw", "radius", "points", "M", "ratio", "value", "integral", "center_x", "center_y", "scan_step",
             "scan_route"}, {}};
    PlotData plot{"discrete_ratios", {"draw", "ratio"}, {}};
    double best_ratio = 0.0;
    std::size_t best_draw = 0;
    for (int d = 0; d < draws; ++d) {
        if (coeffs == "random") config.coefficients = discrete::random_coefficients(config.size(), seed + 1 + d);
        const auto r = discrete::ratio_statistic(config, L, step, route_from(route));
        if (!std::isfinite(r.ratio)) o.violations.push_back("non-finite ratio at draw " + fmt(d));
        t.add(std::string("draw"), d, config.R, config.size(), M, r.ratio, r.scan.value, r.scan.integral,
              r.scan.center[0], r.scan.center[1], r.scan.step, std::string(discrete::to_string(r.scan.route)));
        plot.rows.push_back({double(d), r.ratio});
        if (r.ratio > best_ratio) best_ratio = r.ratio, best_draw = d;
    }
    if (iterations > 0) {
        if (coeffs == "random") config.coefficients = discrete::random_coefficients(config.size(), seed + 1 + best_draw);
        const auto a = discrete::maximize_ratio(config, iterations, seed, L, step, route_from(route));
        for (std::size_t i = 1; i < a.history.size(); ++i)
            if (a.history[i] < a.history[i - 1]) o.violations.push_back("ascent history decreased");
        const double integral = std::pow(a.ratio * std::sqrt(double(M)), 4);
        t.add(std::string("ascent"), static_cast<int>(best_draw), config.R, config.size(), M, a.ratio,
              a.ratio * std::sqrt(double(M)), integral, a.center[0], a.center[1],
              step > 0 ? step : discrete::default_step(config.points), route);
    }
    o.notes.push_back("K=" + fmt(config.size()) + " M=" + fmt(M) + " best random-draw ratio " + fmt(best_ratio));
    o.tables.push_back(std::move(t));
    o.plots.push_back(std::move(plot));
    return o;
}

// ---------------------------------------------------------------------------

inline Outcome run_parabola(Params& p) {
    const auto knots = p.numbers("knots", {0, 1, 2, 3, 4, 5, 6, 7, 8, 9}, -1e4, 1e4);
    const auto coeffs = p.choice("coefficients", "unit", {"unit", "random"});
    const double L = p.number("region_side", 3.0, 3.0, 64.0);
    const double step = p.number("step", 0.0, 0.0, 1.0);
    const auto route = p.choice("route", "analytic", {"auto", "summed-area", "analytic"});
    const bool refine = p.boolean("refine", true);
    const double tolerance = p.number("tolerance", 0.01, 0.0, 1.0);
    const std::uint64_t seed = coeffs == "random" ? p.seed() : 0;
    discrete::ParabolaConfiguration config{knots, {}};
    config.coefficients = coeffs == "random" ? discrete::random_coefficients(knots.size(), seed)
                                             : std::vector<discrete::complex>(knots.size(), 1.0);
    try {
        config.validate();
    } catch (const std::invalid_argument& e) {
        throw config_error(std::string("parabola: ") + e.what());
    }
    Outcome o;
    o.echo = p.finish();
    const double base = step > 0 ? step : discrete::default_step(config.frequencies());
    Table t{"parabola_ratio", {"scan_step", "ratio", "value", "center_x", "center_y", "relative_change"}, {}};
    const auto a = discrete::parabola_ratio(config, L, base, route_from(route));
    t.add(a.scan.step, a.ratio, a.scan.value, a.scan.center[0], a.scan.center[1], 0.0);
    if (!std::isfinite(a.ratio)) o.violations.push_back("non-finite parabola ratio");
    if (refine) {
        const auto b = discrete::parabola_ratio(config, L, base / 2, route_from(route));
        const double change = relative_gap(b.ratio, a.ratio);
        t.add(b.scan.step, b.ratio, b.scan.value, b.scan.center[0], b.scan.center[1], change);
        if (change > tolerance) o.violations.push_back("parabola ratio moved " + fmt(change) + " under step halving");
        o.notes.push_back("ratio " + fmt(a.ratio) + " -> " + fmt(b.ratio) + " under step halving");
    }
    o.tables.push_back(std::move(t));
    return o;
}

// ---------------------------------------------------------------------------

inline Outcome run_conjecture3d(Params& p) {
    const double R = p.number("R", 10.0, 1.0, 40.0);
    const auto caps = p.integers("cap_sizes", {1, 2, 4, 8, 12}, 1, 500);
    const double step = p.number("step", 0.0, 0.0, 1.0);
    Outcome o;
    o.echo = p.finish();
    const auto trend = discrete::conjecture_sweep(R, caps, step);
    Table t{"conjecture3d", {"family", "radius", "points", "M", "ratio", "ratio_times_sqrtM", "scan_step", "status"}, {}};
    PlotData plot{"conjecture3d_trend", {"sqrtM", "ratio"}, {}};
    for (const auto& r : trend.rows) {
        t.add(r.family, r.R, r.K, r.M, r.ratio, r.unnormalised, r.step, std::string(trend.label));
        if (r.family == "cap") plot.rows.push_back({std::sqrt(double(r.M)), r.ratio});
    }
    Table s{"conjecture3d_trend", {"fit", "value", "status"}, {}};
    s.add(std::string("dlog_ratio_dlog_M"), trend.slope_vs_log_M, std::string(trend.label));
    o.tables.push_back(std::move(t));
    o.tables.push_back(std::move(s));
    o.plots.push_back(std::move(plot));
    o.notes.push_back(std::string(trend.label) + ": cap-family slope d log ratio / d log M = " + fmt(trend.slope_vs_log_M));
    return o;
}

// ---------------------------------------------------------------------------

inline Outcome run_extension(Params& p) {
    const int n = static_cast<int>(p.integer("n", 2, 2, 3));
    const int k_max = static_cast<int>(p.integer("k_max", 3, 0, 64));
    const auto profile_name = p.choice("profile", "bump", profile_names);
    const int z_count = static_cast<int>(p.integer("z_count", 129, 5, 4097));
    const auto qs = p.numbers("q", {4.0, 5.0, 6.0}, 2.0 + 1e-12, 1e3);
    const double r_max = p.number("r_max", 256.0, 1.0, 65536.0);
    const int pairs = static_cast<int>(p.integer("duality_pairs", 0, 0, 1000));
    const double tol = p.number("duality_tolerance", 1e-6, 0.0, 1.0);
    const std::uint64_t seed = p.seed();
    if (pairs > 0 && n != 2) throw config_error("duality_pairs needs n = 2");
    if (!power_of_two(r_max)) throw config_error("r_max must be a power of two");
    Outcome o;
    o.echo = p.finish();
    const auto prof = profiles::by_name(profile_name, z_count);
    const auto surface = extension::surface_measure_factors(prof, n);
    const auto field = smooth_random_field(n, k_max, prof.z, seed);
    const auto grid = RadialGrid::dyadic(r_max, 16, 1.0);
    Table t{"extension_quotient", {"q", "numerator", "numerator_truncated", "denominator", "quotient", "raw_quotient"}, {}};
    for (double q : qs) {
        const auto r = extension::extension_quotient(field, surface, q, grid);
        t.add(q, r.numerator.corrected, r.numerator.value, r.denominator, r.quotient, r.raw_quotient);
    }
    o.tables.push_back(std::move(t));
    if (pairs > 0) {
        Table d{"extension_duality", {"pair", "probe_x", "probe_y", "probe_z", "sigma", "extension_side_re",
                                      "extension_side_im", "surface_side_re", "surface_side_im", "relative_error"}, {}};
        std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
        std::uniform_real_distribution<double> c(-0.5, 0.5), sg(0.9, 1.2);
        std::vector<double> zs(prof.z.count);
        for (int l = 0; l < prof.z.count; ++l) zs[l] = prof.z.at(l);
        for (int i = 0; i < pairs; ++i) {
            const auto f = smooth_random_field(2, k_max, prof.z, seed + 100 + i);
            const double cx = c(rng), cy = c(rng), cz = c(rng), sigma = sg(rng);
            const extension::GaussianProbe h{cx, cy, cz, sigma};
            const auto lhs = extension::pairing_extension_side(f, surface, h);
            const auto rhs = oracles::pairing_surface_side(
                [&](int l, double th) {
                    double v = 0.0;
                    for (int hh = 0; hh < f.harmonics(); ++hh) v += f.data()(hh, l) * spherical::harmonic(2, f.index(hh), {th});
                    return v;
                },
                zs, prof.g, surface.G1, quadrature::trapezoid_weights(prof.z), cx, cy, cz, sigma);
            const double err = std::abs(lhs - rhs) / std::abs(rhs);
            d.add(i, cx, cy, cz, sigma, lhs.real(), lhs.imag(), rhs.real(), rhs.imag(), err);
            if (!(err <= tol)) o.violations.push_back("duality pair " + fmt(i) + " relative error " + fmt(err));
        }
        o.tables.push_back(std::move(d));
    }
    return o;
}

// ---------------------------------------------------------------------------

inline Outcome run_lemma_r3(Params& p) {
    const int n = static_cast<int>(p.integer("n", 2, 2, 3));
    const double q = p.number("q", 5.0, 2.0 + 1e-12, 1e3);
    const auto profile_name = p.choice("profile", "cylinder", profile_names);
    const int z_count = static_cast<int>(p.integer("z_count", 65, 5, 4097));
    const double nu = p.number("nu", 3.0, 0.0, 1e3);
    const double r_max = p.number("r_max", 512.0, 16.0, 65536.0);
    const int fit_lo = static_cast<int>(p.integer("fit_lo", 3, 0, 30));
    const int fit_hi = static_cast<int>(p.integer("fit_hi", 8, 0, 30));
    const double exp_tol = p.number("exponent_tolerance", 0.3, 0.0, 10.0);
    const double ratio_tol = p.number("ratio_tolerance", 0.01, 0.0, 1.0);
    if (fit_hi < fit_lo) throw config_error("fit_hi must be >= fit_lo");
    if (!power_of_two(r_max)) throw config_error("r_max must be a power of two");
    if (nu < 0.5 * (n - 2)) throw config_error("nu must be >= (n-2)/2");
    Outcome o;
    o.echo = p.finish();
    const auto prof = profiles::by_name(profile_name, z_count);
    const auto fam = extension::BesselWeightedFamily::single(n, nu, prof.z, [](double) { return 1.0; });
    const auto a = extension::restriction_lemma_ratio(fam, prof, q, RadialGrid::dyadic(r_max, 16, 1.0), fit_lo, fit_hi);
    const auto b = extension::restriction_lemma_ratio(fam, prof, q, RadialGrid::dyadic(2 * r_max, 16, 1.0), fit_lo, fit_hi);
    Table blocks{"lemma_blocks", {"block_m", "block_power"}, {}};
    PlotData plot{"lemma_blocks", {"block_m", "log2_block_power"}, {}};
    for (std::size_t i = 0; i < a.block_m.size(); ++i) {
        blocks.add(a.block_m[i], a.block_powers[i]);
        if (a.block_powers[i] > 0) plot.rows.push_back({double(a.block_m[i]), std::log2(a.block_powers[i])});
    }
    const double change = relative_gap(b.ratio, a.ratio);
    Table s{"lemma_summary", {"lhs", "lhs_corrected", "rhs", "ratio", "ratio_at_double_rmax", "ratio_change",
                              "fitted_exponent", "expected_exponent", "divergent"}, {}};
    s.add(a.lhs, a.lhs_corrected, a.rhs, a.ratio, b.ratio, change, a.fitted_exponent, a.expected_exponent, a.divergent);
    if (!a.divergent) {
        if (std::abs(a.fitted_exponent - a.expected_exponent) > exp_tol)
            o.violations.push_back("fitted exponent " + fmt(a.fitted_exponent) + " vs " + fmt(a.expected_exponent));
        if (change > ratio_tol) o.violations.push_back("ratio moved " + fmt(change) + " under r_max doubling");
    }
    o.notes.push_back("fitted exponent " + fmt(a.fitted_exponent) + " (expected " + fmt(a.expected_exponent) + ")" +
                      (a.divergent ? ", flagged divergent" : ""));
    o.tables.push_back(std::move(blocks));
    o.tables.push_back(std::move(s));
    o.plots.push_back(std::move(plot));
    return o;
}

// ---------------------------------------------------------------------------

inline Outcome run_claim_dyadic(Params& p) {
    const int n = static_cast<int>(p.integer("n", 2, 2, 3));
    const auto qs = p.numbers("q", {4.5, 5.0, 6.0}, 4.0 + 1e-12, 1e3);
    const auto profile_name = p.choice("profile", "cylinder", profile_names);
    const int z_count = static_cast<int>(p.integer("z_count", 33, 5, 4097));
    const auto ms = p.integers("m", {3, 4, 5, 6, 7, 8}, 0, 14);
    const double lo = p.number("order_lo", 0.5, 0.0, 100.0);
    const double hi = p.number("order_hi", 4.0, 0.0, 100.0);
    if (!(hi > lo)) throw config_error("order_hi must exceed order_lo");
    Outcome o;
    o.echo = p.finish();
    const auto prof = profiles::by_name(profile_name, z_count);
    const auto sweeps = extension::dyadic_claim_sweep(
        [&](double M) { return extension::BesselWeightedFamily::spread(n, M, prof.z, lo, hi); }, prof, qs, ms);
    Table t{"claim_dyadic", {"q", "m", "M", "lhs", "rhs", "normalized", "C", "bound", "holds", "share_I0", "share_Ic",
                             "share_Iinf"}, {}};
    PlotData plot{"claim_dyadic", {"q", "M", "normalized"}, {}};
    for (const auto& sw : sweeps)
        for (const auto& r : sw.rows) {
            t.add(sw.q, r.m, r.M, r.lhs, r.rhs, r.normalized, sw.C, r.bound, r.holds, r.shares[0], r.shares[1], r.shares[2]);
            plot.rows.push_back({sw.q, r.M, r.normalized});
            if (!r.holds)
                o.violations.push_back("claim fails at q=" + fmt(sw.q) + " M=" + fmt(r.M) + " normalized " +
                                       fmt(r.normalized) + " > C=" + fmt(sw.C));
        }
    o.tables.push_back(std::move(t));
    o.plots.push_back(std::move(plot));
    return o;
}

// ---------------------------------------------------------------------------

struct MultiplierParams {
    multiplier::MultiplierSpec spec;
    int n = 2;
    int k_max = 2;
    double r_max = 64;
};

inline MultiplierParams multiplier_params(Params& p, const std::string& default_name) {
    MultiplierParams m;
    const auto name = p.choice("multiplier", default_name, multiplier_names);
    const double a = p.number("a", 1.0, 1e-6, 1e3);
    const double b = p.number("b", 2.0, 1e-6, 1e3);
    if (!(b > a)) throw config_error("multiplier support needs b > a");
    m.spec = multiplier::multipliers::by_name(name, a, b);
    m.n = static_cast<int>(p.integer("n", 2, 2, 8));
    m.k_max = static_cast<int>(p.integer("k_max", 2, 0, 32));
    m.r_max = p.number("r_max", 64.0, 1.0, 4096.0);
    if (!power_of_two(m.r_max)) throw config_error("r_max must be a power of two");
    return m;
}

inline Outcome run_multiplier(Params& p) {
    const auto mp = multiplier_params(p, "smooth_bump");
    const auto ps = p.numbers("p", {1.5, 2.0, 3.0}, 1.0, 100.0);
    const int fields = static_cast<int>(p.integer("fields", 3, 1, 1000));
    const double tol = p.number("tolerance", 1e-6, 0.0, 1.0);
    const bool planar = p.boolean("planar_oracle", false);
    int grid_n = 0;
    double box = 0.0, oracle_tol = 0.0;
    if (planar) {
        grid_n = static_cast<int>(p.integer("planar_grid", 1024, 64, 4096));
        box = p.number("planar_box", 256.0, 8.0, 4096.0);
        oracle_tol = p.number("oracle_tolerance", 1e-3, 0.0, 1.0);
        if (mp.n != 2) throw config_error("planar_oracle needs n = 2");
    }
    const std::uint64_t seed = p.seed();
    Outcome o;
    o.echo = p.finish();
    const auto grid = multiplier::output_grid(mp.r_max, mp.spec.b);
    const auto trials = multiplier::random_trial_fields(mp.n, mp.k_max, fields, seed);
    const multiplier::MultiplierPlan plan(mp.spec, mp.n, mp.k_max, trials.front().support, grid.nodes());
    Table t{"multiplier_routes", {"field", "p", "norm_f", "norm_decomposition", "norm_direct_kernel", "relative_gap",
                                  "quotient"}, {}};
    double worst = 0.0;
    for (int i = 0; i < fields; ++i) {
        const auto dec = plan.apply(trials[i], multiplier::TmRoute::Decomposition);
        const auto dir = plan.apply(trials[i], multiplier::TmRoute::DirectKernel);
        const auto in = trials[i].sample(grid.nodes());
        for (double pp : ps) {
            const double nf = mixed_norm_p2(in, grid, pp), a = mixed_norm_p2(dec, grid, pp), b = mixed_norm_p2(dir, grid, pp);
            const double gap = relative_gap(a, b);
            worst = std::max(worst, gap);
            t.add(i, pp, nf, a, b, gap, nf > 0 ? a / nf : 0.0);
            if (gap > tol) o.violations.push_back("routes differ by " + fmt(gap) + " (field " + fmt(i) + ", p=" + fmt(pp) + ")");
        }
    }
    o.tables.push_back(std::move(t));
    o.notes.push_back("decomposition vs direct-kernel worst relative gap " + fmt(worst));
    if (planar) {
        auto gauss = [](double r) { return std::exp(-0.5 * r * r); };
        multiplier::RadialField f{2, 0, 10.0, [&](int, double r) { return std::sqrt(2 * std::numbers::pi) * gauss(r); }};
        const auto ograd = multiplier::output_grid(std::min(mp.r_max, box / 2), mp.spec.b);
        const auto radial = multiplier::apply_Tm(f, mp.spec, ograd);
        const auto spec = mp.spec;
        const auto dense = oracles::planar_radial_multiplier(gauss, [&](double s) { return spec(s); }, grid_n, box);
        Table d{"multiplier_planar_oracle", {"p", "radial_norm", "planar_norm", "relative_gap"}, {}};
        for (double pp : ps) {
            const double a = mixed_norm_p2(radial, ograd, pp), b = dense.mixed_norm(pp);
            d.add(pp, a, b, relative_gap(a, b));
            if (relative_gap(a, b) > oracle_tol)
                o.violations.push_back("planar oracle gap " + fmt(relative_gap(a, b)) + " at p=" + fmt(pp));
        }
        o.tables.push_back(std::move(d));
    }
    return o;
}

// ---------------------------------------------------------------------------

inline Outcome run_ts_sweep(Params& p) {
    const int n = static_cast<int>(p.integer("n", 2, 2, 8));
    const int k_max = static_cast<int>(p.integer("k_max", 2, 0, 32));
    const auto ss = p.numbers("s", {0.5, 1.0, 2.0, 4.0}, 1e-3, 64.0);
    const auto ps = p.numbers("p", {2.0, 3.0}, 1.0, 100.0);
    const double r_max = p.number("r_max", 64.0, 1.0, 4096.0);
    const int fields = static_cast<int>(p.integer("fields", 2, 1, 1000));
    const double cov_tol = p.number("covariance_tolerance", 1e-6, 0.0, 1.0);
    const double norm_tol = p.number("norm_tolerance", 0.01, 0.0, 1.0);
    const std::uint64_t seed = p.seed();
    if (!power_of_two(r_max)) throw config_error("r_max must be a power of two");
    // ||T^s f|| on [0, r_max] is compared with s^{-n/p} ||T^1 f(./s)|| on
    // [0, s r_max]; both truncations are dyadic only for dyadic s.
    for (double s : ss)
        if (!power_of_two(s) || !(s * r_max >= 1.0)) throw config_error("s must be a power of two with s * r_max >= 1");
    Outcome o;
    o.echo = p.finish();
    const auto trials = multiplier::random_trial_fields(n, k_max, fields, seed);
    const std::vector<double> radii{0.05, 0.7, 1.9, 3.3, 8.0, 17.5, 40.0};
    Table t{"ts_sweep", {"field", "s", "p", "covariance_error", "norm_Ts", "norm_rescaled", "norm_gap", "norm_f",
                         "quotient"}, {}};
    for (int i = 0; i < fields; ++i) {
        const auto& f = trials[i];
        for (double s : ss) {
            const auto lhs = multiplier::apply_Ts(f, s, radii);
            std::vector<double> scaled;
            for (double r : radii) scaled.push_back(s * r);
            const auto rhs = multiplier::apply_Ts(f.dilated(s), 1.0, scaled);
            double cov = 0.0;
            for (std::size_t q = 0; q < lhs.values.size(); ++q)
                cov = std::max(cov, std::abs(lhs.values.data()[q] - rhs.values.data()[q]));
            if (cov > cov_tol) o.violations.push_back("dilation covariance error " + fmt(cov) + " at s=" + fmt(s));
            const auto grid_s = multiplier::output_grid(r_max, s);
            const auto grid_1 = multiplier::output_grid(s * r_max, 1.0);
            const auto ts = multiplier::apply_Ts(f, s, grid_s);
            const auto t1 = multiplier::apply_Ts(f.dilated(s), 1.0, grid_1);
            for (double pp : ps) {
                const double a = mixed_norm_p2(ts, grid_s, pp);
                const double b = std::pow(s, -double(n) / pp) * mixed_norm_p2(t1, grid_1, pp);
                const double nf = mixed_norm_p2(f.sample(grid_s.nodes()), grid_s, pp);
                t.add(i, s, pp, cov, a, b, relative_gap(a, b), nf, nf > 0 ? a / nf : 0.0);
                if (relative_gap(a, b) > norm_tol)
                    o.violations.push_back("rescaled norms differ by " + fmt(relative_gap(a, b)) + " at s=" + fmt(s) +
                                           " p=" + fmt(pp));
            }
        }
    }
    o.tables.push_back(std::move(t));
    return o;
}

// ---------------------------------------------------------------------------

inline Outcome run_subordination(Params& p) {
    const auto mp = multiplier_params(p, "sin4_bump");
    const auto ps = p.numbers("p", {1.5, 2.0, 3.0}, 1.0, 100.0);
    const int fields = static_cast<int>(p.integer("fields", 2, 1, 1000));
    const std::uint64_t seed = p.seed();
    Outcome o;
    o.echo = p.finish();
    const auto grid = multiplier::output_grid(mp.r_max, mp.spec.b);
    const auto trials = multiplier::random_trial_fields(mp.n, mp.k_max, fields, seed);
    const multiplier::MultiplierPlan plan(mp.spec, mp.n, mp.k_max, trials.front().support, grid.nodes());
    Table t{"subordination", {"field", "p", "lhs", "budget", "norm_f", "rhs", "c_grid", "constant", "holds"}, {}};
    Table b{"subordination_budget", {"field", "p", "s", "m", "abs_dm", "weight", "norm_Ts", "contribution"}, {}};
    for (int i = 0; i < fields; ++i)
        for (double pp : ps) {
            const auto rep = multiplier::subordination_check(trials[i], plan, grid, pp);
            t.add(i, pp, rep.lhs, rep.budget, rep.norm_f, rep.rhs, rep.c_grid, rep.constant, rep.holds());
            for (const auto& term : rep.terms)
                b.add(i, pp, term.s, term.m, term.abs_dm, term.weight, term.norm_Ts, term.contribution);
            if (!rep.holds())
                o.violations.push_back("subordination budget fails (field " + fmt(i) + ", p=" + fmt(pp) + ")");
        }
    o.tables.push_back(std::move(t));
    o.tables.push_back(std::move(b));
    return o;
}

// ---------------------------------------------------------------------------

using Runner = std::function<Outcome(Params&)>;

inline const std::map<std::string, Runner>& experiments() {
    static const std::map<std::string, Runner> table{
        {"bessel-check", run_bessel_check}, {"discrete", run_discrete},         {"parabola", run_parabola},
        {"conjecture3d", run_conjecture3d}, {"extension", run_extension},       {"lemma-r3", run_lemma_r3},
        {"claim-dyadic", run_claim_dyadic}, {"multiplier", run_multiplier},     {"ts-sweep", run_ts_sweep},
        {"subordination", run_subordination},
    };
    return table;
}

/// Parses and runs one config; throws config_error / resolution_error.
inline Outcome run_experiment(const ExperimentConfig& config) {
    const auto it = experiments().find(config.experiment);
    if (it == experiments().end()) throw config_error("unknown experiment '" + config.experiment + "'");
    Params params(config);
    return it->second(params);
}

}  // namespace restriction_lab::driver
