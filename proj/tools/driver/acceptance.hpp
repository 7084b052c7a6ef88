#pragma once

// `restriction-lab verify`: thirteen acceptance checks. Most run a stock
// experiment config through the same path as `run`; a few need bespoke
// tables. The whole suite runs twice and the CSV bodies are compared.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "driver/experiments.hpp"
#include "restriction_lab/oracles/bessel_series.hpp"

namespace restriction_lab::driver {

struct CheckResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
    std::vector<Artifact> artifacts;
};

namespace acceptance {

inline constexpr std::uint64_t seed = 20240611;

class Stopwatch {
public:
    [[nodiscard]] double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct Run {
    Outcome outcome;
    std::vector<Artifact> artifacts;
};

inline Run run_json(const json& j) {
    const auto config = parse_config_text(j.dump());
    Run r;
    r.outcome = run_experiment(config);
    r.artifacts = render(r.outcome, {config.experiment, config.hash});
    return r;
}

inline std::size_t column(const Table& t, const std::string& name) {
    const auto it = std::find(t.columns.begin(), t.columns.end(), name);
    if (it == t.columns.end()) throw std::logic_error("no column " + name + " in " + t.name);
    return static_cast<std::size_t>(it - t.columns.begin());
}

inline std::string join(const std::vector<std::string>& v, std::size_t limit = 3) {
    std::string out;
    for (std::size_t i = 0; i < std::min(limit, v.size()); ++i) out += (i ? "; " : "") + v[i];
    if (v.size() > limit) out += "; +" + fmt(v.size() - limit) + " more";
    return out;
}

inline void prefix(std::vector<Artifact>& artifacts, const std::string& dir) {
    for (auto& a : artifacts) a.filename = dir + "/" + a.filename;
}

// 1 -------------------------------------------------------------------------
inline CheckResult envelope() {
    Stopwatch w;
    auto r = run_json({{"experiment", "bessel-check"}, {"parameters", {{"density", 256}}}});
    CheckResult c{1, "bessel envelope", false, "", w.seconds(), std::move(r.artifacts)};
    c.pass = r.outcome.violations.empty() && c.seconds < 10.0;
    c.detail = r.outcome.violations.empty() ? r.outcome.notes.front() : join(r.outcome.violations);
    return c;
}

// 2 -------------------------------------------------------------------------
inline CheckResult bessel_accuracy() {
    Stopwatch w;
    Table t{"bessel_accuracy", {"check", "nu", "x", "value", "reference", "error", "tolerance", "holds"}, {}};
    int failures = 0;
    double worst_series = 0.0, worst_recurrence = 0.0;
    for (double nu : {0.0, 0.5, 1.0, 1.5, 2.0, 3.7, 5.0, 10.0, 20.0, 33.3, 50.0, 100.0, 150.5, 200.0})
        for (int i = 1; i <= 60; ++i) {
            const double x = 0.5 * i;
            const double ref = oracles::bessel_j_series(nu, x);
            if (std::abs(ref) < 1e-280) continue;  // underflowed reference
            const double v = bessel::j(bessel::Order(nu), x);
            const double rel = std::abs(v - ref) / std::abs(ref);
            worst_series = std::max(worst_series, rel);
            failures += rel > 1e-10;
            t.add(std::string("series"), nu, x, v, ref, rel, 1e-10, rel <= 1e-10);
        }
    for (double nu : {1.0, 1.5, 2.0, 7.25, 30.0, 120.0, 199.0})
        for (double x : {31.0, 45.5, 77.7, 150.0, 199.0, 210.0, 500.0, 1000.0, 1999.0}) {
            const double jm = bessel::j(bessel::Order(nu - 1), x);
            const double jp = bessel::j(bessel::Order(nu + 1), x);
            const double j0 = bessel::j(bessel::Order(nu), x);
            const double res = std::abs(jm + jp - (2 * nu / x) * j0);
            const double tol = 1e-9 * std::max(1.0, std::abs(j0));
            worst_recurrence = std::max(worst_recurrence, res);
            failures += res > tol;
            t.add(std::string("recurrence"), nu, x, j0, jm + jp, res, tol, res <= tol);
        }
    CheckResult c{2, "bessel accuracy", failures == 0, "", w.seconds(), {}};
    c.detail = "worst series rel " + fmt(worst_series) + ", worst recurrence residual " + fmt(worst_recurrence) +
               ", failures " + fmt(failures);
    c.artifacts.push_back(render_csv(t, {"verify", "builtin"}, {{"check", "bessel-accuracy"}}));
    return c;
}

// 3 -------------------------------------------------------------------------
inline CheckResult kernel_identity() {
    Stopwatch w;
    const auto one = multiplier::multipliers::constant(1.0, 1.0, 2.0);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> alpha(0.0, 20.0), arg(0.1, 50.0);
    Table t{"kernel_identity", {"alpha", "t", "r", "kernel_K", "boundary_terms", "abs_error"}, {}};
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double a = alpha(rng), tt = arg(rng), r = arg(rng);
        const double K = multiplier::kernel_K(a, tt, r, one);
        const double B = multiplier::kernel_k_core(a, tt, r, 1.0) - multiplier::kernel_k_core(a, tt, r, 2.0);
        worst = std::max(worst, std::abs(K - B));
        t.add(a, tt, r, K, B, std::abs(K - B));
    }
    CheckResult c{3, "kernel identity", false, "", w.seconds(), {}};
    c.pass = worst <= 1e-8 && c.seconds < 30.0;
    c.detail = "worst |K - boundary| " + fmt(worst) + " over 100 triples";
    c.artifacts.push_back(render_csv(t, {"verify", "builtin"}, {{"check", "kernel-identity"}, {"seed", fmt(static_cast<long long>(seed))}}));
    return c;
}

// 4 -------------------------------------------------------------------------
inline CheckResult multiplier_oracles() {
    Stopwatch w;
    auto r = run_json({{"experiment", "multiplier"},
                       {"seed", seed},
                       {"parameters",
                        {{"multiplier", "smooth_bump"},
                         {"k_max", 2},
                         {"r_max", 128},
                         {"p", {1.5, 2.0, 3.0}},
                         {"fields", 2},
                         {"planar_oracle", true},
                         {"planar_grid", 1024},
                         {"planar_box", 256}}}});
    // Spot check of the direct route against an explicit kernel_K quadrature.
    const auto spec = multiplier::multipliers::smooth_bump(1.0, 2.0);
    const auto f = multiplier::random_trial_fields(2, 0, 1, seed).front();
    const std::vector<double> radii{0.5, 2.5, 6.0, 11.0};
    const auto out = multiplier::MultiplierPlan(spec, 2, 0, f.support, radii).apply(f, multiplier::TmRoute::DirectKernel);
    const auto rule = multiplier::input_rule(f.support, spec.b, 16);
    Table t{"multiplier_kernel_spot", {"r", "direct_route", "kernel_K_quadrature", "abs_error"}, {}};
    double worst = 0.0, scale = 0.0;
    for (std::size_t j = 0; j < radii.size(); ++j) {
        double ref = 0.0;
        for (std::size_t l = 0; l < rule.size(); ++l) {
            const double tt = rule.nodes[l];
            ref += rule.weights[l] * f.value(0, tt) * std::sqrt(tt / radii[j]) * multiplier::kernel_K(0.0, tt, radii[j], spec);
        }
        worst = std::max(worst, std::abs(out.values(0, j) - ref));
        scale = std::max(scale, std::abs(ref));
        t.add(radii[j], out.values(0, j), ref, std::abs(out.values(0, j) - ref));
    }
    r.artifacts.push_back(render_csv(t, {"verify", "builtin"}, {{"check", "kernel-spot"}, {"seed", fmt(static_cast<long long>(seed))}}));
    CheckResult c{4, "multiplier oracles", false, "", w.seconds(), std::move(r.artifacts)};
    const bool spot = worst <= 1e-6 * scale;
    c.pass = r.outcome.violations.empty() && spot && c.seconds < 120.0;
    const auto& planar = r.outcome.tables.back();
    double planar_gap = 0.0;
    for (const auto& row : planar.rows) planar_gap = std::max(planar_gap, std::stod(row[column(planar, "relative_gap")]));
    c.detail = r.outcome.notes.front() + "; planar oracle worst gap " + fmt(planar_gap) + "; kernel_K spot error " +
               fmt(worst) + (r.outcome.violations.empty() ? "" : "; " + join(r.outcome.violations));
    return c;
}

// 5 -------------------------------------------------------------------------
inline CheckResult dilation() {
    Stopwatch w;
    auto r = run_json({{"experiment", "ts-sweep"}, {"seed", seed}, {"parameters", {{"s", {0.5, 1.0, 2.0, 4.0}}}}});
    const auto& t = r.outcome.tables.front();
    double cov = 0.0, gap = 0.0;
    for (const auto& row : t.rows) {
        cov = std::max(cov, std::stod(row[column(t, "covariance_error")]));
        gap = std::max(gap, std::stod(row[column(t, "norm_gap")]));
    }
    CheckResult c{5, "dilation identity", r.outcome.violations.empty(), "", w.seconds(), std::move(r.artifacts)};
    c.detail = "worst covariance error " + fmt(cov) + ", worst rescaled-norm gap " + fmt(gap);
    return c;
}

// 6 -------------------------------------------------------------------------
inline CheckResult parseval() {
    Stopwatch w;
    const auto grid = multiplier::output_grid(64, 2.0);
    const auto trials = multiplier::random_trial_fields(2, 2, 20, seed);
    Table t{"parseval_bound", {"multiplier", "field", "quotient", "sup_abs_m", "holds"}, {}};
    bool pass = true;
    double margin = -1e300;
    for (const auto& name : {"smooth_bump", "sin4_bump", "linear"}) {
        const auto spec = multiplier::multipliers::by_name(name, 1.0, 2.0);
        const multiplier::MultiplierPlan plan(spec, 2, 2, trials.front().support, grid.nodes());
        const auto est = multiplier::operator_norm_estimate([&](const multiplier::RadialField& f) { return plan.apply(f); },
                                                            trials, grid, 2.0);
        for (std::size_t i = 0; i < est.quotients.size(); ++i) {
            const bool ok = est.quotients[i] <= spec.sup_abs + 1e-6;
            pass = pass && ok;
            margin = std::max(margin, est.quotients[i] - spec.sup_abs);
            t.add(std::string(name), i, est.quotients[i], spec.sup_abs, ok);
        }
    }
    CheckResult c{6, "p=2 Parseval bound", pass, "max(quotient - sup|m|) = " + fmt(margin) + " over 20 fields x 3 multipliers",
                  w.seconds(), {}};
    c.artifacts.push_back(render_csv(t, {"verify", "builtin"}, {{"check", "parseval"}, {"seed", fmt(static_cast<long long>(seed))}}));
    return c;
}

// 7 -------------------------------------------------------------------------
inline CheckResult duality() {
    Stopwatch w;
    CheckResult c{7, "extension duality", true, "", 0.0, {}};
    for (const auto* profile : {"cylinder", "bump"}) {
        auto r = run_json({{"experiment", "extension"},
                           {"seed", seed},
                           {"parameters", {{"profile", profile}, {"q", {6.0}}, {"duality_pairs", 10}}}});
        const auto& t = r.outcome.tables.back();
        double worst = 0.0;
        for (const auto& row : t.rows) worst = std::max(worst, std::stod(row[column(t, "relative_error")]));
        c.pass = c.pass && r.outcome.violations.empty() && t.rows.size() == 10;
        c.detail += std::string(c.detail.empty() ? "" : "; ") + profile + " worst relative error " + fmt(worst);
        prefix(r.artifacts, profile);
        c.artifacts.insert(c.artifacts.end(), r.artifacts.begin(), r.artifacts.end());
    }
    c.seconds = w.seconds();
    return c;
}

// 8 -------------------------------------------------------------------------
inline CheckResult block_decay() {
    Stopwatch w;
    auto r = run_json({{"experiment", "lemma-r3"},
                       {"parameters", {{"n", 2}, {"q", 5.0}, {"profile", "cylinder"}, {"fit_lo", 3}, {"fit_hi", 8}}}});
    const auto& s = r.outcome.tables.back();
    const auto& row = s.rows.front();
    const double fitted = std::stod(row[column(s, "fitted_exponent")]);
    const double expected = std::stod(row[column(s, "expected_exponent")]);
    const double change = std::stod(row[column(s, "ratio_change")]);
    CheckResult c{8, "block decay", false, "", w.seconds(), std::move(r.artifacts)};
    c.pass = row[column(s, "divergent")] == "false" && std::abs(fitted - expected) <= 0.3 && change <= 0.01 &&
             c.seconds < 60.0;
    c.detail = "fitted " + fmt(fitted) + " vs expected " + fmt(expected) + ", ratio change under r_max doubling " + fmt(change);
    return c;
}

// 9 -------------------------------------------------------------------------
inline CheckResult dyadic_claim() {
    Stopwatch w;
    auto r = run_json({{"experiment", "claim-dyadic"},
                       {"parameters", {{"q", {4.5, 5.0, 6.0}}, {"m", {3, 4, 5, 6, 7, 8}}, {"profile", "cylinder"}}}});
    const auto& t = r.outcome.tables.front();
    double worst = 0.0;
    for (const auto& row : t.rows)
        worst = std::max(worst, std::stod(row[column(t, "normalized")]) / std::stod(row[column(t, "C")]));
    CheckResult c{9, "dyadic claim uniformity", r.outcome.violations.empty(), "", w.seconds(), std::move(r.artifacts)};
    c.detail = "max normalized / C over M=16..256 = " + fmt(worst) +
               (r.outcome.violations.empty() ? "" : "; " + join(r.outcome.violations));
    return c;
}

// 10 ------------------------------------------------------------------------
inline CheckResult discrete_boundedness() {
    Stopwatch w;
    CheckResult c{10, "discrete boundedness", true, "", 0.0, {}};
    std::vector<double> ratios;
    std::string per_R;
    for (double R : {100.0, 1000.0, 10000.0}) {
        auto r = run_json({{"experiment", "discrete"},
                           {"seed", seed},
                           {"parameters",
                            {{"source", "random-separated"},
                             {"R", R},
                             {"K", 12},
                             {"coefficients", "random"},
                             {"draws", 50},
                             {"ascent_iterations", 40},
                             {"route", "analytic"}}}});
        const auto& t = r.outcome.tables.front();
        double best = 0.0;
        for (const auto& row : t.rows) {
            c.pass = c.pass && row[column(t, "M")] == "1";
            const double v = std::stod(row[column(t, "ratio")]);
            ratios.push_back(v);
            best = std::max(best, v);
        }
        c.pass = c.pass && r.outcome.violations.empty();
        per_R += (per_R.empty() ? "" : ", ") + std::string("R=") + fmt(R) + " max " + fmt(best);
        prefix(r.artifacts, "R" + fmt(static_cast<long long>(R)));
        c.artifacts.insert(c.artifacts.end(), r.artifacts.begin(), r.artifacts.end());
    }
    auto sorted = ratios;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted.size() % 2 ? sorted[sorted.size() / 2]
                                            : 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);
    const double max = sorted.back();
    c.pass = c.pass && max <= 2.0 * median;

    auto single = run_json({{"experiment", "discrete"},
                            {"parameters", {{"source", "cap-cluster"}, {"R", 100.0}, {"K", 1}, {"coefficients", "unit"}}}});
    const auto& st = single.outcome.tables.front();
    const double one = std::stod(st.rows.front()[column(st, "ratio")]);
    c.pass = c.pass && std::abs(one - 1.0) <= 1e-6;
    prefix(single.artifacts, "single");
    c.artifacts.insert(c.artifacts.end(), single.artifacts.begin(), single.artifacts.end());

    auto lattice = run_json({{"experiment", "discrete"}, {"parameters", {{"source", "lattice"}, {"N", 25}}}});
    const auto& lt = lattice.outcome.tables.front();
    const std::string points = lt.rows.front()[column(lt, "points")];
    c.pass = c.pass && points == "12";
    prefix(lattice.artifacts, "lattice");
    c.artifacts.insert(c.artifacts.end(), lattice.artifacts.begin(), lattice.artifacts.end());

    c.seconds = w.seconds();
    c.pass = c.pass && c.seconds < 300.0;
    c.detail = per_R + "; median " + fmt(median) + ", max/median " + fmt(max / median) + "; single point " + fmt(one) +
               "; N=25 gives " + points + " points";
    return c;
}

// 11 ------------------------------------------------------------------------
inline CheckResult parabola() {
    Stopwatch w;
    auto r = run_json({{"experiment", "parabola"},
                       {"parameters", {{"knots", {0, 1, 2, 3, 4, 5, 6, 7, 8, 9}}, {"route", "analytic"}, {"refine", true}}}});
    CheckResult c{11, "parabola stability", r.outcome.violations.empty(), "", w.seconds(), std::move(r.artifacts)};
    c.detail = r.outcome.violations.empty() ? r.outcome.notes.front() : join(r.outcome.violations);
    return c;
}

// 12 ------------------------------------------------------------------------
inline CheckResult conjecture() {
    Stopwatch w;
    auto r = run_json({{"experiment", "conjecture3d"}, {"parameters", {{"R", 10.0}}}});
    const auto& t = r.outcome.tables.front();
    bool axis = false, cap = false, labelled = true;
    for (const auto& row : t.rows) {
        axis = axis || (row[column(t, "family")] == "axis" && row[column(t, "points")] == "6");
        cap = cap || row[column(t, "family")] == "cap";
        labelled = labelled && row[column(t, "status")] == discrete::conjecture_label;
    }
    const bool dat = std::any_of(r.artifacts.begin(), r.artifacts.end(),
                                 [](const Artifact& a) { return a.filename.ends_with(".dat"); });
    CheckResult c{12, "conjecture explorer", axis && cap && labelled && dat, "", w.seconds(), std::move(r.artifacts)};
    c.detail = r.outcome.notes.front();
    return c;
}

inline std::vector<CheckResult> run_checks() {
    return {envelope(), bessel_accuracy(), kernel_identity(), multiplier_oracles(), dilation(), parseval(),
            duality(),  block_decay(),     dyadic_claim(),    discrete_boundedness(),   parabola(), conjecture()};
}

}  // namespace acceptance

inline std::string check_dir(const CheckResult& c) {
    std::string slug;
    for (char ch : c.name) slug += std::isalnum(static_cast<unsigned char>(ch)) ? ch : '-';
    char id[8];
    std::snprintf(id, sizeof id, "%02d-", c.id);
    return id + slug;
}

/// Runs the suite twice (criterion 13 compares the two passes) and prints
/// one line per criterion. Artifacts of the first pass go under `out` when
/// it is non-empty. Returns true when every criterion passes.
inline bool run_verify(const std::string& out, std::FILE* log = stdout) {
    auto print = [&](int id, const std::string& name, bool pass, double seconds, const std::string& detail) {
        std::fprintf(log, "[%s] %2d %-26s %7.1fs  %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), seconds, detail.c_str());
        std::fflush(log);
    };
    acceptance::Stopwatch total;
    auto first = acceptance::run_checks();
    bool all = true;
    for (const auto& c : first) {
        print(c.id, c.name, c.pass, c.seconds, c.detail);
        all = all && c.pass;
    }
    if (!out.empty())
        for (const auto& c : first) write_all(std::filesystem::path(out) / check_dir(c), c.artifacts);

    acceptance::Stopwatch again;
    const auto second = acceptance::run_checks();
    std::size_t files = 0, differing = 0;
    for (std::size_t i = 0; i < first.size(); ++i) {
        const auto& a = first[i].artifacts;
        const auto& b = second[i].artifacts;
        if (a.size() != b.size()) {
            ++differing;
            continue;
        }
        for (std::size_t k = 0; k < a.size(); ++k) {
            ++files;
            if (a[k].filename != b[k].filename || body_of(a[k].content) != body_of(b[k].content)) ++differing;
        }
    }
    const bool same = differing == 0 && files > 0;
    print(13, "determinism", same, again.seconds(), fmt(files) + " CSV/plot bodies compared, " + fmt(differing) + " differ");
    all = all && same;
    std::fprintf(log, "%s in %.1fs\n", all ? "all acceptance criteria pass" : "acceptance FAILED", total.seconds());
    return all;
}

}  // namespace restriction_lab::driver
