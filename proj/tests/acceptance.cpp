// Acceptance gate: ten end-to-end checks of the library against
// independently derivable targets, one PASS/FAIL line each. Tolerances are
// pinned here, not configurable.
//
// Check 4 carries a built-in expected failure: its second half asks a
// height-20 relation search over the first four eigenvalues of the rectangle
// mu = (1, 2^{-1/4}) to report independence, but that spectrum satisfies
// lambda_1 - lambda_2 - lambda_3 + lambda_4 = 0 exactly (the integer parts
// and the sqrt(2) parts cancel separately), so every height >= 1 finds a
// relation. The honest outcome is a FAIL line naming the relation; the
// process exit code reports whether each check matched its expected outcome,
// so a suite run stays green exactly as long as the search keeps finding
// that relation and everything else passes.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include "speclab/damping.hpp"
#include "speclab/eigensolver.hpp"
#include "speclab/errors.hpp"
#include "speclab/geometry.hpp"
#include "speclab/perturbation.hpp"
#include "speclab/schrodinger.hpp"
#include "speclab/spectral_props.hpp"

namespace {

constexpr double kPi = 3.14159265358979323846;

using speclab::Error;
namespace geom = speclab::geom;
namespace spectral = speclab::spectral;

geom::Orthotope exact_rectangle() {
    return geom::make_orthotope_exact({1.0, std::pow(2.0, -0.25)}, 2, {{1, 0}, {0, 1}});
}

geom::Orthotope exact_square() {
    return geom::make_orthotope_exact({1.0, 1.0}, 0, {{1, 0}, {1, 0}});
}

geom::DomainSpec rectangle_spec() {
    geom::DomainSpec spec;
    spec.kind = geom::DomainSpec::Kind::orthotope;
    spec.ortho = exact_rectangle();
    return spec;
}

std::string fmt(const char* pattern, ...) {
    char buf[512];
    va_list args;
    va_start(args, pattern);
    std::vsnprintf(buf, sizeof buf, pattern, args);
    va_end(args);
    return buf;
}

struct Stopwatch {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

struct Outcome {
    std::string label;
    bool pass = false;
    bool expect_pass = true;
    std::string detail;
};

std::vector<Outcome> results;

void record(std::string label, bool pass, std::string detail, bool expect_pass = true) {
    results.push_back({std::move(label), pass, expect_pass, std::move(detail)});
}

// 1. FEM agreement with the closed form on mu = (1, 2^{-1/4}): first six
//    eigenvalues at h = 0.02 within 0.3% relative error, convergence order
//    at least 1.8 for every mode, all inside a 60 s budget.
void check_fem_oracle() {
    Stopwatch timer;
    const auto spec = rectangle_spec();
    const auto dom = geom::mesh_domain(spec, 0.02);
    const auto fem = spectral::fem_spectrum(dom, 6);
    const auto exact = spectral::orthotope_spectrum(spec.ortho, 6);
    double max_rel = 0.0;
    for (int k = 0; k < 6; ++k)
        max_rel = std::max(max_rel,
                           std::abs(fem.lambdas[k] - exact.lambdas[k]) / exact.lambdas[k]);

    const auto table = spectral::convergence_study(spec, {0.2, 0.14, 0.1, 0.07, 0.05}, 6);
    double min_order = table.lambda_order[0];
    for (double p : table.lambda_order) min_order = std::min(min_order, p);

    const double elapsed = timer.seconds();
    const bool pass = max_rel <= 3.0e-3 && min_order >= 1.8 && elapsed <= 60.0;
    record("fem oracle agreement", pass,
           fmt("h=0.02 max rel err %.2e (tol 3.0e-3), min order %.2f (>= 1.8), %.1fs (<= 60s)",
               max_rel, min_order, elapsed));
}

// 2. Degeneracy reproduction: the square fails simplicity at the exact
//    lambda_2 = lambda_3 = 5 pair; the rectangle holds for n = 8, both
//    verdicts on the exact arithmetic path.
void check_degeneracy() {
    const auto square = spectral::orthotope_spectrum(exact_square(), 4);
    const auto sq = spectral::check_simplicity(square);
    const bool square_ok = sq.verdict == spectral::Verdict::fails && sq.exact &&
                           sq.gap_index == 2 && square.lambdas[1] == 5.0 &&
                           square.lambdas[2] == 5.0;

    const auto rect = spectral::orthotope_spectrum(exact_rectangle(), 8);
    const auto rc = spectral::check_simplicity(rect);
    const bool rect_ok = rc.verdict == spectral::Verdict::holds && rc.exact;

    record("degeneracy reproduction", square_ok && rect_ok,
           fmt("square: %s at pair index %d (lambda=%g), exact=%d; rectangle n=8: %s, exact=%d",
               spectral::verdict_name(sq.verdict).c_str(), sq.gap_index, square.lambdas[1],
               int(sq.exact), spectral::verdict_name(rc.verdict).c_str(), int(rc.exact)));
}

// 3. Squared independence at desk scale: the 1D Gram of squared modes has
//    minimum eigenvalue 1/(2 pi) for n = 2..12; the rectangle Gram at n = 6
//    clears its quadrature tolerance with a 10x margin; the point-tuple
//    search produces a determinant witness within 200 trials.
void check_squared_independence() {
    const double target = 1.0 / (2.0 * kPi);
    double max_dev = 0.0;
    for (int n = 2; n <= 12; ++n) {
        const auto sys = spectral::orthotope_spectrum(geom::make_orthotope({1.0}), n);
        const auto gram = spectral::squared_gram(sys);
        max_dev = std::max(max_dev, std::abs(gram.min_eigenvalue - target));
    }

    const auto rect = spectral::orthotope_spectrum(exact_rectangle(), 6);
    const auto gram2 = spectral::squared_gram(rect);
    const bool margin_ok = gram2.min_eigenvalue > 10.0 * gram2.tolerance;

    const auto search = spectral::squared_independence_search(rect, 200, 12345u);
    const bool search_ok = search.verdict == spectral::Verdict::holds &&
                           std::abs(search.best_det) > search.det_tol;

    const bool pass = max_dev <= 1e-10 && margin_ok && search_ok;
    record("squared independence", pass,
           fmt("1D n=2..12 |min eig - 1/(2pi)| <= %.1e (tol 1e-10); rect min eig %.3e vs "
               "10x tol %.1e; witness |det| %.2e > %.1e in %d trials",
               max_dev, gram2.min_eigenvalue, 10.0 * gram2.tolerance, std::abs(search.best_det),
               search.det_tol, search.trials));
}

// 4. Integer relation search at desk scale. Square spectrum (2,5,5,8) at
//    height 4 must surface q=(0,1,-1,0) and q=(4,0,0,-1), both exact zeros.
//    Rectangle first four at height 20: see the file comment; expected FAIL
//    with the exact height-1 relation as witness. Budget 10 s.
void check_nonresonance() {
    Stopwatch timer;
    const auto square = spectral::orthotope_spectrum(exact_square(), 4);
    spectral::ResonanceOptions opts;
    opts.max_relations = 512;
    const auto sq = spectral::nonresonance_search(square, 4, 4, opts);
    const std::vector<std::int64_t> swap_q = {0, 1, -1, 0};
    const std::vector<std::int64_t> scale_q = {4, 0, 0, -1};
    bool found_swap = false;
    bool found_scale = false;
    for (const auto& r : sq.relations) {
        if (r.q == swap_q && r.residual == 0.0 && r.exact_zero) found_swap = true;
        if (r.q == scale_q && r.residual == 0.0 && r.exact_zero) found_scale = true;
    }

    const auto rect = spectral::orthotope_spectrum(exact_rectangle(), 4);
    const auto rc = spectral::nonresonance_search(rect, 4, 20);
    const std::vector<std::int64_t> cancel_q = {1, -1, -1, 1};
    bool rect_witness = false;
    for (const auto& r : rc.relations)
        if (r.q == cancel_q && r.exact_zero) rect_witness = true;

    const double elapsed = timer.seconds();
    const bool square_ok = found_swap && found_scale;
    const bool rect_holds = rc.verdict == spectral::Verdict::holds;
    const bool pass = square_ok && rect_holds && elapsed <= 10.0;
    // The rectangle target cannot hold; the run counts as expected when the
    // square half passes and the search produces the exact cancellation.
    const bool as_expected = square_ok && !rect_holds && rect_witness && elapsed <= 10.0;
    record("integer relation search", pass,
           pass ? fmt("square relations found; rectangle holds to height 20; %.1fs", elapsed)
                : fmt("square q=(0,1,-1,0)%s q=(4,0,0,-1)%s; rectangle height-20 target is "
                      "unattainable: q=(1,-1,-1,1) is an exact relation of height 1 "
                      "(search verdict %s); %.1fs (<= 10s)",
                      found_swap ? " found," : " MISSING,", found_scale ? " found" : " MISSING",
                      spectral::verdict_name(rc.verdict).c_str(), elapsed),
           /*expect_pass=*/!as_expected);
}

// 5. Hadamard formula on the square, top face at unit speed: mode (1,1)
//    derivative -2/pi, mode (1,2) derivative -8/pi, and the finite
//    difference confirms both to 1e-3 at dt = 1e-3.
void check_hadamard() {
    const auto square = spectral::orthotope_spectrum(exact_square(), 4);
    const auto top = spectral::orthotope_face(1, 1);
    const double d1 = spectral::hadamard_derivative(square, top, 1);
    const double d2 = spectral::hadamard_derivative(square, top, 2);
    const auto fd1 = spectral::fd_shape_check(square.orthotope()->domain, 1, 1, 1.0, 1, 1e-3);
    const auto fd2 = spectral::fd_shape_check(square.orthotope()->domain, 1, 1, 1.0, 2, 1e-3);

    const double t1 = -2.0 / kPi;
    const double t2 = -8.0 / kPi;
    const bool pass = std::abs(d1 - t1) <= 1e-10 * std::abs(t1) &&
                      std::abs(d2 - t2) <= 1e-10 * std::abs(t2) && fd1.rel_error < 1e-3 &&
                      fd2.rel_error < 1e-3;
    record("hadamard shape derivative", pass,
           fmt("mode (1,1): %.12f vs -2/pi, fd rel err %.1e; mode (1,2): %.12f vs -8/pi, "
               "fd rel err %.1e (tol 1e-3)",
               d1, fd1.rel_error, d2, fd2.rel_error));
}

// 6. Potential derivative on (0, pi) with W(x) = x, mode 1: the closed form
//    gives pi/2 and the finite-difference slope agrees to 1e-4.
void check_potential_derivative() {
    const double target = kPi / 2.0;
    const auto check = spectral::fd_potential_check(kPi, speclab::coordinate_field(0, 1), 1, 1e-3);
    const bool pass = std::abs(check.formula - target) <= 1e-12 * target &&
                      std::abs(check.fd_slope - target) / target < 1e-4 &&
                      check.rel_error < 1e-4;
    record("potential derivative", pass,
           fmt("formula %.15f vs pi/2, fd slope rel err %.2e (tol 1e-4)", check.formula,
               std::abs(check.fd_slope - target) / target));
}

// 7. Relaxed damping optimization. 1D, ell = pi/2, N = 1: optimum
//    1/2 + 1/pi to 1e-4 with at most one fractional cell. Rectangle, N = 3:
//    certified duality gap, at most three fractional cells, and the optimum
//    as a function of the budget is concave nondecreasing on a 10-point grid.
void check_damping_optimization() {
    const auto line = spectral::orthotope_spectrum(geom::make_orthotope({1.0}), 4);
    const auto sol1 = spectral::optimize_relaxed(line, kPi / 2.0, 1);
    const double target = 0.5 + 1.0 / kPi;
    double max_cell = 0.0;
    for (double a : sol1.density.cells.area) max_cell = std::max(max_cell, a);
    const bool line_ok =
        std::abs(sol1.j_value - target) <= 1e-4 && sol1.intermediate_measure <= max_cell + 1e-12;

    const auto rect = spectral::orthotope_spectrum(exact_rectangle(), 6);
    const double area = rect.orthotope()->domain.volume();
    const auto sol2 = spectral::optimize_relaxed(rect, 0.5 * area, 3);
    int fractional = 0;
    for (double a : sol2.density.a)
        if (a >= 1e-3 && a <= 1.0 - 1e-3) ++fractional;
    const bool rect_ok = sol2.duality_gap <= 1e-8 * sol2.j_value && fractional <= 3;

    std::vector<double> t_of_ell(10);
    for (int i = 1; i <= 10; ++i)
        t_of_ell[i - 1] = spectral::optimize_relaxed(rect, area * i / 11.0, 3).j_value;
    bool nondecreasing = true;
    bool concave = true;
    for (int i = 1; i < 10; ++i) {
        if (t_of_ell[i] < t_of_ell[i - 1] - 1e-10) nondecreasing = false;
        if (i >= 2 && (t_of_ell[i] - t_of_ell[i - 1]) >
                          (t_of_ell[i - 1] - t_of_ell[i - 2]) + 1e-8)
            concave = false;
    }

    const bool pass = line_ok && rect_ok && nondecreasing && concave;
    record("damping optimization", pass,
           fmt("1D t* %.6f vs %.6f (tol 1e-4), intermediate %.1e <= cell %.1e; rect gap %.1e "
               "<= %.1e, %d fractional cells (<= 3); t*(ell) nondecreasing=%d concave=%d",
               sol1.j_value, target, sol1.intermediate_measure, max_cell, sol2.duality_gap,
               1e-8 * sol2.j_value, fractional, int(nondecreasing), int(concave)));
}

// 8. Decay-rate sanity: a = 1 everywhere with k_damp = 0.5 on (0, pi) makes
//    every truncated pencil eigenvalue sit at real part -1/2, so the rate is
//    0.5 to 1e-6 for any truncation M >= 4.
void check_decay_rate() {
    const auto sys = spectral::orthotope_spectrum(geom::make_orthotope({1.0}), 32);
    const auto cells = spectral::default_cells(sys);
    const auto full = spectral::uniform_density(cells, cells.total_area());
    double max_dev = 0.0;
    for (int m : {4, 6, 8, 16, 32})
        max_dev = std::max(max_dev, std::abs(spectral::modal_decay_rate(sys, full, 0.5, m) - 0.5));
    record("modal decay rate", max_dev <= 1e-6,
           fmt("a=1, k=0.5: max |rate - 0.5| = %.2e over M in {4,6,8,16,32} (tol 1e-6)", max_dev));
}

// 9. Bilinear-control precheck on (0, pi): W(x) = x gives first coupling
//    -16/(9 pi) and a resonance-found verdict (the spectrum 1,4,9,16,... is
//    rationally dependent); W = 1 is orthogonal to every consecutive pair,
//    so the verdict is coupling-fails(1).
void check_schrodinger() {
    const auto sys = spectral::orthotope_spectrum(geom::make_orthotope({1.0}), 6);
    const auto slope = spectral::controllability_precheck(sys, speclab::coordinate_field(0, 1),
                                                          4, 10);
    const double target = -16.0 / (9.0 * kPi);
    const bool slope_ok = std::abs(slope.couplings[0] - target) <= 1e-4 &&
                          slope.verdict == "resonance-found";

    const auto flat = spectral::controllability_precheck(sys, speclab::constant_field(1.0), 4, 10);
    const bool flat_ok = flat.verdict == "coupling-fails(1)" && flat.failed_coupling == 1;

    record("bilinear control precheck", slope_ok && flat_ok,
           fmt("W=x: coupling_1 %.8f vs -16/(9pi) (tol 1e-4), verdict %s; W=1: verdict %s",
               slope.couplings[0], slope.verdict.c_str(), flat.verdict.c_str()));
}

// 10. Eigenvalue tracking across a crossing: stretch the rectangle through
//     mu_2(t) = 0.6 + 0.3t on a t-grid of step 0.01. Modes (3,1) and (1,2)
//     (sorted positions 3 and 4 at t = 0) exchange order where
//     8 = 3/mu_2(t)^2; the detected interval must bracket the
//     bisection-computed crossing to within one grid step.
void check_tracking() {
    Stopwatch timer;
    auto lo = [](double t) { return 0.6 + 0.3 * t; };
    auto gap = [&](double t) { return 8.0 - 3.0 / (lo(t) * lo(t)); };
    double a = 0.0, b = 0.5;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (a + b);
        (gap(a) * gap(mid) <= 0.0 ? b : a) = mid;
    }
    const double t_true = 0.5 * (a + b);

    const auto base = geom::mesh_rectangle(kPi, 0.6 * kPi, 0.1);
    auto far = base;
    for (auto& v : far.vertices) v.y *= 1.5;
    far.rebuild_metrics();
    const auto path = geom::interpolation_path(base, far, 100);
    const auto ep = spectral::track_path(path, 6);

    bool found = false;
    double t_lo = 0.0, t_hi = 0.0;
    for (const auto& c : ep.crossings) {
        const bool pair34 = (c.mode_a == 3 && c.mode_b == 4) || (c.mode_a == 4 && c.mode_b == 3);
        if (pair34 && c.t_lo <= t_true + 0.011 && c.t_hi >= t_true - 0.011) {
            found = true;
            t_lo = c.t_lo;
            t_hi = c.t_hi;
            break;
        }
    }
    record("eigenvalue tracking", found,
           found ? fmt("crossing of modes 3,4 detected on [%.3f, %.3f], bisection t = %.6f, "
                       "slack one grid step 0.01; %.1fs",
                       t_lo, t_hi, t_true, timer.seconds())
                 : fmt("no crossing of modes 3,4 bracketing t = %.6f within 0.01 (%zu events); "
                       "%.1fs",
                       t_true, ep.crossings.size(), timer.seconds()));
}

void run(const char* label, void (*check)()) {
    try {
        check();
    } catch (const std::exception& e) {
        record(label, false, fmt("exception: %s", e.what()));
    }
}

} // namespace

int main() {
    run("fem oracle agreement", check_fem_oracle);
    run("degeneracy reproduction", check_degeneracy);
    run("squared independence", check_squared_independence);
    run("integer relation search", check_nonresonance);
    run("hadamard shape derivative", check_hadamard);
    run("potential derivative", check_potential_derivative);
    run("damping optimization", check_damping_optimization);
    run("modal decay rate", check_decay_rate);
    run("bilinear control precheck", check_schrodinger);
    run("eigenvalue tracking", check_tracking);

    int mismatched = 0;
    int passed = 0;
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& r = results[i];
        const char* status = r.pass ? "PASS" : (r.expect_pass ? "FAIL" : "FAIL (expected)");
        std::printf("[%2zu] %-28s %-15s %s\n", i + 1, r.label.c_str(), status, r.detail.c_str());
        if (r.pass) ++passed;
        if (r.pass != r.expect_pass) ++mismatched;
    }
    std::printf("acceptance: %d/%zu checks pass", passed, results.size());
    for (const auto& r : results)
        if (!r.pass && !r.expect_pass) {
            std::printf("; '%s' fails as expected", r.label.c_str());
            break;
        }
    std::printf("; %s\n", mismatched == 0 ? "every check matched its expected outcome"
                                          : "UNEXPECTED OUTCOMES PRESENT");
    return mismatched == 0 ? 0 : 1;
}
