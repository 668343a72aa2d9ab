#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "speclab/errors.hpp"
#include "speclab/perturbation.hpp"

using namespace speclab;
using namespace speclab::spectral;
constexpr double pi = std::numbers::pi;

namespace {

geom::Orthotope rectangle() { return geom::make_orthotope({1.0, std::pow(2.0, -0.25)}); }

geom::VectorField2D dilation_field() {
    return {[](double x, double y) { return std::array<double, 2>{x, y}; }, 1e9, "dilation"};
}

// rectangle family whose short side grows linearly from 0.6*pi to 0.9*pi;
// the end mesh reuses the start connectivity so the path interpolates it
geom::DeformationPath stretched_family(double h, int steps, bool reversed) {
    auto m0 = geom::mesh_rectangle(pi, 0.6 * pi, h);
    auto m1 = m0;
    for (auto& v : m1.vertices) v.y *= 1.5;
    m1.rebuild_metrics();
    return reversed ? geom::interpolation_path(m1, m0, steps)
                    : geom::interpolation_path(m0, m1, steps);
}

} // namespace

TEST_CASE("face derivative closed forms") {
    const auto sq = orthotope_spectrum(geom::make_orthotope({1.0, 1.0}), 4);
    const auto top = orthotope_face(1, 1);
    // lex order on the square: (1,1), (1,2), (2,1), (2,2)
    CHECK(hadamard_derivative(sq, top, 1) == doctest::Approx(-2.0 / pi).epsilon(1e-14));
    CHECK(hadamard_derivative(sq, top, 2) == doctest::Approx(-8.0 / pi).epsilon(1e-14));
    CHECK(hadamard_derivative(sq, top, 3) == doctest::Approx(-2.0 / pi).epsilon(1e-14));
    CHECK(hadamard_derivative(sq, top, 4) == doctest::Approx(-8.0 / pi).epsilon(1e-14));

    // general wall: -speed * (2/(mu_d pi)) * (k_d/mu_d)^2
    const auto rect = orthotope_spectrum(rectangle(), 6);
    CHECK(hadamard_derivative(rect, orthotope_face(0, 0, 2.0), 1) ==
          doctest::Approx(-4.0 / pi).epsilon(1e-14));
    const double mu2 = std::pow(2.0, -0.25);
    CHECK(hadamard_derivative(rect, orthotope_face(1, 1), 1) ==
          doctest::Approx(-2.0 / (pi * mu2 * mu2 * mu2)).epsilon(1e-14));

    // opposite walls carry the same slope, and the value is linear in speed
    for (int l = 1; l <= 6; ++l) {
        CHECK(hadamard_derivative(rect, orthotope_face(0, 0), l) ==
              hadamard_derivative(rect, orthotope_face(0, 1), l));
        CHECK(hadamard_derivative(rect, orthotope_face(1, 1, 2.0), l) ==
              2.0 * hadamard_derivative(rect, orthotope_face(1, 1, 1.0), l));
        // pushing a wall outward always lowers the eigenvalue
        CHECK(hadamard_derivative(rect, orthotope_face(1, 1), l) < 0.0);
    }

    CHECK_THROWS_AS(hadamard_derivative(rect, top, 0), Error);
    CHECK_THROWS_AS(hadamard_derivative(rect, top, 7), Error);
    CHECK_THROWS_AS(hadamard_derivative(rect, orthotope_face(2, 1), 1), Error);
    CHECK_THROWS_AS(orthotope_face(0, 2), Error);
}

TEST_CASE("dilation sum rule: face contributions add up to -2 lambda") {
    // moving every wall with speed x.nu dilates the domain, and lambda scales
    // like t^-2; walls through the origin have x.nu = 0 and contribute nothing
    const auto rect = orthotope_spectrum(rectangle(), 6);
    const auto& dom = rect.orthotope()->domain;
    for (int l = 1; l <= 6; ++l) {
        double sum = 0.0;
        for (int d = 0; d < 2; ++d)
            sum += hadamard_derivative(rect, orthotope_face(d, 1, dom.side(d)), l);
        CHECK(sum == doctest::Approx(-2.0 * rect.lambdas[l - 1]).epsilon(1e-13));
    }
}

TEST_CASE("sampled face speeds integrate against the slope density") {
    const auto sq = orthotope_spectrum(geom::make_orthotope({1.0, 1.0}), 1);
    auto pert = orthotope_face(1, 1);
    pert.speed_fn = [](const PointXd& p) { return p[0]; };
    // (2/pi)^2 * integral x sin^2 x = (4/pi^2)(pi^2/4) = 1
    CHECK(hadamard_derivative(sq, pert, 1) == doctest::Approx(-1.0).epsilon(1e-10));

    auto flat = orthotope_face(1, 1, 0.7);
    auto sampled = flat;
    sampled.speed_fn = [](const PointXd&) { return 0.7; };
    CHECK(hadamard_derivative(sq, sampled, 1) ==
          doctest::Approx(hadamard_derivative(sq, flat, 1)).epsilon(1e-12));
}

TEST_CASE("mesh boundary flux approaches the closed form") {
    const auto mesh = geom::mesh_rectangle(pi, pi, 0.1);
    const auto sys = fem_spectrum(mesh, 1);
    std::vector<int> all(mesh.boundary_edges.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    const auto pert = mesh_boundary(mesh, all, 1.0);

    double wsum = 0.0;
    for (double w : pert.weights) {
        CHECK(w > 0.0);
        wsum += w;
    }
    CHECK(wsum == doctest::Approx(4.0 * pi).epsilon(1e-9));  // |Gamma| for the square

    const double val = hadamard_derivative(sys, pert, 1);
    CHECK(val == doctest::Approx(-8.0 / pi).epsilon(1e-3));

    CHECK_THROWS_AS(mesh_boundary(mesh, {-1}, 1.0), Error);
    CHECK_THROWS_AS(mesh_boundary(mesh, {static_cast<int>(all.size())}, 1.0), Error);

    // isolated-eigenvalue gate: the square's split pair counts as a cluster
    // once gap_tol covers the discretization-scale gap
    FemOptions wide;
    wide.gap_tol = 1e-1;
    const auto sys4 = fem_spectrum(mesh, 4, wide);
    CHECK_THROWS_AS(hadamard_derivative(sys4, pert, 2), Error);
}

TEST_CASE("fd shape check on orthotope families") {
    const auto sq = geom::make_orthotope({1.0, 1.0});
    const auto c1 = fd_shape_check(sq, 1, 1, 1.0, 1, 1e-3);
    CHECK(c1.formula == doctest::Approx(-2.0 / pi).epsilon(1e-14));
    CHECK(c1.rel_error < 1e-5);

    // mode 2 is the (1,2) branch; the family follows it through the
    // degeneracy at t = 0 without a kink
    const auto c2 = fd_shape_check(sq, 1, 1, 1.0, 2, 1e-3);
    CHECK(c2.formula == doctest::Approx(-8.0 / pi).epsilon(1e-14));
    CHECK(c2.rel_error < 1e-5);

    // central differences drop quartically in value: halving dt divides the
    // defect by about four
    const auto ca = fd_shape_check(sq, 1, 1, 1.0, 1, 2e-3);
    const auto cb = fd_shape_check(sq, 1, 1, 1.0, 1, 1e-3);
    const double ra = std::fabs(ca.fd_slope - ca.formula);
    const double rb = std::fabs(cb.fd_slope - cb.formula);
    CHECK(ra / rb > 3.5);
    CHECK(ra / rb < 4.5);

    // both walls of the same axis stretch the side identically
    const auto c0 = fd_shape_check(sq, 1, 0, 1.0, 1, 1e-3);
    CHECK(c0.fd_slope == doctest::Approx(c1.fd_slope).epsilon(1e-12));

    CHECK_THROWS_AS(fd_shape_check(sq, 1, 1, 1.0, 1, 0.0), Error);
    CHECK_THROWS_AS(fd_shape_check(sq, 1, 1, -10.0, 1, 1.0), Error);  // collapses the side
}

TEST_CASE("fd shape check on a meshed disk under dilation") {
    const auto disk = geom::mesh_unit_disk(0.05);
    const auto chk = fd_shape_check(disk, dilation_field(), 1, 1e-3);
    // the P1 boundary flux is first-order accurate; the finite difference
    // tracks the exact scaling lambda(t) = e^(-2t) lambda of the dilated mesh
    const auto sys = fem_spectrum(disk, 1);
    CHECK(chk.fd_slope == doctest::Approx(-2.0 * sys.lambdas[0]).epsilon(1e-5));
    CHECK(chk.rel_error < 0.1);

    const auto coarse = fd_shape_check(geom::mesh_unit_disk(0.1), dilation_field(), 1, 1e-3);
    CHECK(chk.rel_error < coarse.rel_error);

    // the disk's second eigenvalue is a true pair; with gap_tol at the
    // discretization scale the check refuses to differentiate it
    FemOptions wide;
    wide.gap_tol = 1e-3;
    CHECK_THROWS_AS(fd_shape_check(disk, dilation_field(), 2, 1e-3, wide), Error);
}

TEST_CASE("potential derivative closed forms") {
    const auto line = orthotope_spectrum(geom::make_orthotope({1.0}), 3);
    for (int k = 1; k <= 3; ++k) {
        CHECK(potential_derivative(line, constant_field(1.0), k) ==
              doctest::Approx(1.0).epsilon(1e-13));
        CHECK(potential_derivative(line, constant_field(2.5), k) ==
              doctest::Approx(2.5).epsilon(1e-13));
    }
    const auto x = coordinate_field(0, 1);
    CHECK(potential_derivative(line, x, 1) == doctest::Approx(pi / 2).epsilon(1e-12));
    CHECK(potential_derivative(line, x, 2) == doctest::Approx(pi / 2).epsilon(1e-12));

    // (2/pi) integral x^2 sin^2(kx) = pi^2/3 - 1/(2 k^2)
    const auto x2 = poly_field({{1.0, {2}}}, "x^2");
    CHECK(potential_derivative(line, x2, 1) ==
          doctest::Approx(pi * pi / 3 - 0.5).epsilon(1e-12));
    CHECK(potential_derivative(line, x2, 2) ==
          doctest::Approx(pi * pi / 3 - 0.125).epsilon(1e-12));

    const auto rect = orthotope_spectrum(rectangle(), 2);
    CHECK(potential_derivative(rect, coordinate_field(0, 2), 1) ==
          doctest::Approx(pi / 2).epsilon(1e-12));

    CHECK_THROWS_AS(potential_derivative(line, cellwise_field({1.0}, "cells"), 1), Error);
    CHECK_THROWS_AS(potential_derivative(line, x, 4), Error);
}

TEST_CASE("potential derivative on meshes") {
    const auto mesh = geom::mesh_rectangle(pi, pi, 0.1);
    const auto sys = fem_spectrum(mesh, 1);

    // the quadrature integrates phi^2 exactly, so constants come back exact
    CHECK(potential_derivative(sys, constant_field(3.0), 1) ==
          doctest::Approx(3.0).epsilon(1e-12));
    CHECK(potential_derivative(sys, coordinate_field(0, 2), 1) ==
          doctest::Approx(pi / 2).epsilon(1e-9));

    std::vector<double> half(mesh.triangles.size(), 0.0);
    for (std::size_t t = 0; t < half.size(); ++t)
        if (mesh.centroid(static_cast<int>(t)).x < pi / 2) half[t] = 1.0;
    CHECK(potential_derivative(sys, cellwise_field(half, "left half"), 1) ==
          doctest::Approx(0.5).epsilon(1e-9));

    half.pop_back();
    CHECK_THROWS_AS(potential_derivative(sys, cellwise_field(half, "short"), 1), Error);

    FemOptions wide;
    wide.gap_tol = 1e-1;
    const auto sys4 = fem_spectrum(mesh, 4, wide);
    CHECK_THROWS_AS(potential_derivative(sys4, constant_field(1.0), 2), Error);
}

TEST_CASE("tridiagonal pencil eigenvalues match the discrete dispersion") {
    // uniform P1 on (0, pi): lambda_h = (6/h^2) (1 - cos kh) / (2 + cos kh)
    const int cells = 51;
    const double h = pi / cells;
    const int nd = cells - 1;
    std::vector<double> ad(nd, 2.0 / h), ao(nd - 1, -1.0 / h);
    std::vector<double> bd(nd, 2.0 * h / 3.0), bo(nd - 1, h / 6.0);
    for (int k = 1; k <= 3; ++k) {
        const double exact = 6.0 / (h * h) * (1 - std::cos(k * h)) / (2 + std::cos(k * h));
        CHECK(detail::tridiag_pencil_eigenvalue(ad, ao, bd, bo, k) ==
              doctest::Approx(exact).epsilon(1e-12));
    }
    CHECK_THROWS_AS(detail::tridiag_pencil_eigenvalue(ad, ao, bd, bo, 0), Error);
    CHECK_THROWS_AS(detail::tridiag_pencil_eigenvalue(ad, ao, bd, bo, nd + 1), Error);
}

TEST_CASE("1D potential check against the closed-form column") {
    const auto x = coordinate_field(0, 1);
    const auto c1 = fd_potential_check(pi, x, 1, 1e-3);
    CHECK(c1.formula == doctest::Approx(pi / 2).epsilon(1e-14));
    CHECK(c1.rel_error < 1e-4);
    CHECK(fd_potential_check(pi, x, 2, 1e-3).rel_error < 1e-4);

    // V == 1 shifts the pencil rigidly, so the slope is 1 to rounding
    const auto cc = fd_potential_check(pi, constant_field(1.0), 1, 1e-3);
    CHECK(std::fabs(cc.fd_slope - 1.0) < 1e-6);

    // a longer interval exercises the length scaling: E[x] is the midpoint
    const auto cl = fd_potential_check(2 * pi, x, 1, 1e-3);
    CHECK(cl.formula == doctest::Approx(pi).epsilon(1e-13));
    CHECK(cl.rel_error < 1e-4);

    CHECK_THROWS_AS(fd_potential_check(-1.0, x, 1, 1e-3), Error);
    CHECK_THROWS_AS(fd_potential_check(pi, x, 1, 0.0), Error);
    CHECK_THROWS_AS(fd_potential_check(pi, cellwise_field({1.0}, "cells"), 1, 1e-3), Error);
}

TEST_CASE("mesh potential check differentiates the perturbed pencil") {
    const auto mesh = geom::mesh_rectangle(pi, pi * std::pow(2.0, -0.25), 0.15);
    const auto chk = fd_potential_check(mesh, coordinate_field(0, 2), 1, 1e-3);
    CHECK(chk.formula == doctest::Approx(pi / 2).epsilon(1e-6));
    CHECK(chk.rel_error < 1e-9);

    std::vector<double> half(mesh.triangles.size(), 0.0);
    for (std::size_t t = 0; t < half.size(); ++t)
        if (mesh.centroid(static_cast<int>(t)).x < pi / 2) half[t] = 1.0;
    CHECK(fd_potential_check(mesh, cellwise_field(half, "left half"), 1, 1e-3).rel_error <
          1e-8);
}

TEST_CASE("tracking a constant path is the identity") {
    const auto mesh = geom::mesh_rectangle(pi, pi, 0.2);
    const auto path = geom::interpolation_path(mesh, mesh, 3);
    const auto ep = track_path(path, 4);
    CHECK(ep.steps() == 4);
    CHECK(ep.n() == 4);
    CHECK(ep.crossings.empty());
    for (int s = 0; s < ep.steps(); ++s) {
        for (int k = 0; k < 4; ++k) {
            CHECK(ep.pairing[s][k] == k);
            // the lerp rounds vertex coordinates in the last bit, so the
            // spectrum is reproduced to rounding rather than bitwise
            CHECK(ep.curves[k][s] == doctest::Approx(ep.curves[k][0]).epsilon(1e-12));
        }
    }
}

TEST_CASE("tracking detects the stretched-rectangle crossings") {
    // short side 0.6*pi + 0.3*pi*t: branches (1,2) and (3,1) meet at
    // t = (sqrt(3/8) - 0.6)/0.3, and (2,2) later dives into the window
    // through (3,1) at t = (sqrt(3/5) - 0.6)/0.3
    const double t_cross = (std::sqrt(0.375) - 0.6) / 0.3;
    const double t_window = (std::sqrt(0.6) - 0.6) / 0.3;
    const double step = 1.0 / 25;

    const auto path = stretched_family(0.1, 25, false);
    const auto ep = track_path(path, 4);
    REQUIRE(ep.crossings.size() == 2);

    const auto& c0 = ep.crossings.front().mode_b == 4 ? ep.crossings[0] : ep.crossings[1];
    const auto& c1 = ep.crossings.front().mode_b == 4 ? ep.crossings[1] : ep.crossings[0];
    CHECK(c0.mode_a == 3);
    CHECK(c0.mode_b == 4);
    CHECK(c0.t_lo <= t_cross + step);
    CHECK(c0.t_hi >= t_cross - step);
    CHECK(c0.min_gap == 0.0);
    CHECK(c1.mode_a == 3);
    CHECK(c1.mode_b == 5);  // exchange with the first branch beyond the window
    CHECK(std::fabs(0.5 * (c1.t_lo + c1.t_hi) - t_window) < 2 * step);

    // every pairing row stays a permutation of the window
    for (int s = 0; s < ep.steps(); ++s) {
        auto row = ep.pairing[s];
        std::sort(row.begin(), row.end());
        for (int k = 0; k < 4; ++k) CHECK(row[k] == k);
    }

    // the curve multiset reproduces the plain spectrum at spot-check steps
    for (int s : {0, 13, 25}) {
        const auto sys = fem_spectrum(path.meshes[s], 4);
        std::vector<double> vals;
        for (int k = 0; k < 4; ++k) vals.push_back(ep.curves[k][s]);
        std::sort(vals.begin(), vals.end());
        for (int k = 0; k < 4; ++k)
            CHECK(vals[k] == doctest::Approx(sys.lambdas[k]).epsilon(1e-8));
    }

    // running the family backwards mirrors the crossing locations
    const auto rev = track_path(stretched_family(0.1, 25, true), 4);
    REQUIRE(rev.crossings.size() == 2);
    for (const auto& ev : ep.crossings) {
        const double mirrored = 1.0 - 0.5 * (ev.t_lo + ev.t_hi);
        bool found = false;
        for (const auto& rv : rev.crossings)
            if (std::fabs(0.5 * (rv.t_lo + rv.t_hi) - mirrored) <= 2 * step + 1e-12)
                found = true;
        CHECK(found);
    }
}

TEST_CASE("pairing fails loudly on a too-coarse grid and recovers on a fine one") {
    const auto disk = geom::mesh_unit_disk(0.15);
    const auto coarse = geom::flow_path(disk, geom::squashing_field(), 1.5, 2);
    CHECK_THROWS_WITH_AS(track_path(coarse, 3), doctest::Contains("refine the time grid"),
                         Error);

    const auto fine = geom::flow_path(disk, geom::squashing_field(), 1.5, 40);
    const auto ep = track_path(fine, 3);
    CHECK(ep.steps() == 41);
    for (int k = 0; k < 3; ++k) CHECK(ep.curves[k].front() > 0.0);
}

TEST_CASE("boundary perturbation bookkeeping") {
    const auto disk = geom::mesh_unit_disk(0.15);
    const auto pert = mesh_boundary_field(disk, dilation_field());
    REQUIRE(pert.edges.size() == disk.boundary_edges.size());
    REQUIRE(pert.edge_speeds.size() == pert.edges.size());
    double total = 0.0, wsum = 0.0;
    for (const auto& be : disk.boundary_edges) total += be.length;
    for (double w : pert.weights) {
        CHECK(w > 0.0);
        wsum += w;
    }
    CHECK(wsum == doctest::Approx(total).epsilon(1e-15));
    // dilation points outward everywhere on the circle
    for (double s : pert.edge_speeds) CHECK(s > 0.9);

    CHECK_THROWS_AS(track_path(geom::DeformationPath{}, 1), Error);
}
