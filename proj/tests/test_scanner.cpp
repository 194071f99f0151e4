#include <catch2/catch_amalgamated.hpp>

#include "gpnodal/csv.hpp"
#include "gpnodal/scanner.hpp"

using namespace gpnodal;

TEST_CASE("grid validation") {
    ScanGrid g;
    g.r_values = {0.0};
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    g.r_values = {0.5};
    g.theta.n = 1;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    g.theta.n = 2;
    g.omega_t = 0.0;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
}

TEST_CASE("free scan at r=1 finds exactly the sin2theta=0 / cos2beta=0 loci") {
    ScanGrid grid;
    grid.theta.n = 129;
    grid.beta.n = 129;
    grid.r_values = {1.0};
    const NodalScanResult res = scan_free(StateVariant::phi, grid);
    REQUIRE_FALSE(res.nodal_points.empty());
    const ModelParams model{1.0, 1.0, 0.0, kPi};
    for (const NodalPoint& p : res.nodal_points) {
        CHECK(p.residual < 1e-10);
        const double on_locus =
            std::min(std::abs(std::sin(2.0 * p.theta)), std::abs(std::cos(2.0 * p.second)));
        CHECK(on_locus < 1e-4);
        // re-evaluate through the full numeric pipeline
        const Complex full = nodal_function({StateVariant::phi, 1.0, p.theta, p.second}, model,
                                            HamiltonianKind::free);
        CHECK(std::abs(full) < 1e-8);
    }
}

TEST_CASE("free scan at fixed r finds exactly the cos2beta sin2theta = x*(r) level set") {
    // Setting x = cos 2beta sin 2theta reduces the closed-form trace to
    // (1+3r)/4 x + (1-r)/4 h(x); its unique root x*(r) < 0 characterizes
    // the whole nodal set at that r.
    const double r = 0.9;
    const auto f_of_x = [&](double x) {
        return 0.25 * (1.0 + 3.0 * r) * x +
               0.25 * (1.0 - r) *
                   (1.0 - (1.0 + x) * std::cos(0.5 * kPi * std::sqrt(2.0 + 2.0 * x)));
    };
    double lo = -1.0, hi = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (f_of_x(mid) < 0.0 ? lo : hi) = mid;
    }
    const double x_star = 0.5 * (lo + hi);

    ScanGrid grid;
    grid.theta.n = 257;
    grid.beta.n = 257;
    grid.r_values = {r};
    const NodalScanResult res = scan_free(StateVariant::phi, grid);
    REQUIRE_FALSE(res.nodal_points.empty());
    bool off_axis = false;
    for (const NodalPoint& p : res.nodal_points) {
        CHECK(std::cos(2.0 * p.second) * std::sin(2.0 * p.theta) ==
              Catch::Approx(x_star).margin(1e-7));
        if (std::abs(std::sin(2.0 * p.theta)) > 0.5) off_axis = true;
    }
    CHECK(off_axis);  // the level set reaches theta = pi/4 when |x*| < 1
}

TEST_CASE("free scan is worker-count independent") {
    ScanGrid grid;
    grid.theta.n = 65;
    grid.beta.n = 65;
    grid.r_values = {0.4, 1.0};
    const NodalScanResult a = scan_free(StateVariant::phi, grid, 1);
    const NodalScanResult b = scan_free(StateVariant::phi, grid, 8);
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t ri = 0; ri < a.trace.size(); ++ri)
        for (std::size_t k = 0; k < a.trace[ri].size(); ++k)
            REQUIRE(a.trace[ri][k] == b.trace[ri][k]);
    REQUIRE(a.nodal_points.size() == b.nodal_points.size());
    for (std::size_t k = 0; k < a.nodal_points.size(); ++k) {
        REQUIRE(a.nodal_points[k].theta == b.nodal_points[k].theta);
        REQUIRE(a.nodal_points[k].second == b.nodal_points[k].second);
    }
    CHECK(free_grid_csv(a) == free_grid_csv(b));
    CHECK(nodal_points_csv(a) == nodal_points_csv(b));
}

TEST_CASE("free scan symmetry under theta -> theta+pi and beta -> beta+pi") {
    ScanGrid grid;
    grid.theta = {65, 0.0, 2.0 * kPi};
    grid.beta = {65, 0.0, 2.0 * kPi};
    grid.r_values = {0.7};
    const NodalScanResult res = scan_free(StateVariant::phi, grid);
    const int n = 65, half = 32;  // pi shift in index space
    for (int i = 0; i < half; ++i)
        for (int j = 0; j < half; ++j) {
            const Complex v = res.trace[0][static_cast<std::size_t>(i) * n + j];
            const Complex vt = res.trace[0][static_cast<std::size_t>(i + half) * n + j];
            const Complex vb = res.trace[0][static_cast<std::size_t>(i) * n + j + half];
            CHECK(std::abs(v - vt) < 1e-12);
            CHECK(std::abs(v - vb) < 1e-12);
        }
}

TEST_CASE("mirror relation between phi and psi grids") {
    // theta -> pi - theta flips sin 2theta, which is the phi <-> psi map.
    ScanGrid grid;
    grid.theta.n = 65;
    grid.beta.n = 65;
    grid.r_values = {0.6};
    const NodalScanResult phi = scan_free(StateVariant::phi, grid);
    const NodalScanResult psi = scan_free(StateVariant::psi, grid);
    for (int i = 0; i < 65; ++i)
        for (int j = 0; j < 65; ++j)
            CHECK(std::abs(psi.trace[0][static_cast<std::size_t>(i) * 65 + j] -
                           phi.trace[0][static_cast<std::size_t>(64 - i) * 65 + j]) < 1e-10);
}

TEST_CASE("ising scan reproduces frozen intersection fixtures at r=0.02") {
    ScanGrid grid;
    grid.theta.n = 257;
    grid.coupling.n = 129;
    grid.r_values = {0.02};
    const NodalScanResult res = scan_ising(StateVariant::phi, grid, 0.0);

    // Frozen from an independent reference implementation: interior
    // intersections at J ~ 0.270006, theta ~ 2.122459 / 2.589930, plus the
    // decoupled-limit pair on the J=0 edge.
    bool found_a = false, found_b = false;
    for (const NodalPoint& p : res.nodal_points) {
        CHECK(p.residual < 1e-8);
        if (std::abs(p.theta - 2.1224590175) < 1e-6 && std::abs(p.second - 0.2700056124) < 1e-6)
            found_a = true;
        if (std::abs(p.theta - 2.5899299628) < 1e-6 && std::abs(p.second - 0.2700056124) < 1e-6)
            found_b = true;
    }
    CHECK(found_a);
    CHECK(found_b);

    // Both curve families must be present.
    bool has_re = false, has_im = false;
    for (const Polyline& c : res.curves) {
        if (c.kind == Polyline::Kind::re_zero) has_re = true;
        if (c.kind == Polyline::Kind::im_zero) has_im = true;
    }
    CHECK(has_re);
    CHECK(has_im);
}

TEST_CASE("ising J=0 column reduces to the free case") {
    ScanGrid grid;
    grid.theta.n = 65;
    grid.coupling.n = 17;
    grid.r_values = {0.5};
    const NodalScanResult res = scan_ising(StateVariant::phi, grid, 0.0);
    for (int i = 0; i < 65; ++i) {
        const Complex z = res.trace[0][static_cast<std::size_t>(i) * 17];
        const double expect = analytic_trace({StateVariant::phi, 0.5, grid.theta.at(i), 0.0});
        CHECK(std::abs(z - Complex(expect)) < 1e-10);
    }
    // The J=0 nodal points sit where the free closed form changes sign.
    for (const NodalPoint& p : res.nodal_points)
        if (p.second == 0.0)
            CHECK(std::abs(analytic_trace({StateVariant::phi, 0.5, p.theta, 0.0})) < 1e-8);
}

TEST_CASE("ising scan at strong coupling has no interior intersections") {
    ScanGrid grid;
    grid.theta.n = 129;
    grid.coupling = {65, 0.3, 0.5};
    grid.r_values = {0.1, 0.5, 0.9};
    const NodalScanResult res = scan_ising(StateVariant::phi, grid, 0.0);
    CHECK(res.nodal_points.empty());
}

TEST_CASE("ising scan is worker-count independent") {
    ScanGrid grid;
    grid.theta.n = 65;
    grid.coupling.n = 33;
    grid.r_values = {0.02};
    const NodalScanResult a = scan_ising(StateVariant::phi, grid, 0.0, 1);
    const NodalScanResult b = scan_ising(StateVariant::phi, grid, 0.0, 8);
    REQUIRE(a.nodal_points.size() == b.nodal_points.size());
    for (std::size_t k = 0; k < a.trace[0].size(); ++k) REQUIRE(a.trace[0][k] == b.trace[0][k]);
    CHECK(ising_grid_csv(a) == ising_grid_csv(b));
    CHECK(curves_csv(a) == curves_csv(b));
    CHECK(nodal_points_csv(a) == nodal_points_csv(b));
}

TEST_CASE("boundary scan shape and analytic column") {
    const auto rows = boundary_scan(StateVariant::phi, 65);
    REQUIRE(rows.size() == 65);
    CHECK(rows.front()[0] == 0.0);
    CHECK(rows.back()[0] == Catch::Approx(kPi).margin(1e-14));
    for (const auto& row : rows) {
        CHECK(row[2] == Catch::Approx(separability_boundary(row[0])).margin(1e-14));
        CHECK(row[1] >= 0.0);
        CHECK(row[1] <= 1.0);
    }
    // theta = 0: nodal exactly at r = 1 (sin 2theta = 0 locus).
    CHECK(rows.front()[1] == Catch::Approx(1.0).margin(1e-4));
    CHECK_THROWS_AS(boundary_scan(StateVariant::phi, 1), std::invalid_argument);
}

TEST_CASE("csv formatting") {
    CHECK(csv_double(1.0) == "1.0000000000000000e+00");
    CHECK(csv_double(-0.25) == "-2.5000000000000000e-01");
    ScanGrid grid;
    grid.theta.n = 2;
    grid.beta.n = 2;
    grid.r_values = {1.0};
    const NodalScanResult res = scan_free(StateVariant::phi, grid);
    const std::string csv = free_grid_csv(res);
    CHECK(csv.rfind("theta,beta,r,re_trace,im_trace,abs_trace\n", 0) == 0);
    CHECK(csv.find('\r') == std::string::npos);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);  // header + 4 cells
}
