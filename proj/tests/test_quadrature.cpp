#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>

#include "hardylab/quadrature.hpp"
#include "hardylab/wirtinger.hpp"

using namespace hardylab;

namespace {
const DiskQuadrature& default_disk() {
    static DiskQuadrature q = build_disk_quadrature(64, 256);
    return q;
}
const BoundaryQuadrature& default_boundary() {
    static BoundaryQuadrature q = build_boundary_quadrature(2048);
    return q;
}
}  // namespace

TEST_CASE("gauss-legendre nodes match tabulated values") {
    auto [x, w] = gauss_legendre(3);
    CHECK(x[0] == Catch::Approx(-0.7745966692414834).margin(1e-14));
    CHECK(x[1] == Catch::Approx(0.0).margin(1e-14));
    CHECK(w[0] == Catch::Approx(5.0 / 9.0).margin(1e-14));
    CHECK(w[1] == Catch::Approx(8.0 / 9.0).margin(1e-14));

    // exactness on polynomials up to degree 2n-1
    auto [x8, w8] = gauss_legendre(8);
    double s = 0.0;
    for (int i = 0; i < 8; ++i) s += w8[i] * std::pow(x8[i], 14);
    CHECK(s == Catch::Approx(2.0 / 15.0).margin(1e-14));
}

TEST_CASE("disk rule: normalization and moments") {
    const auto& q = default_disk();
    // int_0^1 r ln(1/r) dr = 1/4, so the rule applied to 1 gives exactly 1
    CHECK(std::abs(disk_integral([](DiskPoint) { return 1.0; }, q) - 1.0) < 1e-10);
    // (2/pi) * 2pi * int r^3 ln(1/r) dr = 4/16
    CHECK(std::abs(disk_integral([](DiskPoint p) { return std::norm(p.z); }, q) - 0.25) < 1e-10);
    // analytic field, mean zero per circle
    CHECK(std::abs(disk_integral([](DiskPoint p) { return p.z; }, q)) < 1e-12);
}

TEST_CASE("disk rule: weights positive, nodes interior") {
    const auto& q = default_disk();
    for (double w : q.weights) REQUIRE(w > 0.0);
    for (const auto& p : q.nodes) {
        REQUIRE(std::abs(p.z) > 0.0);
        REQUIRE(std::abs(p.z) < 1.0);
    }
    CHECK(q.r_min > 0.0);
    CHECK(q.r_max < 1.0);
}

TEST_CASE("disk rule rejects undersized parameters") {
    CHECK_THROWS_AS(build_disk_quadrature(3, 256), std::invalid_argument);
    CHECK_THROWS_AS(build_disk_quadrature(64, 7), std::invalid_argument);
}

TEST_CASE("non-finite integrand reports the offending node") {
    const auto& q = default_disk();
    CHECK_THROWS_AS(
        disk_integral([](DiskPoint p) { return 1.0 / (std::abs(p.z) - std::abs(p.z)); }, q),
        numeric_error);
}

TEST_CASE("boundary rule basics") {
    const auto& b = default_boundary();
    double total = 0.0;
    for (double w : b.weights) total += w;
    CHECK(total == Catch::Approx(1.0).margin(1e-15));

    CHECK(std::abs(boundary_integral([](cplx) { return 1.0; }, b) - 1.0) < 1e-14);
    CHECK(std::abs(boundary_integral([](cplx z) { return z; }, b)) < 1e-14);
    // |z - 1/2|^2 = 1 - cos(theta) + 1/4 on the circle
    CHECK(std::abs(boundary_integral([](cplx z) { return std::norm(z - 0.5); }, b) - 1.25) < 1e-12);
}

TEST_CASE("green residual on reference fields") {
    const auto& q = default_disk();
    const auto& b = default_boundary();
    // V = |z|^2: Delta V = 1 (normalized), both sides equal 1
    CHECK(green_residual([](cplx z) { return std::norm(z); }, [](cplx) { return 1.0; }, q, b) <
          1e-10);
    // constants
    CHECK(green_residual([](cplx) { return 1.0; }, [](cplx) { return 0.0; }, q, b) == 0.0);
    // harmonic field
    CHECK(green_residual([](cplx z) { return std::pow(z, 3).real(); }, [](cplx) { return 0.0; },
                         q, b) < 1e-10);
}

TEST_CASE("green closure for all monomial fields of total degree <= 6") {
    const auto& q = default_disk();
    const auto& b = default_boundary();
    double worst = 0.0;
    for (int a = 0; a <= 6; ++a) {
        for (int bb = 0; a + bb <= 6; ++bb) {
            auto v = [=](cplx z) { return std::pow(z, a) * std::pow(std::conj(z), bb); };
            auto lap = [=](cplx z) -> cplx {
                if (a < 1 || bb < 1) return 0.0;
                return static_cast<double>(a) * static_cast<double>(bb) * std::pow(z, a - 1) *
                       std::pow(std::conj(z), bb - 1);
            };
            worst = std::max(worst, green_residual(v, lap, q, b));
        }
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("refinement does not degrade the green residual") {
    const auto coarse_d = build_disk_quadrature(64, 256);
    const auto coarse_b = build_boundary_quadrature(2048);
    const auto fine_d = build_disk_quadrature(128, 512);
    const auto fine_b = build_boundary_quadrature(4096);
    // below ~1e-13 both residuals sit at the rounding floor of the sums
    const double floor = 1e-13;
    for (int a = 1; a <= 3; ++a) {
        auto v = [=](cplx z) { return std::pow(std::norm(z), a); };
        auto lap = [=](cplx z) -> cplx {
            return static_cast<double>(a) * static_cast<double>(a) *
                   std::pow(std::norm(z), a - 1);
        };
        const double r1 = green_residual(v, lap, coarse_d, coarse_b);
        const double r2 = green_residual(v, lap, fine_d, fine_b);
        CHECK(std::max(r2, floor) <= 1.5 * std::max(r1, floor));
    }
}

TEST_CASE("identical inputs give bit-identical sums for any worker count") {
    const auto& q = default_disk();
    auto g = [](DiskPoint p) { return std::exp(p.z) / (2.0 + p.z); };
    setenv("HARDYLAB_THREADS", "1", 1);
    const cplx serial = disk_integral(g, q);
    setenv("HARDYLAB_THREADS", "7", 1);
    const cplx parallel7 = disk_integral(g, q);
    setenv("HARDYLAB_THREADS", "16", 1);
    const cplx parallel16 = disk_integral(g, q);
    unsetenv("HARDYLAB_THREADS");
    CHECK(serial.real() == parallel7.real());
    CHECK(serial.imag() == parallel7.imag());
    CHECK(serial.real() == parallel16.real());
    CHECK(serial.imag() == parallel16.imag());
}

TEST_CASE("wirtinger finite differences") {
    auto [d1, db1] = wirtinger_fd([](cplx z) { return z; }, cplx(0.2, 0.1), 1e-5);
    CHECK(std::abs(d1 - 1.0) < 1e-9);
    CHECK(std::abs(db1) < 1e-9);

    auto [d2, db2] = wirtinger_fd([](cplx z) { return std::conj(z); }, cplx(0.2, 0.1), 1e-5);
    CHECK(std::abs(d2) < 1e-9);
    CHECK(std::abs(db2 - 1.0) < 1e-9);

    // d |z|^2 = conj(z), dbar |z|^2 = z
    auto [d3, db3] = wirtinger_fd([](cplx z) { return cplx(std::norm(z), 0.0); }, cplx(0.3, 0.0), 1e-5);
    CHECK(std::abs(d3 - 0.3) < 1e-9);
    CHECK(std::abs(db3 - 0.3) < 1e-9);

    CHECK_THROWS_AS(wirtinger_fd([](cplx z) { return z; }, cplx(0.95, 0.0), 0.1),
                    std::invalid_argument);
}
