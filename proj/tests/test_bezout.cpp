#include <catch2/catch_amalgamated.hpp>

#include "hardylab/bezout.hpp"

using namespace hardylab;

namespace {

const double kSqrt2 = std::sqrt(2.0);
const double kInvSqrt2 = 1.0 / kSqrt2;

PolyVecField z_one() { return PolyVecField({Poly({0.0, kInvSqrt2}), Poly({kInvSqrt2})}); }

const DiskQuadrature& dq() {
    static auto q = build_disk_quadrature(64, 256);
    return q;
}
const BoundaryQuadrature& bq() {
    static auto q = build_boundary_quadrature(2048);
    return q;
}

std::vector<Poly> random_row(Rng& rng, int n, int deg) {
    std::vector<Poly> g;
    for (int k = 0; k < n; ++k) {
        std::vector<cplx> c(deg + 1);
        for (auto& x : c) x = rng.cnormal();
        g.emplace_back(std::move(c));
    }
    return g;
}

double row_sup(const std::vector<Poly>& g) {
    double sup = 0.0;
    for (const cplx& z : bq().nodes) {
        double n2 = 0.0;
        for (const Poly& gk : g) n2 += std::norm(gk(z));
        sup = std::max(sup, std::sqrt(n2));
    }
    return sup;
}

}  // namespace

TEST_CASE("trivial instance f = (1,0), tau = 1") {
    const BezoutProblem prob{PolyVecField({Poly({1.0}), Poly({0.0})}), Poly({1.0}), 2};
    const auto cert = solve_exact(prob, bq());
    CHECK(cert.coeff_residual < 1e-14);
    CHECK(cert.boundary_residual < 1e-13);
    CHECK(std::abs(cert.g[0](cplx(0.3, 0.1)) - 1.0) < 1e-12);
    CHECK(std::abs(cert.g[1](cplx(0.3, 0.1))) < 1e-12);
}

TEST_CASE("demo instance f = (z,1)/sqrt2, tau = z^2") {
    const BezoutProblem prob{z_one(), Poly({0.0, 0.0, 1.0}), 3};
    auto cert = solve_exact(prob, bq());
    CHECK(cert.coeff_residual <= 1e-12);
    CHECK(cert.boundary_residual <= 1e-10);
    // the hand solution (sqrt2 z, 0) is feasible, so the minimum cannot
    // exceed its sup
    cert = minimize_sup(prob, cert, bq());
    CHECK(cert.g_sup <= kSqrt2 + 1e-9);
    CHECK(cert.coeff_residual <= 1e-12);
    CHECK(cert.boundary_residual <= 1e-10);
    CHECK(cert.sup_minimized);

    const auto rep = verify_product_identities(prob.f, prob.tau, cert.g, bq().nodes);
    CHECK(rep.idempotency_residual <= 1e-10);
    CHECK(rep.range_residual <= 1e-10);
}

TEST_CASE("minimize_sup never increases the sup and preserves residuals") {
    Rng rng(40);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 2 + static_cast<int>(rng.bits() % 2);
        const int df = 1 + static_cast<int>(rng.bits() % 3);
        std::vector<Poly> comps;
        double scale2 = 0.0;
        for (int k = 0; k < n; ++k) {
            std::vector<cplx> c(df + 1);
            for (auto& x : c) x = rng.cnormal();
            comps.emplace_back(c);
            for (const auto& x : c) scale2 += std::norm(x);
        }
        for (auto& p : comps) p = p * cplx(1.0 / std::sqrt(scale2));
        const PolyVecField f(std::move(comps));

        const auto g0 = random_row(rng, n, 2);
        Poly tau({0.0});
        for (int k = 0; k < n; ++k) tau = tau + g0[k] * f.component(k);

        const BezoutProblem prob{f, tau, -1};  // default degree policy
        const auto base = solve_exact(prob, bq());
        const auto better = minimize_sup(prob, base, bq());
        CHECK(better.g_sup <= base.g_sup + 1e-12);
        CHECK(better.coeff_residual <= 1e-10);
        CHECK(better.boundary_residual <= 1e-9);
    }
}

TEST_CASE("round trip recovers a solution at least as flat as the planted one") {
    Rng rng(41);
    int done = 0;
    while (done < 12) {
        const int n = 2 + static_cast<int>(rng.bits() % 2);
        const int df = 1 + static_cast<int>(rng.bits() % 4);
        std::vector<Poly> comps;
        double scale2 = 0.0;
        for (int k = 0; k < n; ++k) {
            std::vector<cplx> c(df + 1);
            for (auto& x : c) x = rng.cnormal();
            comps.emplace_back(c);
            for (const auto& x : c) scale2 += std::norm(x);
        }
        for (auto& p : comps) p = p * cplx(1.0 / std::sqrt(scale2));
        const PolyVecField f(std::move(comps));

        const int dg0 = static_cast<int>(rng.bits() % 4);
        const auto g0 = random_row(rng, n, dg0);
        Poly tau({0.0});
        for (int k = 0; k < n; ++k) tau = tau + g0[k] * f.component(k);
        ++done;

        const BezoutProblem prob{f, tau, tau.degree()};
        const auto cert = minimize_sup(prob, solve_exact(prob, bq()), bq());
        CHECK(cert.coeff_residual <= 1e-10);
        CHECK(cert.g_sup <= row_sup(g0) + 1e-8);
    }
}

TEST_CASE("certificate soundness: boundary and coefficient residuals agree") {
    // a correct solution has both residuals tiny; corrupting a coefficient
    // breaks both measures at comparable scale
    const BezoutProblem prob{z_one(), Poly({0.0, 0.0, 1.0}), 3};
    const auto cert = solve_exact(prob, bq());
    CHECK(cert.coeff_residual <= 1e-12);
    CHECK(cert.boundary_residual <= 1e-10);

    auto corrupted = cert.g;
    corrupted[0] = corrupted[0] + Poly({1e-3});
    CHECK(detail::boundary_defect(corrupted, prob.f, prob.tau, bq()) > 1e-4);
    const auto rep = verify_product_identities(prob.f, prob.tau, corrupted, bq().nodes);
    CHECK(rep.idempotency_residual > 1e-4);
}

TEST_CASE("common zeros") {
    SECTION("f = (z, z)/sqrt2 against tau = 1: infeasible at every cap") {
        const PolyVecField f({Poly({0.0, kInvSqrt2}), Poly({0.0, kInvSqrt2})});
        const auto zeros = common_disk_zeros(f, Poly({1.0}));
        REQUIRE(zeros.size() == 1);
        CHECK(std::abs(zeros[0].location) < 1e-10);
        CHECK(zeros[0].multiplicity == 1);
        CHECK(zeros[0].tau_order == 0);

        for (int cap : {1, 3, 6, 10}) {
            const BezoutProblem prob{f, Poly({1.0}), cap};
            CHECK_THROWS_AS(solve_exact(prob, bq()), numeric_error);
        }
    }

    SECTION("matching tau order makes the instance solvable") {
        const PolyVecField f({Poly({0.0, kInvSqrt2}), Poly({0.0, kInvSqrt2})});
        const auto zeros = common_disk_zeros(f, Poly({0.0, 1.0}));
        REQUIRE(zeros.size() == 1);
        CHECK(zeros[0].tau_order >= zeros[0].multiplicity);
        const BezoutProblem prob{f, Poly({0.0, 1.0}), 2};
        const auto cert = solve_exact(prob, bq());
        CHECK(cert.coeff_residual <= 1e-12);
    }

    SECTION("common zero outside the closed disk is ignored") {
        const PolyVecField f({Poly({-2.0, 1.0}) * cplx(0.25), Poly({-2.0, 1.0}) * cplx(0.25)});
        CHECK(common_disk_zeros(f, Poly({1.0})).empty());
    }

    SECTION("identically zero field is rejected") {
        const PolyVecField f({Poly({0.0}), Poly({0.0})});
        CHECK_THROWS_AS(common_disk_zeros(f, Poly({1.0})), std::invalid_argument);
    }
}

TEST_CASE("zero-dimensional feasible set returns the input unchanged") {
    // f = (1, 0), cap 0: the system pins both coefficients
    const BezoutProblem prob{PolyVecField({Poly({1.0}), Poly({0.0})}), Poly({0.5}), 0};
    const auto base = solve_exact(prob, bq());
    REQUIRE(base.null_dimension >= 1);  // second row of g is free... depends on rank
    const auto after = minimize_sup(prob, base, bq());
    CHECK(after.g_sup <= base.g_sup + 1e-15);
}

TEST_CASE("corona sweep over the two-component family") {
    // f = (z, d)/sqrt(1+d^2): fiber minimum d/sqrt(1+d^2) at the origin
    std::vector<PolyVecField> family;
    std::vector<double> deltas = {1.0, 0.5, 0.25};
    for (double d : deltas) {
        const double s = 1.0 / std::sqrt(1.0 + d * d);
        family.push_back(PolyVecField({Poly({0.0, s}), Poly({d * s})}));
    }
    const auto rows = corona_sweep(family, Poly({1.0}), 6, dq(), bq());
    REQUIRE(rows.size() == 3);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double expect_delta = deltas[i] / std::sqrt(1.0 + deltas[i] * deltas[i]);
        CHECK(rows[i].delta == Catch::Approx(expect_delta).margin(1e-6));
    }
    // tighter fiber bound means harder instance: sup grows monotonically
    CHECK(rows[0].g_sup <= rows[1].g_sup + 1e-9);
    CHECK(rows[1].g_sup <= rows[2].g_sup + 1e-9);

    CHECK(corona_sweep({}, Poly({1.0}), 4, dq(), bq()).empty());
}

TEST_CASE("tau of degree above the reachable range is infeasible") {
    const BezoutProblem prob{z_one(), Poly::monomial(9), 3};  // deg gf <= 4 < 9
    CHECK_THROWS_AS(solve_exact(prob, bq()), numeric_error);
}

TEST_CASE("bezout size gate wiring") {
    const auto rep =
        bezout_size_gate({z_one(), Poly({0.0, 0.0, 1.0}), 3}, psi_exponential(), dq(),
                         build_boundary_quadrature(4096));
    CHECK(rep.pass());
}
