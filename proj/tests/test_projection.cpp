#include <catch2/catch_amalgamated.hpp>

#include "hardylab/projection.hpp"

using namespace hardylab;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

PolyVecField one_z_field() {  // f = (1, z)^T / sqrt(2)
    return PolyVecField({Poly({kInvSqrt2}), Poly({0.0, kInvSqrt2})});
}

/// Random field with no zeros on the closed disk: dominant constant in the
/// first component keeps ||f|| away from 0.
PolyVecField random_nonvanishing_field(Rng& rng, int n, int deg) {
    std::vector<Poly> comps;
    for (int k = 0; k < n; ++k) {
        std::vector<cplx> c(deg + 1);
        for (int j = 0; j <= deg; ++j) c[j] = 0.25 * rng.cnormal() / (deg + 1.0);
        if (k == 0) c[0] += 2.0;
        comps.emplace_back(std::move(c));
    }
    return PolyVecField(std::move(comps));
}

cplx random_interior_point(Rng& rng, double rmax = 0.9) {
    const double r = rmax * std::sqrt(rng.uniform());
    const double th = 2.0 * kPi * rng.uniform();
    return {r * std::cos(th), r * std::sin(th)};
}

}  // namespace

TEST_CASE("projection at the origin for f = (1, z)/sqrt(2)") {
    const auto f = one_z_field();
    const auto s = projection(f, 0.0);
    CHECK(std::abs(s.Pi(0, 0) - 1.0) < 1e-14);
    CHECK(std::abs(s.Pi(0, 1)) < 1e-14);
    CHECK(std::abs(s.Pi(1, 0)) < 1e-14);
    CHECK(std::abs(s.Pi(1, 1)) < 1e-14);
    // dPi = (I - Pi) f' f* / ||f||^2 = [[0,0],[1,0]]
    CHECK(std::abs(s.dPi(1, 0) - 1.0) < 1e-14);
    CHECK(std::abs(s.dPi(0, 0)) + std::abs(s.dPi(0, 1)) + std::abs(s.dPi(1, 1)) < 1e-14);
}

TEST_CASE("projection reproduces f and is gauge invariant") {
    Rng rng(42);
    for (int trial = 0; trial < 50; ++trial) {
        const auto f = random_nonvanishing_field(rng, 2 + static_cast<int>(rng.bits() % 3), 3);
        const cplx z = random_interior_point(rng);
        const auto s = projection(f, z);
        const Eigen::VectorXcd fv = f(z);
        CHECK((s.Pi * fv - fv).norm() < 1e-12 * fv.norm());

        // scaling f by a nonzero constant changes nothing
        const cplx c(1.7, -0.4);
        std::vector<Poly> scaled;
        for (int k = 0; k < f.dim(); ++k) scaled.push_back(f.component(k) * c);
        const PolyVecField cf(std::move(scaled));
        const auto s2 = projection(cf, z);
        CHECK(spectral_norm(s.Pi - s2.Pi) < 1e-12);
        CHECK(std::abs(curvature(f, z) - curvature(cf, z)) < 1e-12);
    }
}

TEST_CASE("vanishing fiber raises") {
    const PolyVecField f({Poly({0.0, 1.0}), Poly({0.0, 1.0})});  // (z, z)
    CHECK_THROWS_AS(projection(f, 0.0), numeric_error);
    CHECK_THROWS_AS(curvature(f, 0.0), numeric_error);
}

TEST_CASE("curvature closed form for f = (1, z)/sqrt(2)") {
    const auto f = one_z_field();
    CHECK(std::abs(curvature(f, 0.0) - 1.0) < 1e-10);
    CHECK(std::abs(curvature(f, 0.5) - 0.64) < 1e-10);  // 1/(1.25)^2
    Rng rng(7);
    for (int i = 0; i < 1000; ++i) {
        const cplx z = random_interior_point(rng);
        const double expected = 1.0 / std::pow(1.0 + std::norm(z), 2);
        CHECK(std::abs(curvature(f, z) - expected) < 1e-10);
    }
}

TEST_CASE("constant field has zero curvature and residual") {
    const PolyVecField f({Poly({1.0}), Poly({cplx(0.0, 2.0)})});
    CHECK(curvature(f, cplx(0.3, 0.1)) == 0.0);
    CHECK(curvature_vs_laplacian(f, cplx(0.3, 0.1), 1e-4) < 1e-12);
}

TEST_CASE("curvature matches the finite-difference laplacian of log||f||^2") {
    const auto f = one_z_field();
    CHECK(curvature_vs_laplacian(f, 0.4, 1e-4) < 1e-6);

    Rng rng(99);
    for (int trial = 0; trial < 40; ++trial) {
        const auto g = random_nonvanishing_field(rng, 3, 3);
        const cplx z = random_interior_point(rng, 0.8);
        CHECK(curvature_vs_laplacian(g, z, 1e-4) < 1e-5);
    }
}

TEST_CASE("algebraic projection identities hold to near machine accuracy") {
    Rng rng(2024);
    double worst = 0.0;
    for (int trial = 0; trial < 400; ++trial) {
        const auto f = random_nonvanishing_field(rng, 2 + static_cast<int>(rng.bits() % 3), 4);
        const auto s = projection(f, random_interior_point(rng));
        for (const auto& [name, value] : projection_identity_residuals(s)) worst = std::max(worst, value);
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("laplacian commutator identity via finite differences") {
    const auto f = one_z_field();
    const cplx z0(0.3, 0.2);
    auto pi_of = [&](cplx z) { return projection(f, z).Pi; };

    const Eigen::MatrixXcd lap = laplacian_fd(pi_of, z0, 1e-4);
    const auto res = projection_identity_residuals(projection(f, z0), lap);
    CHECK(res.at("laplacian_commutator") < 1e-6);

    // measured convergence order >= 1.8 when h is halved; measured where
    // truncation dominates (below h ~ 2e-4 the stencil sits on the eps/h^2
    // rounding floor)
    auto resid_at = [&](double h) {
        const Eigen::MatrixXcd l = laplacian_fd(pi_of, z0, h);
        return projection_identity_residuals(projection(f, z0), l)
            .at("laplacian_commutator");
    };
    const double order = std::log2(resid_at(1e-3) / resid_at(5e-4));
    CHECK(order >= 1.8);
}

TEST_CASE("rank-one dPi: frobenius norm equals spectral norm") {
    Rng rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const auto f = random_nonvanishing_field(rng, 2 + static_cast<int>(rng.bits() % 3), 4);
        const auto s = projection(f, random_interior_point(rng));
        CHECK(std::abs(s.dPi.norm() - spectral_norm(s.dPi)) < 1e-12);
    }
}

TEST_CASE("curvature is the squared norm of dPi") {
    Rng rng(6);
    for (int trial = 0; trial < 100; ++trial) {
        const auto f = random_nonvanishing_field(rng, 3, 4);
        const cplx z = random_interior_point(rng);
        const auto s = projection(f, z);
        const double op = spectral_norm(s.dPi);
        CHECK(std::abs(curvature(f, z) - op * op) < 1e-11);
    }
}
