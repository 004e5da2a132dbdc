#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>

#include "hardylab/common.hpp"
#include "hardylab/polynomial.hpp"
#include "hardylab/wirtinger.hpp"

namespace hardylab {

/// Points with ||f(z)|| below this cutoff are treated as vanishing fibers:
/// excluded from sample sets and quadratures, never divided by.
inline constexpr double kFiberCutoff = 1e-9;

/// The orthogonal projection Pi(z) onto span{f(z)} together with its
/// Wirtinger derivatives, all from exact formulas:
///   Pi    = f f* / ||f||^2
///   dPi   = (I - Pi) f' f* / ||f||^2
///   dbarPi = (dPi)*
struct ProjectionSample {
    cplx z;
    Eigen::MatrixXcd Pi;
    Eigen::MatrixXcd dPi;
    Eigen::MatrixXcd dbarPi;
};

inline double spectral_norm(const Eigen::MatrixXcd& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    return svd.singularValues()[0];
}

inline ProjectionSample projection(const PolyVecField& f, cplx z, double eps_f = kFiberCutoff) {
    const Eigen::VectorXcd fv = f(z);
    const double n2 = fv.squaredNorm();
    if (std::sqrt(n2) < eps_f)
        throw numeric_error("vanishing fiber: ||f(z)|| < " + std::to_string(eps_f) +
                            " at z = " + format_point(z));
    ProjectionSample s;
    s.z = z;
    s.Pi = fv * fv.adjoint() / n2;
    const Eigen::VectorXcd fd = f.derivative()(z);
    const Eigen::VectorXcd perp = fd - s.Pi * fd;  // (I - Pi) f'
    s.dPi = perp * fv.adjoint() / n2;
    s.dbarPi = s.dPi.adjoint();
    return s;
}

/// ||dPi||^2 = (||f||^2 ||f'||^2 - |<f',f>|^2) / ||f||^4, the curvature of
/// the line bundle span{f(z)} (equal to Delta log||f||^2).  Clamped at 0;
/// Cauchy-Schwarz keeps the raw value above -1e-14.
inline double curvature(const PolyVecField& f, cplx z, double eps_f = kFiberCutoff) {
    const Eigen::VectorXcd fv = f(z);
    const double a = fv.squaredNorm();
    if (std::sqrt(a) < eps_f)
        throw numeric_error("vanishing fiber: ||f(z)|| < " + std::to_string(eps_f) +
                            " at z = " + format_point(z));
    const Eigen::VectorXcd fd = f.derivative()(z);
    const double b = fd.squaredNorm();
    const double c = std::norm(fv.dot(fd));  // |<f',f>|^2  (Eigen dot conjugates lhs)
    const double val = (a * b - c) / (a * a);
    return val < 0.0 ? 0.0 : val;
}

/// Residuals of the projection-derivative identities, operator norm each:
///   Pi dPi = 0, (dPi)(I-Pi) = 0, dPi = (dPi)Pi = (I-Pi)dPi,
///   conjugates for dbarPi, hermiticity/idempotency of Pi,
/// and, when a finite-difference Laplacian is supplied,
///   DeltaPi = (dPi)(dPi)* - (dPi)*(dPi).
inline std::map<std::string, double> projection_identity_residuals(
    const ProjectionSample& s, const std::optional<Eigen::MatrixXcd>& laplacian_fd_pi = std::nullopt) {
    const auto n = s.Pi.rows();
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(n, n);
    std::map<std::string, double> r;
    r["pi_hermitian"] = spectral_norm(s.Pi - s.Pi.adjoint());
    r["pi_idempotent"] = spectral_norm(s.Pi * s.Pi - s.Pi);
    r["pi_dpi"] = spectral_norm(s.Pi * s.dPi);
    r["dpi_perp"] = spectral_norm(s.dPi * (I - s.Pi));
    r["dpi_right_pi"] = spectral_norm(s.dPi - s.dPi * s.Pi);
    r["dpi_left_perp"] = spectral_norm(s.dPi - (I - s.Pi) * s.dPi);
    r["dbarpi_adjoint"] = spectral_norm(s.dbarPi - s.dPi.adjoint());
    r["dbarpi_pi"] = spectral_norm(s.dbarPi * s.Pi);
    r["dbarpi_left_pi"] = spectral_norm(s.dbarPi - s.Pi * s.dbarPi);
    r["dbarpi_right_perp"] = spectral_norm(s.dbarPi - s.dbarPi * (I - s.Pi));
    if (laplacian_fd_pi) {
        const Eigen::MatrixXcd commut =
            s.dPi * s.dPi.adjoint() - s.dPi.adjoint() * s.dPi;
        r["laplacian_commutator"] = spectral_norm(*laplacian_fd_pi - commut);
    }
    return r;
}

/// |curvature(f,z) - Delta_fd log||f(z)||^2| with the normalized 5-point
/// Laplacian; finite-difference oracle for the curvature identity.
inline double curvature_vs_laplacian(const PolyVecField& f, cplx z, double h,
                                     double eps_f = kFiberCutoff) {
    const double analytic = curvature(f, z, eps_f);
    const cplx ih(0.0, h);
    for (cplx p : {z + h, z - h, z + ih, z - ih, z})
        if (f.norm_at(p) < eps_f)
            throw numeric_error("vanishing fiber in finite-difference stencil at z = " +
                                format_point(p));
    const cplx fd = laplacian_fd([&](cplx w) { return cplx(f.log_norm2(w), 0.0); }, z, h);
    return std::abs(analytic - fd.real());
}

} // namespace hardylab
