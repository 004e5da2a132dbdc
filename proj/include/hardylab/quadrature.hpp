#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "hardylab/common.hpp"

namespace hardylab {

// Convention used throughout the library: the Laplacian is the normalized
// one, Delta = d dbar = (1/4) of the classical Laplacian.  Green's formula
// on the disk then reads
//
//     int_T V dm - V(0) = (2/pi) int_D (Delta V) log(1/|z|) dA(z),
//
// and every curvature / embedding formula below assumes this scaling.

/// Gauss-Legendre nodes and weights on (-1, 1), Newton iteration on the
/// three-term recurrence.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    std::vector<double> x(n), w(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Chebyshev-like initial guess, then Newton.
        double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double p1 = 0.0, dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            p1 = 1.0;
            double p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * t * p2 - j * p3) / (j + 1.0);
            }
            dp = n * (t * p1 - p2) / (t * t - 1.0);
            const double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        x[i] = -t;
        x[n - 1 - i] = t;
        w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    return {std::move(x), std::move(w)};
}

/// Tensor rule for (2/pi) int_D g(z) log(1/|z|) dA(z).  Radial direction:
/// Gauss-Legendre through the map r = t^2 (the substitution tames the
/// endpoint log singularity; plain nodes lose ~7 digits at N_r = 64).
/// Angular direction: uniform midpoints.  The rule integrates the constant
/// field to 1 at machine accuracy.
struct DiskQuadrature {
    std::vector<DiskPoint> nodes;
    std::vector<double> weights;  // measure factor (2/pi) log(1/r) dA folded in
    int n_radial = 0;
    int n_angular = 0;
    double r_min = 0.0;
    double r_max = 0.0;

    std::size_t size() const { return nodes.size(); }
};

inline DiskQuadrature build_disk_quadrature(int n_radial, int n_angular) {
    if (n_radial < 4) throw std::invalid_argument("build_disk_quadrature: N_r must be >= 4");
    if (n_angular < 8) throw std::invalid_argument("build_disk_quadrature: N_theta must be >= 8");

    auto [x, wgl] = gauss_legendre(n_radial);
    DiskQuadrature q;
    q.n_radial = n_radial;
    q.n_angular = n_angular;
    q.nodes.reserve(static_cast<std::size_t>(n_radial) * n_angular);
    q.weights.reserve(q.nodes.capacity());

    std::vector<double> radius(n_radial), wrad(n_radial);
    for (int i = 0; i < n_radial; ++i) {
        const double t = 0.5 * (x[i] + 1.0);
        radius[i] = t * t;
        wrad[i] = 0.5 * wgl[i] * 2.0 * t;  // affine map to (0,1), then jacobian of r = t^2
    }
    q.r_min = radius.front();
    q.r_max = radius.back();

    const double dtheta = 2.0 * kPi / n_angular;
    for (int i = 0; i < n_radial; ++i) {
        const double r = radius[i];
        const double wr = (2.0 / kPi) * std::log(1.0 / r) * r * wrad[i] * dtheta;
        for (int j = 0; j < n_angular; ++j) {
            const double theta = dtheta * (j + 0.5);
            q.nodes.push_back(DiskPoint(cplx(r * std::cos(theta), r * std::sin(theta))));
            q.weights.push_back(wr);
        }
    }
    return q;
}

/// N_b uniformly spaced points of the circle with the normalized Lebesgue
/// measure (weights 1/N_b; trapezoid rule, spectrally accurate for smooth
/// periodic integrands).
struct BoundaryQuadrature {
    std::vector<cplx> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }
};

inline BoundaryQuadrature build_boundary_quadrature(int n_boundary) {
    if (n_boundary < 8) throw std::invalid_argument("build_boundary_quadrature: N_b must be >= 8");
    BoundaryQuadrature q;
    q.nodes.reserve(n_boundary);
    q.weights.assign(n_boundary, 1.0 / n_boundary);
    for (int j = 0; j < n_boundary; ++j) {
        const double theta = 2.0 * kPi * j / n_boundary;
        q.nodes.emplace_back(std::cos(theta), std::sin(theta));
    }
    return q;
}

/// Sum of weights * g(node) over the disk rule.  Node evaluation may run on
/// several workers; the reduction is a fixed pairwise tree, so the result
/// does not depend on the worker count.
template <class F>
cplx disk_integral(F&& g, const DiskQuadrature& q) {
    std::vector<cplx> vals(q.size());
    parallel_for_index(q.size(), [&](std::size_t i) {
        vals[i] = q.weights[i] * static_cast<cplx>(g(q.nodes[i]));
    });
    for (std::size_t i = 0; i < vals.size(); ++i)
        if (!std::isfinite(vals[i].real()) || !std::isfinite(vals[i].imag()))
            throw numeric_error("disk_integral: non-finite integrand at node z = " +
                                format_point(q.nodes[i].z));
    return pairwise_sum(vals);
}

template <class F>
cplx boundary_integral(F&& g, const BoundaryQuadrature& q) {
    std::vector<cplx> vals(q.size());
    parallel_for_index(q.size(), [&](std::size_t i) {
        vals[i] = q.weights[i] * static_cast<cplx>(g(q.nodes[i]));
    });
    for (std::size_t i = 0; i < vals.size(); ++i)
        if (!std::isfinite(vals[i].real()) || !std::isfinite(vals[i].imag()))
            throw numeric_error("boundary_integral: non-finite integrand at node z = " +
                                format_point(q.nodes[i]));
    return pairwise_sum(vals);
}

/// Master quadrature self-test: |int_T V dm - V(0) - (2/pi) int_D Delta(V) log(1/|z|) dA|
/// for a field V with its (normalized) Laplacian supplied analytically.
template <class FV, class FLap>
double green_residual(FV&& v, FLap&& lap_v, const DiskQuadrature& dq, const BoundaryQuadrature& bq) {
    const cplx boundary = boundary_integral([&](cplx z) { return v(z); }, bq);
    const cplx center = v(cplx(0.0, 0.0));
    const cplx interior = disk_integral([&](DiskPoint p) { return lap_v(p.z); }, dq);
    return std::abs(boundary - center - interior);
}

} // namespace hardylab
