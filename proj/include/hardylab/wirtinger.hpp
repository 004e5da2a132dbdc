#pragma once

#include <cmath>
#include <utility>

#include "hardylab/common.hpp"

namespace hardylab {

// Finite-difference oracles for the Wirtinger derivatives
//   d = (1/2)(d/dx - i d/dy),   dbar = (1/2)(d/dx + i d/dy)
// and the normalized Laplacian Delta = d dbar.  Test-side machinery only:
// production code always uses the analytic formulas.

/// Central 4-point stencil, O(h^2).  Works for any T with +,-,* by scalar
/// (complex value, Eigen vector, Eigen matrix).  Results are materialized
/// into the callable's value type so Eigen expressions never outlive their
/// operands.
template <class F>
auto wirtinger_fd(F&& g, cplx z, double h) {
    if (!(std::abs(z) + 2.0 * h < 1.0))
        throw std::invalid_argument("wirtinger_fd: step too large for position (need |z| + 2h < 1)");
    using R = std::decay_t<decltype(g(z))>;
    const cplx ih(0.0, h);
    const R gx_p = g(z + h), gx_m = g(z - h), gy_p = g(z + ih), gy_m = g(z - ih);
    const R dx = (gx_p - gx_m) * (1.0 / (2.0 * h));
    const R dy = (gy_p - gy_m) * (1.0 / (2.0 * h));
    R d = (dx - cplx(0.0, 1.0) * dy) * 0.5;
    R dbar = (dx + cplx(0.0, 1.0) * dy) * 0.5;
    return std::make_pair(std::move(d), std::move(dbar));
}

/// Normalized 5-point Laplacian: (classical 5-point) / 4.
template <class F>
auto laplacian_fd(F&& g, cplx z, double h) {
    if (!(std::abs(z) + 2.0 * h < 1.0))
        throw std::invalid_argument("laplacian_fd: step too large for position (need |z| + 2h < 1)");
    using R = std::decay_t<decltype(g(z))>;
    const cplx ih(0.0, h);
    const R gx_p = g(z + h), gx_m = g(z - h), gy_p = g(z + ih), gy_m = g(z - ih), g0 = g(z);
    R out = (gx_p + gx_m + gy_p + gy_m - 4.0 * g0) * (1.0 / (4.0 * h * h));
    return out;
}

} // namespace hardylab
