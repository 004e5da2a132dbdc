#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "hardylab/common.hpp"

namespace hardylab {

/// A bounded non-increasing weight psi : R+ -> R+ with finite integral.
/// Supplied as an evaluator plus validation, not as symbolic input.
struct PsiFunction {
    enum class Kind { Exponential, PowerTail, Step, IteratedLog, Tabulated };

    std::function<double(double)> eval;
    double psi0 = 1.0;               // declared bound = psi(0)
    Kind kind = Kind::Tabulated;
    std::vector<double> breakpoints; // jump locations folded into the atom grid
    std::string name = "table";

    double operator()(double x) const { return eval(x); }
};

inline PsiFunction psi_exponential() {
    return {[](double x) { return std::exp(-x); }, 1.0, PsiFunction::Kind::Exponential, {}, "exp"};
}

/// min(1, x^-2)
inline PsiFunction psi_power_tail() {
    return {[](double x) { return x <= 1.0 ? 1.0 : 1.0 / (x * x); },
            1.0, PsiFunction::Kind::PowerTail, {}, "power"};
}

/// Indicator of [0, cutoff].
inline PsiFunction psi_step(double cutoff) {
    if (cutoff <= 0.0) throw std::invalid_argument("psi_step: cutoff must be > 0");
    return {[cutoff](double x) { return x <= cutoff ? 1.0 : 0.0; },
            1.0, PsiFunction::Kind::Step, {cutoff}, "step"};
}

/// 1 / (x ln(x) ln_2(x) ... ln_{m-1}(x) (ln_m x)^{1+alpha}) for large x,
/// capped at 1 where the iterated logs are small or undefined.  The
/// denominator is a product of positive increasing factors on its domain,
/// so the capped function is non-increasing.
inline PsiFunction psi_iterated_log(int levels = 1, double alpha = 1.0) {
    if (levels < 1) throw std::invalid_argument("psi_iterated_log: levels must be >= 1");
    if (alpha <= 0.0) throw std::invalid_argument("psi_iterated_log: alpha must be > 0");
    auto f = [levels, alpha](double x) {
        double denom = x;
        double l = x;
        for (int k = 1; k <= levels; ++k) {
            l = std::log(l);
            if (!(l > 0.0)) return 1.0;
            denom *= (k == levels) ? std::pow(l, 1.0 + alpha) : l;
        }
        return std::min(1.0, 1.0 / denom);
    };
    return {f, 1.0, PsiFunction::Kind::IteratedLog, {},
            "itlog" + std::to_string(levels)};
}

/// Piecewise-linear from samples (xs increasing, ys non-increasing); 0 past
/// the last sample.
inline PsiFunction psi_table(std::vector<double> xs, std::vector<double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw std::invalid_argument("psi_table: need >= 2 matching samples");
    for (std::size_t i = 1; i < xs.size(); ++i) {
        if (!(xs[i] > xs[i - 1])) throw std::invalid_argument("psi_table: x must increase");
        if (ys[i] > ys[i - 1] + 1e-12) throw std::invalid_argument("psi_table: y must not increase");
    }
    const double y0 = ys.front();
    auto f = [xs = std::move(xs), ys = std::move(ys)](double x) {
        if (x <= xs.front()) return ys.front();
        if (x >= xs.back()) return ys.back();
        const auto it = std::upper_bound(xs.begin(), xs.end(), x);
        const std::size_t i = static_cast<std::size_t>(it - xs.begin());
        const double t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
        return ys[i - 1] + t * (ys[i] - ys[i - 1]);
    };
    return {f, y0, PsiFunction::Kind::Tabulated, {}, "table"};
}

/// Monotonicity + integrability validation on a sampled grid.  Throws on a
/// detected increase; returns the crude tail estimate psi(x_max).
inline double validate_psi(const PsiFunction& psi, double x_max = 1e4, int samples = 4096) {
    double prev = psi(0.0);
    if (prev > psi.psi0 + 1e-12)
        throw std::invalid_argument("psi: value at 0 exceeds the declared bound");
    for (int i = 1; i <= samples; ++i) {
        const double x = x_max * static_cast<double>(i) / samples;
        const double v = psi(x);
        if (v > prev + 1e-12)
            throw std::invalid_argument("psi: not non-increasing near x = " + std::to_string(x));
        prev = v;
    }
    return prev;
}

/// The correcting factor M : (-infty, 0] -> [0, 1], an exponential sum
///
///   M(x) = N(x) / C,   N(x) = e psi(0) e^x + e sum_i w_i e^{x / r_i},
///   C    = N(0) = e psi(0) + e sum_i w_i,
///
/// built by discretizing d(-psi) on [1, R_max] by telescoping differences.
/// M, M', M'' are evaluable in closed form; each e^{x/r} satisfies the
/// 2x2 positivity condition, so their convex combination does too.
struct CorrectingFactor {
    std::vector<double> atom_r;  // r_i >= 1
    std::vector<double> atom_w;  // w_i > 0
    double head = 0.0;           // e * psi(0)
    double normalizer = 1.0;     // C = N(0)
    double r_max = 1.0;

    /// M (order 0), M' (order 1) or M'' (order 2) at x <= 0.  e^{x/r} is
    /// clamped to 0 when x/r < -700.
    double eval(double x, int order = 0) const {
        if (x > 0.0) throw std::invalid_argument("CorrectingFactor: x must be <= 0");
        if (order < 0 || order > 2) throw std::invalid_argument("CorrectingFactor: order in {0,1,2}");
        std::vector<double> terms(atom_r.size() + 1);
        terms[0] = head * exp_clamped(x);
        for (std::size_t i = 0; i < atom_r.size(); ++i) {
            const double r = atom_r[i];
            double t = std::numbers::e_v<double> * atom_w[i] * exp_clamped(x / r);
            for (int o = 0; o < order; ++o) t /= r;
            terms[i + 1] = t;
        }
        return pairwise_sum(terms) / normalizer;
    }

    double operator()(double x) const { return eval(x, 0); }

    /// Total atom mass, head excluded: equals psi(1) exactly (telescoping).
    double atom_mass() const { return pairwise_sum(atom_w); }

private:
    static double exp_clamped(double e) { return e < -700.0 ? 0.0 : std::exp(e); }
};

/// Discretize d(-psi) on a geometric grid 1 = r_0 < ... < r_K = R_max with
/// w_i = psi(r_{i-1}) - psi(r_i) placed at the left endpoint (this lands
/// jump atoms of step-like psi exactly on their declared breakpoints),
/// plus a terminal atom (R_max, psi(R_max)) that preserves the total mass.
///
/// `nodes` <= 0 picks the grid from the default ratio 1.05.  If
/// psi(R_max) >= tail_tol the grid is extended geometrically (error when
/// extension is disallowed or exhausted).
inline CorrectingFactor build_correcting_factor(const PsiFunction& psi, double r_max,
                                                int nodes = 0, double tail_tol = 1e-8,
                                                bool allow_extension = true) {
    if (r_max <= 1.0) throw std::invalid_argument("build_correcting_factor: R_max must be > 1");
    validate_psi(psi, r_max);

    if (psi(r_max) >= tail_tol) {
        if (!allow_extension)
            throw std::invalid_argument("build_correcting_factor: tail mass psi(R_max) = " +
                                        std::to_string(psi(r_max)) + " above tail_tol with extension disallowed");
        double r = r_max;
        while (psi(r) >= tail_tol) {
            r *= 4.0;
            if (r > 1e12)
                throw std::invalid_argument("build_correcting_factor: psi tail does not reach tail_tol by R = 1e12");
        }
        r_max = r;
        nodes = 0;  // re-derive the grid for the extended range
    }

    const double ratio = nodes > 0 ? std::pow(r_max, 1.0 / nodes) : 1.05;
    std::vector<double> grid;
    grid.push_back(1.0);
    while (grid.back() < r_max) grid.push_back(std::min(grid.back() * ratio, r_max));
    for (double b : psi.breakpoints)
        if (b > 1.0 && b < r_max) grid.push_back(b);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    CorrectingFactor m;
    m.r_max = r_max;
    m.head = std::numbers::e_v<double> * psi.psi0;
    double prev = psi(grid.front());
    if (prev > psi.psi0 + 1e-12)
        throw std::invalid_argument("build_correcting_factor: psi(1) exceeds psi(0)");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double cur = psi(grid[i]);
        const double w = prev - cur;
        if (w < -1e-12)
            throw std::invalid_argument("build_correcting_factor: psi increases near r = " +
                                        std::to_string(grid[i]));
        if (w > 0.0) {
            m.atom_r.push_back(grid[i - 1]);
            m.atom_w.push_back(w);
        }
        prev = cur;
    }
    const double tail = psi(r_max);
    if (tail > 0.0) {
        m.atom_r.push_back(r_max);
        m.atom_w.push_back(tail);
    }
    // C = N(0), summed with the same tree eval() uses so that M(0) == 1 exactly.
    std::vector<double> terms(m.atom_r.size() + 1);
    terms[0] = m.head;
    for (std::size_t i = 0; i < m.atom_r.size(); ++i)
        terms[i + 1] = std::numbers::e_v<double> * m.atom_w[i];
    m.normalizer = pairwise_sum(terms);
    return m;
}

/// min over the grid of M M'' - (M')^2 and of M''.  Both must stay above
/// -1e-12 for the positivity condition to hold.
struct PositivityReport {
    double min_determinant = 0.0;
    double min_second_derivative = 0.0;
    bool pass(double tol = 1e-12) const {
        return min_determinant >= -tol && min_second_derivative >= -tol;
    }
};

inline PositivityReport check_positivity_condition(const CorrectingFactor& m,
                                                   const std::vector<double>& grid) {
    if (grid.empty()) throw std::invalid_argument("check_positivity_condition: empty grid");
    PositivityReport rep;
    rep.min_determinant = std::numeric_limits<double>::infinity();
    rep.min_second_derivative = std::numeric_limits<double>::infinity();
    for (double x : grid) {
        const double m0 = m.eval(x, 0), m1 = m.eval(x, 1), m2 = m.eval(x, 2);
        rep.min_determinant = std::min(rep.min_determinant, m0 * m2 - m1 * m1);
        rep.min_second_derivative = std::min(rep.min_second_derivative, m2);
    }
    return rep;
}

/// C_meas = max over the grid of psi(x) / M'(-x).  Grid points where
/// M'(-x) underflows (< 1e-300) are skipped and counted; all-skipped is an
/// error.  The domination constant is measured, not assumed.
struct DominationReport {
    double constant = 0.0;
    long skipped = 0;
};

inline DominationReport measure_domination_constant(const PsiFunction& psi,
                                                    const CorrectingFactor& m,
                                                    double x_max = 100.0, int nodes = 10000) {
    if (nodes < 2) throw std::invalid_argument("measure_domination_constant: nodes must be >= 2");
    DominationReport rep;
    bool any = false;
    for (int i = 0; i < nodes; ++i) {
        const double x = x_max * static_cast<double>(i) / (nodes - 1);
        const double mp = m.eval(-x, 1);
        if (mp < 1e-300) {
            ++rep.skipped;
            continue;
        }
        any = true;
        rep.constant = std::max(rep.constant, psi(x) / mp);
    }
    if (!any) throw numeric_error("measure_domination_constant: all grid nodes skipped (M' underflow)");
    return rep;
}

/// phi(s) = s^2 psi(ln s^-2) on [0, 1]; the size-condition majorant.
inline double phi(const PsiFunction& psi, double s) {
    if (s < 0.0 || s > 1.0) throw std::invalid_argument("phi: s must lie in [0, 1]");
    if (s == 0.0) return 0.0;
    if (s == 1.0) return psi(0.0);
    return s * s * psi(-2.0 * std::log(s));
}

/// phi with its underlying psi; phi(s)/s^2 is non-decreasing because psi
/// is non-increasing.
struct PhiMajorant {
    PsiFunction psi;
    double operator()(double s) const { return phi(psi, s); }
};

} // namespace hardylab
