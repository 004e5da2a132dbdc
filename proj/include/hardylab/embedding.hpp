#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>

#include "hardylab/correcting.hpp"
#include "hardylab/sections.hpp"

namespace hardylab {

/// Nodes where |tau| falls below this are excluded from the weighted
/// energy integrals (their contribution vanishes with the cutoff).
inline constexpr double kTauCutoff = 1e-12;

/// Boundary weights may push u = log||f||^2 a hair above 0 for
/// sup-normalized data; anything above this is a real violation.
inline constexpr double kWeightClampTol = 1e-8;

/// Both sides (or all three, for chained inequalities) of one embedding
/// inequality, evaluated by quadrature.
struct EmbeddingReport {
    std::string id;
    double lhs = 0.0;
    double mid = 0.0;
    double rhs = 0.0;
    bool has_mid = false;
    long excluded = 0;
    int n_radial = 0, n_angular = 0, n_boundary = 0;
    std::map<std::string, double> aux;

    double margin() const { return rhs - lhs; }
};

namespace detail {

inline double clamp_weight_exponent(double u, const cplx& where) {
    if (u > kWeightClampTol)
        throw numeric_error("embedding: u = log||f||^2 = " + std::to_string(u) +
                            " > 0 at z = " + format_point(where) + " (field not sup-normalized)");
    if (u > 0.0) u = 0.0;
    return u < -700.0 ? -700.0 : u;
}

inline void stamp(EmbeddingReport& r, const DiskQuadrature& dq, const BoundaryQuadrature& bq) {
    r.n_radial = dq.n_radial;
    r.n_angular = dq.n_angular;
    r.n_boundary = static_cast<int>(bq.size());
}

} // namespace detail

/// Chain for a scalar subharmonic weight u <= 0 and analytic field h:
///   lhs = (2/pi) int_D M'(u) (Delta u) ||h||^2 log(1/|z|) dA
///   mid = int_T ||h||^2 M(u) dm
///   rhs = int_T ||h||^2 dm
/// and lhs <= mid <= rhs whenever M satisfies the positivity condition.
template <class FU, class FLap>
EmbeddingReport scalar_weight_embedding_check(FU&& u_fn, FLap&& lap_u_fn,
                                              const CorrectingFactor& m, const PolyVecField& h,
                                              const DiskQuadrature& dq,
                                              const BoundaryQuadrature& bq) {
    EmbeddingReport rep;
    rep.id = "scalar_weight";
    rep.has_mid = true;
    detail::stamp(rep, dq, bq);

    std::vector<double> vals(dq.size());
    parallel_for_index(dq.size(), [&](std::size_t i) {
        const cplx z = dq.nodes[i].z;
        const double u = detail::clamp_weight_exponent(u_fn(z), z);
        vals[i] = dq.weights[i] * m.eval(u, 1) * lap_u_fn(z) * h(z).squaredNorm();
    });
    rep.lhs = pairwise_sum(vals);

    std::vector<double> bmid(bq.size()), brhs(bq.size());
    parallel_for_index(bq.size(), [&](std::size_t i) {
        const cplx z = bq.nodes[i];
        const double n2 = h(z).squaredNorm();
        const double u = detail::clamp_weight_exponent(u_fn(z), z);
        bmid[i] = bq.weights[i] * n2 * m.eval(u, 0);
        brhs[i] = bq.weights[i] * n2;
    });
    rep.mid = pairwise_sum(bmid);
    rep.rhs = pairwise_sum(brhs);
    return rep;
}

/// The curvature measure  ||dPi||^2 psi(ln||f||^-2) log(1/|z|) dA:
/// checked through the scalar chain with u = log||f||^2 (whose Laplacian
/// IS the curvature) and M built from psi; the raw psi-weighted mass is
/// reported in aux["psi_mass"].
inline EmbeddingReport curvature_measure_check(const PolyVecField& f, const PsiFunction& psi,
                                               const DiskQuadrature& dq,
                                               const BoundaryQuadrature& bq,
                                               double r_max = 60.0) {
    PolyVecField fcheck = f;
    const double sup = fcheck.check_sup_norm(bq);
    if (!fcheck.sup_norm_le_one())
        throw std::invalid_argument("curvature_measure_check: ||f||_inf = " + std::to_string(sup) +
                                    " > 1");
    const auto m = build_correcting_factor(psi, r_max);
    auto rep = scalar_weight_embedding_check([&](cplx z) { return f.log_norm2(z); },
                                             [&](cplx z) { return curvature(f, z); },
                                             m, PolyVecField({Poly::constant(1.0)}), dq, bq);
    rep.id = "curvature_measure";

    std::vector<double> mass(dq.size());
    parallel_for_index(dq.size(), [&](std::size_t i) {
        const cplx z = dq.nodes[i].z;
        const double u = detail::clamp_weight_exponent(f.log_norm2(z), z);
        mass[i] = dq.weights[i] * curvature(f, z) * psi(-u);
    });
    rep.aux["psi_mass"] = pairwise_sum(mass);
    rep.aux["domination_constant"] = measure_domination_constant(psi, m).constant;
    return rep;
}

/// Section chain over the bundle, u = log||f||^2:
///   lhs = (2/pi) int_D e^u M'(u) ||dPi||^2 ||xi||^2 log(1/|z|) dA
///   mid = int_T e^u M(u) ||xi||^2 dm
///   rhs = int_T ||xi||^2 dm
inline EmbeddingReport section_embedding_check(const SectionField& sec, const CorrectingFactor& m,
                                               const DiskFrame& df, const BoundaryFrame& bf) {
    EmbeddingReport rep;
    rep.id = "section_weight";
    rep.has_mid = true;
    detail::stamp(rep, *df.quad, *bf.quad);
    rep.excluded = df.excluded + bf.excluded;

    std::vector<double> vals(df.quad->size(), 0.0);
    parallel_for_index(df.quad->size(), [&](std::size_t i) {
        if (!df.valid[i]) return;
        const double u = detail::clamp_weight_exponent(df.u[i], df.quad->nodes[i].z);
        const double n2 = eval_section_value(sec, df.proj[i]).squaredNorm();
        vals[i] = df.quad->weights[i] * std::exp(u) * m.eval(u, 1) * df.curv[i] * n2;
    });
    rep.lhs = pairwise_sum(vals);

    std::vector<double> bmid(bf.quad->size(), 0.0), brhs(bf.quad->size(), 0.0);
    parallel_for_index(bf.quad->size(), [&](std::size_t i) {
        if (!bf.valid[i]) return;
        const cplx z = bf.quad->nodes[i];
        const double u = detail::clamp_weight_exponent(bf.u[i], z);
        const double n2 = eval_section_value(sec, bf.proj[i]).squaredNorm();
        bmid[i] = bf.quad->weights[i] * std::exp(u) * m.eval(u, 0) * n2;
        brhs[i] = bf.quad->weights[i] * n2;
    });
    rep.mid = pairwise_sum(bmid);
    rep.rhs = pairwise_sum(brhs);
    return rep;
}

inline EmbeddingReport section_embedding_check(const SectionField& sec, const CorrectingFactor& m,
                                               const PolyVecField& f, const DiskQuadrature& dq,
                                               const BoundaryQuadrature& bq) {
    const DiskFrame df = build_disk_frame(f, dq);
    const BoundaryFrame bf = build_boundary_frame(f, bq);
    return section_embedding_check(sec, m, df, bf);
}

/// ||dbar(conj(tau^{1/2}) s)||^2 without choosing a branch:
///   |tau| ||dbar s||^2 + |tau'|^2/(4|tau|) ||s||^2
///   + Re[ (conj(tau) tau' / |tau|) <dbar s, s> ].
/// Algebraically equal to the branch expression wherever tau != 0.
inline double weighted_dbar_norm2_pointwise(cplx tau, cplx taup, const Eigen::VectorXcd& s,
                                            const Eigen::VectorXcd& dbar_s) {
    const double at = std::abs(tau);
    const cplx ip = s.dot(dbar_s);  // <dbar s, s>: Eigen dot conjugates the lhs
    return at * dbar_s.squaredNorm() + std::norm(taup) / (4.0 * at) * s.squaredNorm() +
           (std::conj(tau) * taup / at * ip).real();
}

/// The d-counterpart for zeta-kind sections: ||d(tau^{1/2} s)||^2.
inline double weighted_d_norm2_pointwise(cplx tau, cplx taup, const Eigen::VectorXcd& s,
                                         const Eigen::VectorXcd& d_s) {
    const double at = std::abs(tau);
    const cplx ip = s.dot(d_s);
    return at * d_s.squaredNorm() + std::norm(taup) / (4.0 * at) * s.squaredNorm() +
           (tau * std::conj(taup) / at * ip).real();
}

/// Branch-free weighted derivative norm of a section at one point; nullopt
/// signals a node excluded by the |tau| cutoff (not an error).
inline std::optional<double> weighted_dbar_norm2(const Poly& tau, const PolyVecField& f,
                                                 const SectionField& sec, cplx z,
                                                 double eps_tau = kTauCutoff) {
    const cplx t = tau(z);
    if (std::abs(t) < eps_tau) return std::nullopt;
    const auto ps = projection(f, z);
    const auto ss = eval_section(sec, ps);
    const cplx tp = tau.derivative()(z);
    if (sec.kind == SectionKind::Xi) return weighted_dbar_norm2_pointwise(t, tp, ss.value, ss.dbar);
    return weighted_d_norm2_pointwise(t, tp, ss.value, ss.d);
}

struct SizeConditionReport {
    double margin = 0.0;  // min over nodes of phi(||f||) - |tau|
    cplx worst_node{};
    double sup_f = 0.0;

    bool pass(double tol = 1e-10) const { return margin >= -tol; }
};

/// The size-condition gate |tau(z)| <= phi(||f(z)||) on a boundary grid
/// plus all disk nodes.  Requires ||f||_inf <= 1 (throws otherwise).
inline SizeConditionReport check_size_condition(const PolyVecField& f, const Poly& tau,
                                                const PsiFunction& psi, const DiskQuadrature& dq,
                                                const BoundaryQuadrature& gate_grid) {
    PolyVecField fc = f;
    SizeConditionReport rep;
    rep.sup_f = fc.check_sup_norm(gate_grid);
    if (!fc.sup_norm_le_one())
        throw std::invalid_argument("check_size_condition: ||f||_inf = " +
                                    std::to_string(rep.sup_f) + " > 1 on the boundary grid");
    rep.margin = std::numeric_limits<double>::infinity();
    auto visit = [&](cplx z) {
        const double s = std::min(f.norm_at(z), 1.0);  // sup-check allows 1 + 1e-12 roundoff
        const double margin = phi(psi, s) - std::abs(tau(z));
        if (margin < rep.margin) {
            rep.margin = margin;
            rep.worst_node = z;
        }
    };
    for (const cplx& z : gate_grid.nodes) visit(z);
    for (const DiskPoint& p : dq.nodes) visit(p.z);
    return rep;
}

/// The four tau-weighted embedding inequalities for a section pair
/// (xi-kind and zeta-kind).  The size condition is verified first; the
/// energy inequalities carry the factor 2 on the right.
inline std::array<EmbeddingReport, 4> tau_embedding_checks(
    const PolyVecField& f, const Poly& tau, const PsiFunction& psi, const SectionField& xi,
    const SectionField& zeta, const DiskQuadrature& dq, const BoundaryQuadrature& bq,
    const BoundaryQuadrature& gate_grid, double eps_tau = kTauCutoff) {
    if (xi.kind != SectionKind::Xi || zeta.kind != SectionKind::Zeta)
        throw std::invalid_argument("tau_embedding_checks: sections must be (xi, zeta) kinds");
    const auto gate = check_size_condition(f, tau, psi, dq, gate_grid);
    if (!gate.pass())
        throw numeric_error("size condition violated: phi(||f||) - |tau| = " +
                            std::to_string(gate.margin) + " at z = " + format_point(gate.worst_node));

    const DiskFrame df = build_disk_frame(f, dq);
    const BoundaryFrame bf = build_boundary_frame(f, bq);
    const Poly taud = tau.derivative();
    const double e_xi = boundary_energy(xi, bf);
    const double e_zeta = boundary_energy(zeta, bf);

    std::array<EmbeddingReport, 4> out;
    const char* ids[4] = {"xi_curvature_weight", "xi_dbar_energy", "zeta_curvature_weight",
                          "zeta_d_energy"};
    for (int k = 0; k < 4; ++k) {
        out[k].id = ids[k];
        detail::stamp(out[k], dq, bq);
        out[k].excluded = df.excluded;
    }
    out[0].rhs = e_xi;
    out[1].rhs = 2.0 * e_xi;
    out[2].rhs = e_zeta;
    out[3].rhs = 2.0 * e_zeta;

    const std::size_t nn = dq.size();
    std::vector<double> v0(nn, 0.0), v1(nn, 0.0), v2(nn, 0.0), v3(nn, 0.0);
    std::vector<long> skipped(nn, 0);
    parallel_for_index(nn, [&](std::size_t i) {
        if (!df.valid[i]) return;
        const double w = dq.weights[i];
        const cplx z = dq.nodes[i].z;
        const cplx t = tau(z);
        const auto sxi = eval_section(xi, df.proj[i]);
        const auto sze = eval_section(zeta, df.proj[i]);
        v0[i] = w * std::abs(t) * df.curv[i] * sxi.value.squaredNorm();
        v2[i] = w * std::abs(t) * df.curv[i] * sze.value.squaredNorm();
        if (std::abs(t) < eps_tau) {
            skipped[i] = 1;  // weighted derivative terms excluded near zeros of tau
            return;
        }
        const cplx tp = taud(z);
        v1[i] = w * weighted_dbar_norm2_pointwise(t, tp, sxi.value, sxi.dbar);
        v3[i] = w * weighted_d_norm2_pointwise(t, tp, sze.value, sze.d);
    });
    long nskip = 0;
    for (long s : skipped) nskip += s;
    out[0].lhs = pairwise_sum(v0);
    out[1].lhs = pairwise_sum(v1);
    out[2].lhs = pairwise_sum(v2);
    out[3].lhs = pairwise_sum(v3);
    out[1].excluded += nskip;
    out[3].excluded += nskip;
    for (auto& r : out) r.aux["size_margin"] = gate.margin;
    return out;
}

/// Standard Carleson box norm of a finite point mass, max over dyadic arcs
/// I of mass(Q(I)) / |I| with Q(I) the box of depth |I| over the arc.
/// Diagnostic only.
inline double carleson_box_norm(const std::vector<std::pair<cplx, double>>& masses,
                                int max_level) {
    if (max_level < 0) throw std::invalid_argument("carleson_box_norm: max_level >= 0");
    double best = 0.0;
    for (int lev = 0; lev <= max_level; ++lev) {
        const std::size_t arcs = std::size_t{1} << lev;
        const double len = 1.0 / static_cast<double>(arcs);  // normalized arc length
        std::vector<double> acc(arcs, 0.0);
        for (const auto& [z, mass] : masses) {
            if (std::abs(z) < 1.0 - len) continue;
            double ang = std::arg(z) / (2.0 * kPi);
            ang -= std::floor(ang);
            std::size_t idx = static_cast<std::size_t>(ang * static_cast<double>(arcs));
            if (idx >= arcs) idx = arcs - 1;
            acc[idx] += mass;
        }
        for (double a : acc) best = std::max(best, a / len);
    }
    return best;
}

} // namespace hardylab
