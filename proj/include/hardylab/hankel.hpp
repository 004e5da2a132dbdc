#pragma once

#include <Eigen/Dense>
#include <vector>

#include "hardylab/embedding.hpp"
#include "hardylab/sections.hpp"

namespace hardylab {

/// The bilinear form
///   L(xi1, xi2) = (2/pi) int_D d< tau (dbarPi) xi1, xi2 > log(1/|z|) dA
/// with xi1 = (I - Pi) h1 (h1 analytic) and xi2 = Pi h2 (h2 = conj(p2)),
/// split into three parts:
///   commutator part:      tau < (DeltaPi) xi1, xi2 >          -- vanishes
///   left-derivative part: tau <(dbarPi) d xi1, xi2> + (tau'/2) <(dbarPi) xi1, xi2>
///   right-derivative part: tau <(dbarPi) xi1, dbar xi2> + (tau'/2) <(dbarPi) xi1, xi2>
/// The tau'/2 coefficients are what is left of the square-root weights
/// after expanding them away: no branch of tau^{1/2} is ever chosen, and
/// the integrands have no singularity at zeros of tau.
struct FormEvaluation {
    cplx value{};
    cplx part_commutator{};
    cplx part_left{};
    cplx part_right{};
    double energy1 = 0.0;  // ||xi1||_2 on the boundary
    double energy2 = 0.0;  // ||xi2||_2
    double bound_ratio = 0.0;
    long excluded = 0;
};

/// Maximum fraction of quadrature weight that may be lost to vanishing
/// fibers before the evaluation aborts.
inline constexpr double kExcludedWeightBudget = 0.01;

namespace detail {

inline cplx math_inner(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
    return b.dot(a);  // <a, b> = sum a_k conj(b_k)
}

struct FormAccum {
    cplx part_commutator, part_left, part_right;
};

/// One node of the decomposition integrand; frames supply Pi and friends.
inline FormAccum form_integrand(const ProjectionSample& ps, cplx t, cplx tp,
                                const SectionSample& s1, const SectionSample& s2) {
    const Eigen::VectorXcd db_x1 = ps.dbarPi * s1.value;
    const Eigen::VectorXcd db_x2 = ps.dbarPi * s2.value;
    const Eigen::VectorXcd d_x1 = ps.dPi * s1.value;
    const Eigen::VectorXcd d_x2 = ps.dPi * s2.value;
    const Eigen::VectorXcd db_d1 = ps.dbarPi * s1.d;
    FormAccum a;
    a.part_commutator = t * (math_inner(db_x1, db_x2) - math_inner(d_x1, d_x2));
    const cplx cross = math_inner(db_x1, s2.value);
    a.part_left = t * math_inner(db_d1, s2.value) + 0.5 * tp * cross;
    a.part_right = t * math_inner(db_x1, s2.dbar) + 0.5 * tp * cross;
    return a;
}

} // namespace detail

/// Evaluate the form for h1 (analytic polynomial behind xi1 = (I-Pi)h1)
/// and p2 (xi2 = Pi conj(p2)).
inline FormEvaluation eval_form(const PolyVecField& f, const Poly& tau, const PolyVecField& h1,
                                const PolyVecField& p2, const DiskQuadrature& dq,
                                const BoundaryQuadrature& bq) {
    if (h1.dim() != f.dim() || p2.dim() != f.dim())
        throw std::invalid_argument("eval_form: section polynomials must match dim of f");
    const DiskFrame df = build_disk_frame(f, dq);
    if (df.excluded_weight > kExcludedWeightBudget)
        throw numeric_error("eval_form: excluded-node weight " +
                            std::to_string(df.excluded_weight) + " exceeds budget");
    const BoundaryFrame bf = build_boundary_frame(f, bq);
    const SectionField xi1(SectionKind::Zeta, h1);
    const SectionField xi2(SectionKind::Xi, p2);
    const Poly taud = tau.derivative();

    const std::size_t nn = dq.size();
    std::vector<cplx> vi(nn, cplx{}), vii(nn, cplx{}), viii(nn, cplx{});
    parallel_for_index(nn, [&](std::size_t i) {
        if (!df.valid[i]) return;
        const cplx z = dq.nodes[i].z;
        const auto acc = detail::form_integrand(df.proj[i], tau(z), taud(z),
                                                eval_section(xi1, df.proj[i]),
                                                eval_section(xi2, df.proj[i]));
        vi[i] = dq.weights[i] * acc.part_commutator;
        vii[i] = dq.weights[i] * acc.part_left;
        viii[i] = dq.weights[i] * acc.part_right;
    });

    FormEvaluation out;
    out.excluded = df.excluded;
    out.part_commutator = pairwise_sum(vi);
    out.part_left = pairwise_sum(vii);
    out.part_right = pairwise_sum(viii);
    out.value = out.part_commutator + out.part_left + out.part_right;
    out.energy1 = std::sqrt(boundary_energy(xi1, bf));
    out.energy2 = std::sqrt(boundary_energy(xi2, bf));
    const double denom = out.energy1 * out.energy2;
    out.bound_ratio = denom > 1e-300 ? std::abs(out.value) / denom : 0.0;
    return out;
}

/// Drops constant terms of every component (the h2-side convention: the
/// conjugate of p2 must have mean zero on the circle).
inline PolyVecField drop_constant_term(const PolyVecField& p) {
    std::vector<Poly> comps;
    comps.reserve(p.dim());
    for (int k = 0; k < p.dim(); ++k) {
        auto c = p.component(k).coeffs();
        c[0] = 0.0;
        comps.emplace_back(std::move(c));
    }
    return PolyVecField(std::move(comps));
}

/// | L(z xi1, xi2) - L(xi1, zbar xi2) |; the Hankel property of the form.
/// Multiplying xi2 by zbar means multiplying p2 by z.
inline double hankel_symmetry_check(const PolyVecField& f, const Poly& tau,
                                    const PolyVecField& h1, const PolyVecField& p2,
                                    const DiskQuadrature& dq, const BoundaryQuadrature& bq) {
    const PolyVecField p2z = drop_constant_term(p2);
    const cplx left = eval_form(f, tau, h1.shifted(1), p2z, dq, bq).value;
    const cplx right = eval_form(f, tau, h1, p2z.shifted(1), dq, bq).value;
    return std::abs(left - right);
}

/// Numerical lower bound for the best constant in
/// |L(xi1,xi2)| <= C ||xi1||_2 ||xi2||_2 over polynomial bases of degree D:
/// the largest generalized singular value of the form matrix against the
/// boundary Gram matrices of the two section families.
struct FormNormEstimate {
    int degree = 0;
    double value = 0.0;
    int rank1 = 0, rank2 = 0;  // effective ranks of the Gram matrices
    int dim1 = 0, dim2 = 0;
};

inline FormNormEstimate estimate_form_norm(const PolyVecField& f, const Poly& tau, int degree,
                                           const DiskQuadrature& dq, const BoundaryQuadrature& bq,
                                           double rank_tol = 1e-10) {
    if (degree < 1 || degree > 12)
        throw std::invalid_argument("estimate_form_norm: degree must lie in [1, 12]");
    const int n = f.dim();
    const DiskFrame df = build_disk_frame(f, dq);
    if (df.excluded_weight > kExcludedWeightBudget)
        throw numeric_error("estimate_form_norm: excluded-node weight exceeds budget");
    const BoundaryFrame bf = build_boundary_frame(f, bq);
    const Poly taud = tau.derivative();

    // h1 basis: e_k z^j, j = 0..D; p2 basis: e_k z^j, j = 1..D (constant
    // term dropped so that conj(p2) has mean zero).
    auto unit_poly = [n](int k, int j) {
        std::vector<Poly> comps(n);
        comps[k] = Poly::monomial(j);
        return PolyVecField(std::move(comps));
    };
    std::vector<SectionField> fam1, fam2;
    for (int k = 0; k < n; ++k)
        for (int j = 0; j <= degree; ++j) fam1.emplace_back(SectionKind::Zeta, unit_poly(k, j));
    for (int k = 0; k < n; ++k)
        for (int j = 1; j <= degree; ++j) fam2.emplace_back(SectionKind::Xi, unit_poly(k, j));
    const int n1 = static_cast<int>(fam1.size());
    const int n2 = static_cast<int>(fam2.size());

    Eigen::MatrixXcd form(n1, n2);
    const std::size_t nn = dq.size();
    std::vector<cplx> tau_v(nn), taud_v(nn);
    for (std::size_t i = 0; i < nn; ++i) {
        tau_v[i] = tau(dq.nodes[i].z);
        taud_v[i] = taud(dq.nodes[i].z);
    }
    std::vector<cplx> cell(nn);
    for (int a = 0; a < n1; ++a) {
        for (int b = 0; b < n2; ++b) {
            parallel_for_index(nn, [&](std::size_t i) {
                cell[i] = cplx{};
                if (!df.valid[i]) return;
                const auto acc =
                    detail::form_integrand(df.proj[i], tau_v[i], taud_v[i],
                                           eval_section(fam1[a], df.proj[i]),
                                           eval_section(fam2[b], df.proj[i]));
                cell[i] = dq.weights[i] *
                          (acc.part_commutator + acc.part_left + acc.part_right);
            });
            form(a, b) = pairwise_sum(cell);
        }
    }

    // G[i][j] = int_T <fam_j, fam_i> dm, assembled as S^H S from the
    // sqrt(weight)-scaled sample matrix (component index flattened in).
    auto gram = [&](const std::vector<SectionField>& fam) {
        const int m = static_cast<int>(fam.size());
        const std::size_t nb = bf.quad->size();
        Eigen::MatrixXcd samples = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(nb) * n, m);
        for (int j = 0; j < m; ++j) {
            parallel_for_index(nb, [&](std::size_t i) {
                if (!bf.valid[i]) return;
                samples.block(static_cast<Eigen::Index>(i) * n, j, n, 1) =
                    std::sqrt(bf.quad->weights[i]) * eval_section_value(fam[j], bf.proj[i]);
            });
        }
        return Eigen::MatrixXcd(samples.adjoint() * samples);
    };
    const Eigen::MatrixXcd g1 = gram(fam1);
    const Eigen::MatrixXcd g2 = gram(fam2);

    // estimate = sigma_max( (G1^T)^{+1/2} A (G2^T)^{+1/2} ):  writing the
    // coefficient functional |a^T A b| with a = conj(alpha) turns the
    // section norms into alpha^H G1^T alpha and b^H G2^T b.
    auto pinv_sqrt = [rank_tol](const Eigen::MatrixXcd& g, int& rank) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g);
        const auto& lam = es.eigenvalues();
        const double cutoff = rank_tol * std::max(lam.cwiseAbs().maxCoeff(), 1e-300);
        Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(g.rows(), g.cols());
        rank = 0;
        for (int i = 0; i < lam.size(); ++i) {
            if (lam[i] > cutoff) {
                w += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint() /
                     std::sqrt(lam[i]);
                ++rank;
            }
        }
        return w;
    };
    FormNormEstimate out;
    out.degree = degree;
    out.dim1 = n1;
    out.dim2 = n2;
    const Eigen::MatrixXcd w1 = pinv_sqrt(g1.transpose(), out.rank1);
    const Eigen::MatrixXcd w2 = pinv_sqrt(g2.transpose(), out.rank2);
    if (out.rank1 == 0 || out.rank2 == 0) {
        out.value = 0.0;
        return out;
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(w1 * form * w2);
    out.value = svd.singularValues()[0];
    return out;
}

} // namespace hardylab
