#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "hardylab/embedding.hpp"
#include "hardylab/polynomial.hpp"

namespace hardylab {

/// gf = tau for polynomial data: f has n components of degree <= d_f, the
/// unknown g is a row vector of polynomials of degree <= degree_cap.
struct BezoutProblem {
    PolyVecField f;
    Poly tau;
    int degree_cap = -1;  // < 0 picks the default d_tau + n*d_f

    int effective_cap() const {
        if (degree_cap >= 0) return degree_cap;
        return tau.degree() + f.dim() * f.degree();
    }
};

struct BezoutCertificate {
    std::vector<Poly> g;              // row vector, one entry per component of f
    double coeff_residual = 0.0;      // ∞-norm of the convolution defect
    double boundary_residual = 0.0;   // sup over the boundary grid of |g f - tau|
    double g_sup = 0.0;               // sup over the boundary grid of ||g||
    int null_dimension = 0;           // degrees of freedom at this degree cap
    bool sup_minimized = false;
    bool iteration_budget_hit = false;
};

struct ProductIdentityReport {
    double idempotency_residual = 0.0;  // max ||R^2 - tau R|| over the grid
    double range_residual = 0.0;        // max ||(I - Pi) R||
    long skipped = 0;                   // nodes with |tau| below cutoff
};

/// A common root of every component inside the closed disk, with the
/// minimum multiplicity across components and the matching order of tau.
struct CommonZero {
    cplx location{};
    int multiplicity = 0;
    int tau_order = 0;
};

namespace detail {

inline std::vector<cplx> poly_roots(const Poly& p) {
    // companion-matrix eigenvalues of the trimmed polynomial
    const auto& c = p.coeffs();
    int deg = static_cast<int>(c.size()) - 1;
    while (deg > 0 && std::abs(c[deg]) == 0.0) --deg;
    if (deg <= 0) return {};
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -c[i] / c[deg];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, /*computeEigenvectors=*/false);
    std::vector<cplx> roots(es.eigenvalues().data(), es.eigenvalues().data() + deg);
    return roots;
}

inline int count_near(const std::vector<cplx>& roots, cplx at, double radius) {
    int m = 0;
    for (cplx r : roots)
        if (std::abs(r - at) <= radius) ++m;
    return m;
}

/// Convolution (Sylvester-type) system: row d of A x = t equates the
/// degree-d coefficient of sum_k g_k f_k with tau's.
inline Eigen::MatrixXcd convolution_matrix(const PolyVecField& f, int cap, int rows) {
    const int n = f.dim();
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(rows, n * (cap + 1));
    for (int k = 0; k < n; ++k) {
        const auto& c = f.component(k).coeffs();
        for (int j = 0; j <= cap; ++j)
            for (int d = 0; d < static_cast<int>(c.size()); ++d)
                if (j + d < rows) a(j + d, k * (cap + 1) + j) = c[d];
    }
    return a;
}

inline std::vector<Poly> unpack_solution(const Eigen::VectorXcd& x, int n, int cap) {
    std::vector<Poly> g;
    g.reserve(n);
    for (int k = 0; k < n; ++k) {
        std::vector<cplx> c(cap + 1);
        for (int j = 0; j <= cap; ++j) c[j] = x[k * (cap + 1) + j];
        g.emplace_back(std::move(c));
    }
    return g;
}

inline double boundary_sup_norm(const std::vector<Poly>& g, const BoundaryQuadrature& bq) {
    double sup = 0.0;
    for (const cplx& z : bq.nodes) {
        double n2 = 0.0;
        for (const Poly& gk : g) n2 += std::norm(gk(z));
        sup = std::max(sup, n2);
    }
    return std::sqrt(sup);
}

inline double boundary_defect(const std::vector<Poly>& g, const PolyVecField& f, const Poly& tau,
                              const BoundaryQuadrature& bq) {
    double worst = 0.0;
    for (const cplx& z : bq.nodes) {
        cplx acc = -tau(z);
        for (int k = 0; k < f.dim(); ++k) acc += g[k](z) * f.component(k)(z);
        worst = std::max(worst, std::abs(acc));
    }
    return worst;
}

} // namespace detail

/// Common roots of the components inside the closed disk (root tolerance
/// 1e-8 for cross-component matching; multiplicities counted in a wider
/// cluster since multiple eigenvalues split under roundoff) together with
/// tau's vanishing order there.  Components identically zero constrain
/// nothing; an all-zero f is rejected.
inline std::vector<CommonZero> common_disk_zeros(const PolyVecField& f, const Poly& tau,
                                                 double match_tol = 1e-8,
                                                 double cluster_tol = 1e-5) {
    std::vector<std::vector<cplx>> roots;
    for (int k = 0; k < f.dim(); ++k)
        if (!f.component(k).is_zero(0.0)) roots.push_back(detail::poly_roots(f.component(k)));
    if (roots.empty()) throw std::invalid_argument("common_disk_zeros: f is identically zero");
    const auto tau_roots = detail::poly_roots(tau);

    std::vector<CommonZero> out;
    for (cplx cand : roots.front()) {
        if (std::abs(cand) > 1.0 + match_tol) continue;
        bool shared = true;
        for (std::size_t k = 1; k < roots.size(); ++k)
            if (detail::count_near(roots[k], cand, match_tol) == 0) shared = false;
        if (!shared) continue;
        bool dup = false;
        for (const auto& seen : out)
            if (std::abs(seen.location - cand) <= cluster_tol) dup = true;
        if (dup) continue;
        CommonZero cz;
        cz.location = cand;
        cz.multiplicity = std::numeric_limits<int>::max();
        for (const auto& rs : roots)
            cz.multiplicity = std::min(cz.multiplicity, detail::count_near(rs, cand, cluster_tol));
        cz.tau_order = tau.is_zero(0.0) ? std::numeric_limits<int>::max()
                                        : detail::count_near(tau_roots, cand, cluster_tol);
        out.push_back(cz);
    }
    return out;
}

/// Size-condition gate for a Bezout instance: min over the grids of
/// phi(||f||) - |tau| (see check_size_condition).
inline SizeConditionReport bezout_size_gate(const BezoutProblem& prob, const PsiFunction& psi,
                                            const DiskQuadrature& dq,
                                            const BoundaryQuadrature& gate_grid) {
    return check_size_condition(prob.f, prob.tau, psi, dq, gate_grid);
}

/// Exact coefficient solve: the convolution system is solved by min-norm
/// least squares (the monomials are orthonormal on the circle, so minimal
/// coefficient norm IS minimal boundary energy).  Infeasible systems throw
/// with rank diagnostics.
inline BezoutCertificate solve_exact(const BezoutProblem& prob, const BoundaryQuadrature& bq,
                                     double feas_tol = 1e-10) {
    const int n = prob.f.dim();
    const int cap = prob.effective_cap();
    if (cap < 0) throw std::invalid_argument("solve_exact: negative degree cap");
    const int rows = std::max(cap + prob.f.degree(), prob.tau.degree()) + 1;

    const Eigen::MatrixXcd a = detail::convolution_matrix(prob.f, cap, rows);
    Eigen::VectorXcd t = Eigen::VectorXcd::Zero(rows);
    for (int d = 0; d <= prob.tau.degree(); ++d) t[d] = prob.tau.coeff(d);

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(a);
    const Eigen::VectorXcd x = cod.solve(t);
    const double defect = (a * x - t).cwiseAbs().maxCoeff();
    const double scale = 1.0 + t.cwiseAbs().maxCoeff();
    if (defect > feas_tol * scale) {
        throw numeric_error("solve_exact: infeasible at degree cap " + std::to_string(cap) +
                            " (defect " + std::to_string(defect) + ", rank " +
                            std::to_string(cod.rank()) + " of " + std::to_string(rows) + "x" +
                            std::to_string(n * (cap + 1)) + "); increase the degree cap");
    }

    BezoutCertificate cert;
    cert.g = detail::unpack_solution(x, n, cap);
    cert.coeff_residual = defect;
    cert.null_dimension = n * (cap + 1) - static_cast<int>(cod.rank());
    cert.boundary_residual = detail::boundary_defect(cert.g, prob.f, prob.tau, bq);
    cert.g_sup = detail::boundary_sup_norm(cert.g, bq);
    return cert;
}

namespace detail {

/// min over the affine set x0 + N c of max_b ||g(z_b)||, by Newton on the
/// log-sum-exp smoothing of the squared norms with mu-continuation.  The
/// best iterate is tracked, so the reported sup never increases.
///
/// Data is laid out per component (n matrices of nb rows) so that every
/// evaluation is a handful of large GEMMs rather than nb small ones.
struct SupMinimizer {
    std::vector<Eigen::MatrixXcd> Tc;   // per component: nb x k
    std::vector<Eigen::VectorXcd> s0c;  // per component: nb
    int nb = 0, n = 0, k = 0;

    Eigen::VectorXd q_at(const Eigen::VectorXd& y) const {
        const Eigen::VectorXcd c = y.head(k) + cplx(0, 1) * y.tail(k);
        Eigen::VectorXd q = Eigen::VectorXd::Zero(nb);
        for (int r = 0; r < n; ++r) {
            const Eigen::VectorXcd v = s0c[r] + Tc[r] * c;
            q.array() += v.array().abs2();
        }
        return q;
    }

    static double lse(const Eigen::VectorXd& q, double mu, double& sup2) {
        sup2 = q.maxCoeff();
        return sup2 + mu * std::log(((q.array() - sup2) / mu).exp().sum());
    }

    static Eigen::MatrixXd re_block(const Eigen::MatrixXcd& a) {
        const int m = static_cast<int>(a.rows());
        Eigen::MatrixXd h(2 * m, 2 * m);
        h.topLeftCorner(m, m) = a.real();
        h.topRightCorner(m, m) = -a.imag();
        h.bottomLeftCorner(m, m) = a.imag();
        h.bottomRightCorner(m, m) = a.real();
        return h;
    }

    // value, gradient and Hessian of mu*log sum exp(q_b/mu) at y (real 2k)
    void smooth_objective(const Eigen::VectorXd& y, double mu, double& val,
                          Eigen::VectorXd& grad, Eigen::MatrixXd& hess, double& sup2) const {
        const Eigen::VectorXcd c = y.head(k) + cplx(0, 1) * y.tail(k);
        std::vector<Eigen::VectorXcd> v(n);
        Eigen::VectorXd q = Eigen::VectorXd::Zero(nb);
        for (int r = 0; r < n; ++r) {
            v[r].noalias() = Tc[r] * c;
            v[r] += s0c[r];
            q.array() += v[r].array().abs2();
        }
        sup2 = q.maxCoeff();
        Eigen::VectorXd w = ((q.array() - sup2) / mu).exp();
        const double wsum = w.sum();
        val = sup2 + mu * std::log(wsum);
        w /= wsum;

        // softmax weights concentrate hard as mu shrinks; restrict the
        // dense work to the nodes that still carry weight
        std::vector<int> active;
        active.reserve(nb);
        for (int b = 0; b < nb; ++b)
            if (w[b] > 1e-250) active.push_back(b);
        const int na = static_cast<int>(active.size());
        Eigen::VectorXd wa(na), swa(na);
        for (int i = 0; i < na; ++i) {
            wa[i] = w[active[i]];
            swa[i] = std::sqrt(wa[i]);
        }

        Eigen::MatrixXcd g(na, k);  // G(b,:) = 2 sum_r conj(Tc[r](b,:)) v_r(b)
        Eigen::MatrixXcd ta(na, k);
        Eigen::MatrixXcd aw = Eigen::MatrixXcd::Zero(k, k);
        g.setZero();
        for (int r = 0; r < n; ++r) {
            for (int i = 0; i < na; ++i) {
                const int b = active[i];
                g.row(i) += 2.0 * v[r][b] * Tc[r].row(b).conjugate();
                ta.row(i) = swa[i] * Tc[r].row(b);
            }
            aw.noalias() += ta.adjoint() * ta;  // sum_b w_b T_b^H T_b
        }
        Eigen::MatrixXd gr(na, 2 * k);
        gr.leftCols(k) = g.real();
        gr.rightCols(k) = g.imag();
        grad.noalias() = gr.transpose() * wa;
        const Eigen::MatrixXd grw = swa.asDiagonal() * gr;
        hess = 2.0 * re_block(aw);
        hess.noalias() += (grw.transpose() * grw - grad * grad.transpose()) / mu;
    }

    // returns (best c, best sup)
    std::pair<Eigen::VectorXcd, double> run(int max_newton_per_level, double mu_floor_rel,
                                            bool& budget_hit) const {
        Eigen::VectorXd y = Eigen::VectorXd::Zero(2 * k);
        Eigen::VectorXcd best_c = Eigen::VectorXcd::Zero(k);
        double best_sup2 = q_at(y).maxCoeff();
        const double scale = std::max(best_sup2, 1e-12);
        double mu = 0.5 * scale;
        const double mu_floor = std::max(mu_floor_rel * scale, 1e-18);
        budget_hit = false;

        Eigen::VectorXd grad;
        Eigen::MatrixXd hess;
        while (mu > mu_floor) {
            for (int it = 0; it < max_newton_per_level; ++it) {
                double val, sup2;
                smooth_objective(y, mu, val, grad, hess, sup2);
                if (sup2 < best_sup2) {
                    best_sup2 = sup2;
                    best_c = y.head(k) + cplx(0, 1) * y.tail(k);
                }
                if (grad.norm() < 1e-11 * std::max(1.0, sup2)) break;
                hess.diagonal().array() += 1e-12 * (1.0 + hess.diagonal().cwiseAbs().maxCoeff());
                const Eigen::VectorXd dy = hess.ldlt().solve(-grad);
                if (!dy.allFinite()) break;
                double step = 1.0;
                bool accepted = false;
                const double slope = grad.dot(dy);
                for (int bt = 0; bt < 40; ++bt) {
                    double sup2b;  // line search on the value alone
                    const double val2 = lse(q_at(y + step * dy), mu, sup2b);
                    if (val2 <= val + 1e-4 * step * slope) {
                        accepted = true;
                        if (sup2b < best_sup2) {
                            best_sup2 = sup2b;
                            best_c = (y + step * dy).head(k) + cplx(0, 1) * (y + step * dy).tail(k);
                        }
                        break;
                    }
                    step *= 0.5;
                }
                if (!accepted) {
                    budget_hit = true;
                    break;
                }
                y += step * dy;
                if (step * dy.norm() < 1e-14 * (1.0 + y.norm())) break;
            }
            mu *= 0.25;
        }
        return {best_c, std::sqrt(best_sup2)};
    }
};

} // namespace detail

/// Reduce the boundary sup norm of the certificate within the feasible
/// affine set (coefficient solutions at the same degree cap).  Guaranteed
/// non-increasing g_sup; the convolution residual is preserved because all
/// moves stay in the null space of the system.
inline BezoutCertificate minimize_sup(const BezoutProblem& prob, const BezoutCertificate& start,
                                      const BoundaryQuadrature& bq, int max_newton_per_level = 10,
                                      double mu_floor_rel = 1e-9) {
    const int n = prob.f.dim();
    const int cap = prob.effective_cap();
    const int rows = std::max(cap + prob.f.degree(), prob.tau.degree()) + 1;
    const Eigen::MatrixXcd a = detail::convolution_matrix(prob.f, cap, rows);

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeFullV);
    const double smax = svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()[i] > 1e-12 * smax) ++rank;
    const int k = n * (cap + 1) - rank;
    BezoutCertificate cert = start;
    cert.null_dimension = k;
    cert.sup_minimized = true;
    if (k == 0) return cert;  // zero-dimensional feasible set: nothing to move

    Eigen::VectorXcd x0(n * (cap + 1));
    for (int kk = 0; kk < n; ++kk)
        for (int j = 0; j <= cap; ++j) x0[kk * (cap + 1) + j] = start.g[kk].coeff(j);
    const Eigen::MatrixXcd nullbasis = svd.matrixV().rightCols(k);

    const int nb = static_cast<int>(bq.size());
    Eigen::MatrixXcd powers(nb, cap + 1);  // powers(b, j) = z_b^j
    for (int b = 0; b < nb; ++b) {
        cplx pw = 1.0;
        for (int j = 0; j <= cap; ++j) {
            powers(b, j) = pw;
            pw *= bq.nodes[b];
        }
    }

    detail::SupMinimizer mini;
    mini.nb = nb;
    mini.n = n;
    mini.k = k;
    mini.Tc.resize(n);
    mini.s0c.resize(n);
    for (int r = 0; r < n; ++r) {
        mini.Tc[r].noalias() = powers * nullbasis.middleRows(r * (cap + 1), cap + 1);
        mini.s0c[r].noalias() = powers * x0.segment(r * (cap + 1), cap + 1);
    }
    bool budget_hit = false;
    const auto [best_c, best_sup] = mini.run(max_newton_per_level, mu_floor_rel, budget_hit);

    if (best_sup < cert.g_sup) {
        const Eigen::VectorXcd x = x0 + nullbasis * best_c;
        cert.g = detail::unpack_solution(x, n, cap);
        cert.g_sup = best_sup;
        cert.coeff_residual = 0.0;
        {
            // re-measure the defect of the moved solution
            Eigen::VectorXcd t = Eigen::VectorXcd::Zero(rows);
            for (int d = 0; d <= prob.tau.degree(); ++d) t[d] = prob.tau.coeff(d);
            cert.coeff_residual = (a * x - t).cwiseAbs().maxCoeff();
        }
        cert.boundary_residual = detail::boundary_defect(cert.g, prob.f, prob.tau, bq);
    }
    cert.iteration_budget_hit = budget_hit;
    return cert;
}

/// Residuals of the product identities for R(z) = f(z) g(z): idempotency
/// against tau and containment of the range in span{f(z)}, both restricted
/// to grid nodes where |tau| is above the cutoff.
inline ProductIdentityReport verify_product_identities(const PolyVecField& f, const Poly& tau,
                                                       const std::vector<Poly>& g,
                                                       const std::vector<cplx>& grid,
                                                       double eps_tau = kTauCutoff) {
    if (static_cast<int>(g.size()) != f.dim())
        throw std::invalid_argument("verify_product_identities: g size must match dim of f");
    ProductIdentityReport rep;
    for (cplx z : grid) {
        const cplx t = tau(z);
        if (std::abs(t) < eps_tau) {
            ++rep.skipped;
            continue;
        }
        if (f.norm_at(z) < kFiberCutoff) {
            ++rep.skipped;
            continue;
        }
        const Eigen::VectorXcd fv = f(z);
        Eigen::RowVectorXcd gv(f.dim());
        for (int k = 0; k < f.dim(); ++k) gv[k] = g[k](z);
        const Eigen::MatrixXcd r = fv * gv;
        rep.idempotency_residual =
            std::max(rep.idempotency_residual, spectral_norm(r * r - t * r));
        const Eigen::MatrixXcd pi = fv * fv.adjoint() / fv.squaredNorm();
        rep.range_residual = std::max(rep.range_residual, spectral_norm(r - pi * r));
    }
    return rep;
}

/// Measured minimal boundary sup of g against the measured fiber lower
/// bound, over a family of fields; diagnostic table for growth-rate
/// inspection (no pass/fail).
struct SweepRow {
    double delta = 0.0;  // measured min ||f|| over the grids
    double g_sup = 0.0;
};

inline std::vector<SweepRow> corona_sweep(const std::vector<PolyVecField>& family,
                                          const Poly& tau, int degree_cap,
                                          const DiskQuadrature& dq, const BoundaryQuadrature& bq) {
    std::vector<SweepRow> rows;
    rows.reserve(family.size());
    for (const auto& f : family) {
        PolyVecField fc = f;
        const double sup = fc.check_sup_norm(bq);
        if (!fc.sup_norm_le_one())
            throw std::invalid_argument("corona_sweep: family member has ||f||_inf = " +
                                        std::to_string(sup) + " > 1");
        double lo = std::numeric_limits<double>::infinity();
        for (const auto& p : dq.nodes) lo = std::min(lo, f.norm_at(p.z));
        for (const cplx& z : bq.nodes) lo = std::min(lo, f.norm_at(z));
        BezoutProblem prob{f, tau, degree_cap};
        auto cert = minimize_sup(prob, solve_exact(prob, bq), bq);
        rows.push_back({lo, cert.g_sup});
    }
    return rows;
}

} // namespace hardylab
