#pragma once

#include <Eigen/Dense>
#include <vector>

#include "hardylab/projection.hpp"
#include "hardylab/quadrature.hpp"

namespace hardylab {

/// Per-node projection data cached over a disk rule: evaluating Pi and its
/// derivatives once per node makes sweeps over many sections cheap.  Nodes
/// whose fiber falls below the cutoff are marked invalid and carry weight
/// `excluded_weight` in total.
struct DiskFrame {
    const DiskQuadrature* quad = nullptr;
    std::vector<ProjectionSample> proj;
    std::vector<double> curv;   // ||dPi||^2
    std::vector<double> u;      // log ||f||^2 (unclamped)
    std::vector<char> valid;
    long excluded = 0;
    double excluded_weight = 0.0;
};

struct BoundaryFrame {
    const BoundaryQuadrature* quad = nullptr;
    std::vector<ProjectionSample> proj;
    std::vector<double> u;
    std::vector<char> valid;
    long excluded = 0;
};

inline DiskFrame build_disk_frame(const PolyVecField& f, const DiskQuadrature& q,
                                  double eps_f = kFiberCutoff) {
    DiskFrame fr;
    fr.quad = &q;
    fr.proj.resize(q.size());
    fr.curv.resize(q.size());
    fr.u.resize(q.size());
    fr.valid.assign(q.size(), 0);
    parallel_for_index(q.size(), [&](std::size_t i) {
        const cplx z = q.nodes[i].z;
        if (f.norm_at(z) < eps_f) return;  // stays invalid
        fr.proj[i] = projection(f, z, eps_f);
        fr.curv[i] = curvature(f, z, eps_f);
        fr.u[i] = f.log_norm2(z);
        fr.valid[i] = 1;
    });
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (!fr.valid[i]) {
            ++fr.excluded;
            fr.excluded_weight += q.weights[i];
        }
    }
    return fr;
}

inline BoundaryFrame build_boundary_frame(const PolyVecField& f, const BoundaryQuadrature& q,
                                          double eps_f = kFiberCutoff) {
    BoundaryFrame fr;
    fr.quad = &q;
    fr.proj.resize(q.size());
    fr.u.resize(q.size());
    fr.valid.assign(q.size(), 0);
    parallel_for_index(q.size(), [&](std::size_t i) {
        const cplx z = q.nodes[i];
        if (f.norm_at(z) < eps_f) return;
        ProjectionSample s;  // boundary samples only need Pi itself
        const Eigen::VectorXcd fv = f(z);
        s.z = z;
        s.Pi = fv * fv.adjoint() / fv.squaredNorm();
        fr.proj[i] = std::move(s);
        fr.u[i] = f.log_norm2(z);
        fr.valid[i] = 1;
    });
    for (std::size_t i = 0; i < q.size(); ++i)
        if (!fr.valid[i]) ++fr.excluded;
    return fr;
}

/// A section of the bundle (or its complement):
///   xi-kind:   xi(z)  = Pi(z) h(z)        with h = conj(p), p analytic
///   zeta-kind: zeta(z) = (I - Pi(z)) p(z)  with p analytic
/// Wirtinger derivatives come from the exact product-rule formulas; the
/// analyticity of p kills one term on each side.
enum class SectionKind { Xi, Zeta };

struct SectionField {
    SectionKind kind;
    PolyVecField p;
    PolyVecField pd;  // exact derivative of p

    SectionField(SectionKind k, PolyVecField poly)
        : kind(k), p(std::move(poly)), pd(p.derivative()) {}
};

struct SectionSample {
    Eigen::VectorXcd value, d, dbar;
};

inline SectionSample eval_section(const SectionField& sec, const ProjectionSample& ps) {
    const Eigen::VectorXcd pv = sec.p(ps.z);
    const Eigen::VectorXcd pdv = sec.pd(ps.z);
    SectionSample out;
    if (sec.kind == SectionKind::Xi) {
        const Eigen::VectorXcd h = pv.conjugate();
        out.value = ps.Pi * h;
        out.d = ps.dPi * out.value;                          // d(Pi h) = (dPi) xi
        out.dbar = ps.dbarPi * h + ps.Pi * pdv.conjugate();
    } else {
        out.value = pv - ps.Pi * pv;
        out.d = pdv - ps.Pi * pdv - ps.dPi * pv;
        out.dbar = -(ps.dbarPi * pv);                        // dbar p = 0
    }
    return out;
}

/// Boundary value of the section (no derivatives needed there).
inline Eigen::VectorXcd eval_section_value(const SectionField& sec, const ProjectionSample& ps) {
    const Eigen::VectorXcd pv = sec.p(ps.z);
    if (sec.kind == SectionKind::Xi) return ps.Pi * pv.conjugate();
    return pv - ps.Pi * pv;
}

/// int_T ||section||^2 dm over the valid boundary nodes.
inline double boundary_energy(const SectionField& sec, const BoundaryFrame& bf) {
    std::vector<double> vals(bf.quad->size(), 0.0);
    parallel_for_index(bf.quad->size(), [&](std::size_t i) {
        if (!bf.valid[i]) return;
        vals[i] = bf.quad->weights[i] * eval_section_value(sec, bf.proj[i]).squaredNorm();
    });
    return pairwise_sum(vals);
}

} // namespace hardylab
