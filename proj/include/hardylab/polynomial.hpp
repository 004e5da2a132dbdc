#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <optional>
#include <vector>

#include "hardylab/common.hpp"
#include "hardylab/quadrature.hpp"

namespace hardylab {

/// Scalar complex polynomial, ascending coefficients.  Evaluation and
/// derivatives are exact polynomial arithmetic; there is no sampling
/// anywhere in this class.
class Poly {
public:
    Poly() : c_(1, cplx(0.0)) {}
    explicit Poly(std::vector<cplx> coeffs) : c_(std::move(coeffs)) {
        if (c_.empty()) c_.assign(1, cplx(0.0));
    }
    static Poly constant(cplx v) { return Poly({v}); }
    static Poly monomial(int power, cplx v = 1.0) {
        std::vector<cplx> c(power + 1, cplx(0.0));
        c.back() = v;
        return Poly(std::move(c));
    }

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    const std::vector<cplx>& coeffs() const { return c_; }
    cplx coeff(int j) const { return (j >= 0 && j < static_cast<int>(c_.size())) ? c_[j] : cplx(0.0); }

    cplx operator()(cplx z) const {  // Horner
        cplx acc = c_.back();
        for (std::size_t j = c_.size() - 1; j-- > 0;) acc = acc * z + c_[j];
        return acc;
    }

    Poly derivative() const {
        if (c_.size() <= 1) return Poly();
        std::vector<cplx> d(c_.size() - 1);
        for (std::size_t j = 1; j < c_.size(); ++j) d[j - 1] = static_cast<double>(j) * c_[j];
        return Poly(std::move(d));
    }

    /// Coefficient-wise conjugate:  p~(z) = conj(p(conj(z))).
    Poly conj_coeffs() const {
        std::vector<cplx> d(c_.size());
        for (std::size_t j = 0; j < c_.size(); ++j) d[j] = std::conj(c_[j]);
        return Poly(std::move(d));
    }

    /// p(z) * z^k
    Poly shifted(int k) const {
        std::vector<cplx> d(c_.size() + k, cplx(0.0));
        std::copy(c_.begin(), c_.end(), d.begin() + k);
        return Poly(std::move(d));
    }

    Poly operator*(const Poly& o) const {
        std::vector<cplx> d(c_.size() + o.c_.size() - 1, cplx(0.0));
        for (std::size_t i = 0; i < c_.size(); ++i)
            for (std::size_t j = 0; j < o.c_.size(); ++j) d[i + j] += c_[i] * o.c_[j];
        return Poly(std::move(d));
    }

    Poly operator*(cplx s) const {
        std::vector<cplx> d(c_);
        for (auto& v : d) v *= s;
        return Poly(std::move(d));
    }

    Poly operator+(const Poly& o) const {
        std::vector<cplx> d(std::max(c_.size(), o.c_.size()), cplx(0.0));
        for (std::size_t j = 0; j < c_.size(); ++j) d[j] += c_[j];
        for (std::size_t j = 0; j < o.c_.size(); ++j) d[j] += o.c_[j];
        return Poly(std::move(d));
    }

    bool is_zero(double tol = 0.0) const {
        for (const auto& v : c_)
            if (std::abs(v) > tol) return false;
        return true;
    }

private:
    std::vector<cplx> c_;
};

/// Vector-valued analytic polynomial f : D -> C^n with exact derivative
/// access.  Also carries the sup-norm flag required by the embedding and
/// size-condition gates: it is set only after an explicit boundary-grid
/// check.
class PolyVecField {
public:
    PolyVecField() = default;
    explicit PolyVecField(std::vector<Poly> components) : comp_(std::move(components)) {
        if (comp_.empty()) throw std::invalid_argument("PolyVecField: needs >= 1 component");
    }

    /// From a coefficient table c[k][j], component k, power j.
    static PolyVecField from_coeffs(const std::vector<std::vector<cplx>>& table) {
        std::vector<Poly> comp;
        comp.reserve(table.size());
        for (const auto& row : table) comp.emplace_back(row);
        return PolyVecField(std::move(comp));
    }

    int dim() const { return static_cast<int>(comp_.size()); }
    int degree() const {
        int d = 0;
        for (const auto& p : comp_) d = std::max(d, p.degree());
        return d;
    }
    const Poly& component(int k) const { return comp_[k]; }

    Eigen::VectorXcd operator()(cplx z) const {
        Eigen::VectorXcd v(dim());
        for (int k = 0; k < dim(); ++k) v[k] = comp_[k](z);
        return v;
    }

    PolyVecField derivative() const {
        std::vector<Poly> d;
        d.reserve(comp_.size());
        for (const auto& p : comp_) d.push_back(p.derivative());
        return PolyVecField(std::move(d));
    }

    PolyVecField conj_coeffs() const {
        std::vector<Poly> d;
        d.reserve(comp_.size());
        for (const auto& p : comp_) d.push_back(p.conj_coeffs());
        return PolyVecField(std::move(d));
    }

    PolyVecField shifted(int k) const {
        std::vector<Poly> d;
        d.reserve(comp_.size());
        for (const auto& p : comp_) d.push_back(p.shifted(k));
        return PolyVecField(std::move(d));
    }

    double norm_at(cplx z) const { return (*this)(z).norm(); }
    double norm2_at(cplx z) const { return (*this)(z).squaredNorm(); }

    /// u = log ||f(z)||^2 (the subharmonic weight of the embedding checks).
    double log_norm2(cplx z) const { return std::log(norm2_at(z)); }

    /// Boundary-grid sup-norm check; sets the sup_norm_le_one flag iff
    /// sup over the grid is <= 1 + 1e-12.  Returns the measured sup.
    double check_sup_norm(const BoundaryQuadrature& bq) {
        double sup = 0.0;
        for (const cplx& z : bq.nodes) sup = std::max(sup, norm_at(z));
        sup_norm_le_one_ = (sup <= 1.0 + 1e-12);
        return sup;
    }

    bool sup_norm_le_one() const { return sup_norm_le_one_.value_or(false); }
    bool sup_norm_checked() const { return sup_norm_le_one_.has_value(); }

private:
    std::vector<Poly> comp_;
    std::optional<bool> sup_norm_le_one_;
};

/// Convenience: f = (p_1, ..., p_n)^T / scale.
inline PolyVecField scaled_field(std::vector<Poly> comps, double scale) {
    for (auto& p : comps) p = p * cplx(1.0 / scale);
    return PolyVecField(std::move(comps));
}

} // namespace hardylab
