#pragma once

#include "affrep/curvature_space.hpp"
#include "affrep/poly.hpp"
#include "affrep/report.hpp"

#include <optional>
#include <span>
#include <vector>

namespace affrep {

/// m x m matrix of polynomials (Ricci fields, d(omega), Theta layers).
class PolyMatrix {
public:
    PolyMatrix() = default;
    explicit PolyMatrix(std::size_t dim);

    std::size_t dim() const { return dim_; }
    Poly& operator()(std::size_t i, std::size_t j) { return entries_[i * dim_ + j]; }
    const Poly& operator()(std::size_t i, std::size_t j) const { return entries_[i * dim_ + j]; }

    bool is_zero() const;
    bool is_symmetric() const;
    /// Minimum vanishing order over the entries.
    int vanishing_order() const;
    RationalMatrix eval(std::span<const Rational> point) const;

    PolyMatrix operator-() const;
    friend PolyMatrix operator+(PolyMatrix a, const PolyMatrix& b);
    friend PolyMatrix operator-(PolyMatrix a, const PolyMatrix& b);
    friend bool operator==(const PolyMatrix&, const PolyMatrix&) = default;

private:
    std::size_t dim_ = 0;
    std::vector<Poly> entries_;
};

/// Polynomial one-form sum_i theta_i dx^i.
class OneForm {
public:
    OneForm() = default;
    explicit OneForm(std::size_t dim);
    explicit OneForm(std::vector<Poly> components);

    std::size_t dim() const { return comps_.size(); }
    Poly& operator[](std::size_t i) { return comps_[i]; }
    const Poly& operator[](std::size_t i) const { return comps_[i]; }
    bool is_zero() const;

    friend bool operator==(const OneForm&, const OneForm&) = default;

private:
    std::vector<Poly> comps_;
};

/// (d theta)(i,j) = d_i theta_j - d_j theta_i.
PolyMatrix exterior_derivative(const OneForm& theta);
OneForm gradient(const Poly& f);

/// Torsion-free connection on T(V) with polynomial Christoffel symbols
/// Gamma(i,j,k) = Gamma_{ij}^k. Writes through set() keep (i,j) symmetry.
class PolyConnection {
public:
    PolyConnection() = default;
    explicit PolyConnection(std::size_t dim);

    std::size_t dim() const { return dim_; }
    const Poly& operator()(std::size_t i, std::size_t j, std::size_t k) const {
        return gamma_[index(i, j, k)];
    }
    /// Sets Gamma_{ij}^k and Gamma_{ji}^k.
    void set(std::size_t i, std::size_t j, std::size_t k, Poly p);
    /// Adds p to Gamma_{ij}^k and (if i != j) Gamma_{ji}^k.
    void add(std::size_t i, std::size_t j, std::size_t k, const Poly& p);

    bool is_zero() const;
    int max_degree() const;
    int vanishing_order() const;

    PolyConnection& operator+=(const PolyConnection& other);
    friend PolyConnection operator+(PolyConnection a, const PolyConnection& b) { return a += b; }
    friend bool operator==(const PolyConnection&, const PolyConnection&) = default;

private:
    std::size_t index(std::size_t i, std::size_t j, std::size_t k) const {
        return (i * dim_ + j) * dim_ + k;
    }

    std::size_t dim_ = 0;
    std::vector<Poly> gamma_;
};

/// R(i,j,k,l) polynomial field.
class CurvatureField {
public:
    CurvatureField() = default;
    explicit CurvatureField(std::size_t dim);

    std::size_t dim() const { return dim_; }
    Poly& operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
        return comps_[index(i, j, k, l)];
    }
    const Poly& operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
        return comps_[index(i, j, k, l)];
    }
    bool is_zero() const;
    CurvatureOperator eval(std::span<const Rational> point) const;

    friend bool operator==(const CurvatureField&, const CurvatureField&) = default;

private:
    std::size_t index(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
        return ((i * dim_ + j) * dim_ + k) * dim_ + l;
    }

    std::size_t dim_ = 0;
    std::vector<Poly> comps_;
};

/// R_{ijk}^l = d_i Gamma_{jk}^l - d_j Gamma_{ik}^l
///           + Gamma_{in}^l Gamma_{jk}^n - Gamma_{jn}^l Gamma_{ik}^n.
CurvatureField curvature_field(const PolyConnection& conn);

/// Curvature operator at a point, from the values of Gamma and its first
/// derivatives there (no polynomial products are formed).
CurvatureOperator curvature_at(const PolyConnection& conn, std::span<const Rational> point);
CurvatureOperator curvature_at_origin(const PolyConnection& conn);

/// rho_{jk} = sum_i R_{ijk}^i, expanded from the full curvature formula so
/// that it is correct whether or not omega vanishes.
PolyMatrix ricci_field(const PolyConnection& conn);

/// omega_i = sum_j Gamma_{ij}^j.
OneForm omega(const PolyConnection& conn);
PolyMatrix d_omega(const PolyConnection& conn);

/// sum_l R_{ijl}^l.
PolyMatrix trace_curvature_field(const PolyConnection& conn);

/// Outcome of solving d(Phi) = omega.
struct VolumePotential {
    std::optional<Poly> potential;  // set on success, Phi(0) = 0
    std::optional<Witness> witness; // set on failure
};

/// Integrates omega along the axis-parallel path 0 -> x1 e1 -> ... -> x and
/// checks d_i Phi == omega_i exactly. Fails (with the first mismatching
/// component) precisely when omega is not closed.
VolumePotential try_volume_potential(const PolyConnection& conn);
/// As try_volume_potential, throwing ClassViolation on failure.
Poly volume_potential(const PolyConnection& conn);

/// The four equivalent conditions: closed omega, traceless curvature,
/// symmetric Ricci field, existence of a parallel volume form; plus a check
/// that they agree.
VerificationReport lemma2_report(const PolyConnection& conn);

/// Gamma'_{ij}^k = Gamma_{ij}^k - (theta_i delta_j^k + theta_j delta_i^k).
PolyConnection projective_shift(const PolyConnection& conn, const OneForm& theta);

/// Pointwise Weyl projective operator
/// W_{ijk}^l = R_{ijk}^l - (rho_{jk} delta_i^l - rho_{ik} delta_j^l) / (m - 1).
/// Requires m >= 3 and a symmetric Ricci field.
CurvatureField weyl_projective_field(const PolyConnection& conn);

/// Pushforward under the linear map y = g x:
/// Gamma'_{ij}^l(y) = g^l_d Gamma_{ab}^d(g^{-1} y) h^a_i h^b_j, h = g^{-1}.
PolyConnection transform(const PolyConnection& conn, const RationalMatrix& g);

/// First (1-based) index pair and monomial where a matrix field is nonzero.
std::optional<Witness> first_nonzero(const PolyMatrix& m);

}  // namespace affrep
