#pragma once

#include "affrep/linalg.hpp"
#include "affrep/rational.hpp"
#include "affrep/report.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace affrep {

/// Classes of algebraic curvature operators.
///   Generic           all operators with the curvature symmetries
///   Equiaffine        symmetric Ricci tensor
///   ProjectivelyFlat  the S^2(V*) summand: vanishing Weyl projective part
///   RicciFlat         the ker(rho) summand
enum class OperatorClass { Generic, Equiaffine, ProjectivelyFlat, RicciFlat };

std::string_view to_string(OperatorClass c);
/// Accepts "generic", "equiaffine", "proj-flat", "ricci-flat".
OperatorClass parse_operator_class(std::string_view name);

/// Rank-(3,1) rational tensor with A(e_i, e_j) e_k = A(i,j,k,l) e_l, stored
/// densely. Indices are 0-based. Whether the tensor actually has curvature
/// symmetries is checked by validate(), not enforced here, so the same type
/// carries raw tensors into project_to_curvature_space().
class CurvatureOperator {
public:
    CurvatureOperator() = default;
    explicit CurvatureOperator(std::size_t dim);

    std::size_t dim() const { return dim_; }

    Rational& operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
        return data_[index(i, j, k, l)];
    }
    const Rational& operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
        return data_[index(i, j, k, l)];
    }
    const std::vector<Rational>& components() const { return data_; }

    bool is_zero() const;

    CurvatureOperator& operator+=(const CurvatureOperator& other);
    CurvatureOperator& operator-=(const CurvatureOperator& other);
    CurvatureOperator& operator*=(const Rational& s);
    friend CurvatureOperator operator+(CurvatureOperator a, const CurvatureOperator& b) { return a += b; }
    friend CurvatureOperator operator-(CurvatureOperator a, const CurvatureOperator& b) { return a -= b; }
    friend CurvatureOperator operator*(const Rational& s, CurvatureOperator a) { return a *= s; }
    friend bool operator==(const CurvatureOperator&, const CurvatureOperator&) = default;

private:
    std::size_t index(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
        return ((i * dim_ + j) * dim_ + k) * dim_ + l;
    }

    std::size_t dim_ = 0;
    std::vector<Rational> data_;
};

/// Checks antisymmetry in the first two slots and the first Bianchi
/// identity; each failure carries its (1-based) index quadruple.
VerificationReport validate(const CurvatureOperator& a);
bool is_curvature_operator(const CurvatureOperator& a);

/// Antisymmetrizes in (i,j), then removes the cyclic (Bianchi) part. The
/// result is valid, the map is idempotent, and it fixes valid operators.
CurvatureOperator project_to_curvature_space(const CurvatureOperator& raw);

/// rho(j,k) = sum_i A(i,j,k,i).
RationalMatrix ricci(const CurvatureOperator& a);

/// T(i,j) = sum_l A(i,j,l,l). For valid A this equals rho^T - rho.
RationalMatrix trace_two_form(const CurvatureOperator& a);

bool is_equiaffine(const CurvatureOperator& a);
bool is_ricci_flat(const CurvatureOperator& a);

/// A(i,j,k,l) = (rho0(j,k) delta(i,l) - rho0(i,k) delta(j,l)) / (m - 1).
/// Lands in the S^2 summand with ricci(result) == rho0.
CurvatureOperator ricci_block(const RationalMatrix& rho0);

/// Weyl projective operator A - ricci_block(ricci(A)). Requires m >= 3 and
/// an equiaffine A; throws InvalidArgument / ClassViolation otherwise.
CurvatureOperator weyl_projective(const CurvatureOperator& a);

struct EquiaffineSplit {
    CurvatureOperator ricci_part;  // in S^2(V*)
    CurvatureOperator weyl_part;   // in ker(rho)
};

EquiaffineSplit decompose_equiaffine(const CurvatureOperator& a);

/// Deterministic per (m, class, seed). Generic and Equiaffine need m >= 2,
/// ProjectivelyFlat m >= 2, RicciFlat m >= 3.
CurvatureOperator random_operator(std::size_t m, OperatorClass cls, std::uint64_t seed);

/// Random symmetric integer matrix with entries in [-3, 3].
RationalMatrix random_symmetric_matrix(std::size_t m, std::uint64_t seed);

/// Dimension of the class as a vector space, computed by rational rank
/// reduction of its defining linear constraints. 2 <= m <= 6.
std::size_t space_dimension(std::size_t m, OperatorClass cls);

/// Rational basis of the equiaffine operators in dimension m (cached).
const std::vector<CurvatureOperator>& equiaffine_basis(std::size_t m);

/// Tensor action of g in GL(m): (g.A)(i,j,k,l) = g^l_d A(a,b,c,d) h^a_i h^b_j h^c_k
/// with h = g^{-1}.
CurvatureOperator transform(const CurvatureOperator& a, const RationalMatrix& g);

}  // namespace affrep
