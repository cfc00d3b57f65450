#pragma once

#include "affrep/connection.hpp"
#include "affrep/curvature_space.hpp"
#include "affrep/report.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace affrep {

/// Gamma_{uv}^l = (1/3)(A_{wuv}^l + A_{wvu}^l) x^w. Torsion free, vanishes at
/// the origin and has curvature A there. Throws ClassViolation if A is not
/// a curvature operator.
PolyConnection represent_generic(const CurvatureOperator& a);

/// Same construction, restricted to equiaffine A; the result then has a
/// closed omega. Throws ClassViolation with the Ricci asymmetry otherwise.
PolyConnection represent_equiaffine(const CurvatureOperator& a);

/// theta_v = rho0(v,j) x^j / (1 - m). Closed, vanishes at 0, and the
/// connection theta_i delta_j^k + theta_j delta_i^k has Ricci tensor rho0 at 0.
OneForm theta_from_ricci(const RationalMatrix& rho0);

/// Projectively flat equiaffine connection with curvature A at the origin.
/// Requires m >= 3 and weyl_projective(A) == 0.
PolyConnection represent_proj_flat(const CurvatureOperator& a);

/// Symmetric table k(i,j) = k(j,i) with k(i,j) outside {i, j}: the smallest
/// such index. Requires m >= 3.
class KTable {
public:
    KTable() = default;
    explicit KTable(std::size_t dim);
    /// Takes an explicit table; throws if it is asymmetric or k(i,j) hits i or j.
    KTable(std::size_t dim, std::vector<std::size_t> entries);

    std::size_t dim() const { return dim_; }
    std::size_t operator()(std::size_t i, std::size_t j) const { return k_[i * dim_ + j]; }

    friend bool operator==(const KTable&, const KTable&) = default;

private:
    std::size_t dim_ = 0;
    std::vector<std::size_t> k_;
};

KTable choose_k_indices(std::size_t m);

/// Layers Gamma_1, Gamma_3, ..., Gamma_{2N-1} of the Ricci-flat power
/// series, with Theta_2, ..., Theta_{2N}. Theta_{2N} is one step past the
/// last layer and equals minus the Ricci field of the truncation.
struct RicciFlatSeries {
    std::size_t dim = 0;
    KTable k_table;
    std::vector<PolyConnection> layers;
    std::vector<PolyMatrix> thetas;

    std::size_t order() const { return layers.size(); }
    /// T_N = Gamma_1 + ... + Gamma_{2N-1}.
    PolyConnection truncation() const;
    /// T_n for n <= order().
    PolyConnection truncation(std::size_t n) const;

    friend bool operator==(const RicciFlatSeries&, const RicciFlatSeries&) = default;
};

/// Builds N layers of the series for a Ricci-flat A (m >= 3, N >= 1):
///   Gamma_1 from the linear construction,
///   Theta_{2v,ij} = G_{2v-1,in}^l G_{2v-1,jl}^n
///                   + sum_{u<v} (G_{2v-1,in}^l G_{2u-1,jl}^n + G_{2u-1,in}^l G_{2v-1,jl}^n),
///   Gamma_{2v+1,ij}^l = delta(l, k_ij) integrate(Theta_{2v,ij}, k_ij).
RicciFlatSeries ricci_flat_series(const CurvatureOperator& a, std::size_t n_layers);
RicciFlatSeries ricci_flat_series(const CurvatureOperator& a, std::size_t n_layers, const KTable& k);

/// The truncation T_N of ricci_flat_series(a, N).
PolyConnection represent_ricci_flat(const CurvatureOperator& a, std::size_t n_layers);

/// Constants for the geometric bound ||Gamma_{2v-1}(x)|| <= C^v |x|^{2v-1}
/// on |x| <= epsilon, with |x| the sup norm and
/// ||Gamma(x)|| = m * max_{i,j,l} |Gamma_{ij}^l(x)|.
struct ConvergenceParams {
    double c1 = 1.0;       // >= 1, bound on ||Gamma_1|| on the unit sphere
    double c = 4.0;        // 4 * c1
    double epsilon = 0.125;  // 1 / (8 * c1)
    std::string norm = "m*max|Gamma_ij^l(x)|, |x| = max_i |x^i|";
};

struct LayerEstimate {
    std::size_t nu = 0;
    double max_ratio = 0.0;
    std::size_t violations = 0;
};

struct ConvergenceReport {
    ConvergenceParams params;
    std::size_t samples = 0;
    double slack = 0.0;
    std::vector<LayerEstimate> per_layer;

    std::size_t total_violations() const;
    bool pass() const { return total_violations() == 0; }
};

/// c1 = m * max_{ij,l} sum_w |coefficient of x^w in Gamma_{1,ij}^l|, clamped to >= 1.
ConvergenceParams convergence_params(const RicciFlatSeries& series);

/// Samples `samples` points with sup norm r * epsilon, r cycling through
/// `radius_grid` (fractions in (0, 1]), directions drawn from the seed.
ConvergenceReport convergence_report(const RicciFlatSeries& series, std::size_t samples,
                                     std::uint64_t seed,
                                     std::vector<double> radius_grid = {1.0, 0.75, 0.5, 0.25, 0.1},
                                     double slack = 1e-9);

/// The Ricci-flat operator in m = 3 whose nonzero components are
/// A_{211}^2 = 1, A_{121}^2 = -1, A_{311}^3 = -1, A_{131}^3 = 1 (1-based).
CurvatureOperator remark6_operator();

/// Shows the linear construction is not Ricci flat for this operator and
/// that the series removes the defect to order 2N for N = 1..max_order.
VerificationReport remark6_demo(std::size_t max_order = 4);

enum class Construction { Thm1, Thm3, Thm4, Thm5 };
std::string_view to_string(Construction c);
/// Accepts "thm1", "thm3", "thm4", "thm5".
Construction parse_construction(std::string_view name);

/// Runs the construction (thm5 truncated at n_layers).
PolyConnection construct(Construction method, const CurvatureOperator& a, std::size_t n_layers = 2);

struct EquivarianceResult {
    bool equivariant = false;
    std::string action;  // the group action used, for auditing
};

/// Compares construct(g.A) with g.construct(A), exactly. Operators move by
/// the tensor action, connections by pushforward along y = g x.
EquivarianceResult equivariance_probe(const CurvatureOperator& a, const RationalMatrix& g,
                                      Construction method, std::size_t n_layers = 2);

/// Random invertible integer matrix with entries in [-2, 2].
RationalMatrix random_invertible_matrix(std::size_t m, std::uint64_t seed);

}  // namespace affrep
