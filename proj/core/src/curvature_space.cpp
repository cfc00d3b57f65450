#include "affrep/curvature_space.hpp"

#include "affrep/error.hpp"

#include <array>
#include <mutex>
#include <random>
#include <string>

namespace affrep {

std::string_view to_string(OperatorClass c) {
    switch (c) {
        case OperatorClass::Generic: return "generic";
        case OperatorClass::Equiaffine: return "equiaffine";
        case OperatorClass::ProjectivelyFlat: return "proj-flat";
        case OperatorClass::RicciFlat: return "ricci-flat";
    }
    return "unknown";
}

OperatorClass parse_operator_class(std::string_view name) {
    if (name == "generic") return OperatorClass::Generic;
    if (name == "equiaffine") return OperatorClass::Equiaffine;
    if (name == "proj-flat") return OperatorClass::ProjectivelyFlat;
    if (name == "ricci-flat") return OperatorClass::RicciFlat;
    throw InvalidArgument("unknown operator class '" + std::string(name) +
                          "' (expected generic, equiaffine, proj-flat, ricci-flat)");
}

CurvatureOperator::CurvatureOperator(std::size_t dim)
    : dim_(dim), data_(dim * dim * dim * dim, Rational(0)) {
    if (dim < 2) throw InvalidArgument("curvature operators need dimension >= 2");
}

bool CurvatureOperator::is_zero() const {
    for (const auto& x : data_) {
        if (x != 0) return false;
    }
    return true;
}

CurvatureOperator& CurvatureOperator::operator+=(const CurvatureOperator& other) {
    if (dim_ != other.dim_) throw InvalidArgument("operator dimension mismatch");
    for (std::size_t n = 0; n < data_.size(); ++n) data_[n] += other.data_[n];
    return *this;
}

CurvatureOperator& CurvatureOperator::operator-=(const CurvatureOperator& other) {
    if (dim_ != other.dim_) throw InvalidArgument("operator dimension mismatch");
    for (std::size_t n = 0; n < data_.size(); ++n) data_[n] -= other.data_[n];
    return *this;
}

CurvatureOperator& CurvatureOperator::operator*=(const Rational& s) {
    for (auto& x : data_) x *= s;
    return *this;
}

namespace {

Witness quad_witness(std::size_t i, std::size_t j, std::size_t k, std::size_t l,
                     const Rational& value) {
    return Witness{{static_cast<int>(i + 1), static_cast<int>(j + 1), static_cast<int>(k + 1),
                    static_cast<int>(l + 1)},
                   "",
                   to_string(value)};
}

Witness pair_witness(std::size_t i, std::size_t j, const Rational& value) {
    return Witness{{static_cast<int>(i + 1), static_cast<int>(j + 1)}, "", to_string(value)};
}

// Finds the first (j,k) with rho(j,k) != rho(k,j).
std::optional<Witness> ricci_asymmetry(const RationalMatrix& rho) {
    for (std::size_t j = 0; j < rho.rows(); ++j) {
        for (std::size_t k = j + 1; k < rho.cols(); ++k) {
            if (rho(j, k) != rho(k, j)) return pair_witness(j, k, rho(j, k) - rho(k, j));
        }
    }
    return std::nullopt;
}

}  // namespace

VerificationReport validate(const CurvatureOperator& a) {
    const std::size_t m = a.dim();
    VerificationReport report;
    report.metadata().dim = m;

    std::optional<Witness> antisym;
    std::optional<Witness> bianchi;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            for (std::size_t k = 0; k < m; ++k) {
                for (std::size_t l = 0; l < m; ++l) {
                    if (!antisym) {
                        Rational s = a(i, j, k, l) + a(j, i, k, l);
                        if (s != 0) antisym = quad_witness(i, j, k, l, s);
                    }
                    if (!bianchi) {
                        Rational s = a(i, j, k, l) + a(j, k, i, l) + a(k, i, j, l);
                        if (s != 0) bianchi = quad_witness(i, j, k, l, s);
                    }
                }
            }
        }
    }
    report.record("antisymmetry", !antisym, antisym.value_or(Witness{}));
    report.record("first_bianchi", !bianchi, bianchi.value_or(Witness{}));
    return report;
}

bool is_curvature_operator(const CurvatureOperator& a) { return validate(a).all_pass(); }

CurvatureOperator project_to_curvature_space(const CurvatureOperator& raw) {
    const std::size_t m = raw.dim();
    CurvatureOperator anti(m);
    const Rational half(1, 2);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t k = 0; k < m; ++k)
                for (std::size_t l = 0; l < m; ++l)
                    anti(i, j, k, l) = half * (raw(i, j, k, l) - raw(j, i, k, l));

    // The cyclic sum of an (i,j)-antisymmetric tensor is totally
    // antisymmetric, so subtracting a third of it keeps antisymmetry.
    CurvatureOperator out(m);
    const Rational third(1, 3);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t k = 0; k < m; ++k)
                for (std::size_t l = 0; l < m; ++l) {
                    Rational cyc = anti(i, j, k, l) + anti(j, k, i, l) + anti(k, i, j, l);
                    out(i, j, k, l) = anti(i, j, k, l) - third * cyc;
                }
    return out;
}

RationalMatrix ricci(const CurvatureOperator& a) {
    const std::size_t m = a.dim();
    RationalMatrix rho(m, m);
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = 0; k < m; ++k)
            for (std::size_t i = 0; i < m; ++i) rho(j, k) += a(i, j, k, i);
    return rho;
}

RationalMatrix trace_two_form(const CurvatureOperator& a) {
    const std::size_t m = a.dim();
    RationalMatrix t(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t l = 0; l < m; ++l) t(i, j) += a(i, j, l, l);
    return t;
}

bool is_equiaffine(const CurvatureOperator& a) { return ricci(a).is_symmetric(); }

bool is_ricci_flat(const CurvatureOperator& a) { return ricci(a).is_zero(); }

CurvatureOperator ricci_block(const RationalMatrix& rho0) {
    if (!rho0.is_square()) throw InvalidArgument("Ricci matrix must be square");
    const std::size_t m = rho0.rows();
    if (m < 2) throw InvalidArgument("ricci_block needs m >= 2");
    if (auto w = ricci_asymmetry(rho0)) {
        throw ClassViolation("ricci_block needs a symmetric matrix",
                             "rho(" + std::to_string(w->indices[0]) + "," +
                                 std::to_string(w->indices[1]) + ") - transpose = " + w->value);
    }
    const Rational scale(1, static_cast<long>(m - 1));
    CurvatureOperator a(m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t k = 0; k < m; ++k) {
                // delta(i,l) term lands at l = i, delta(j,l) term at l = j.
                a(i, j, k, i) += scale * rho0(j, k);
                a(i, j, k, j) -= scale * rho0(i, k);
            }
    return a;
}

CurvatureOperator weyl_projective(const CurvatureOperator& a) {
    if (a.dim() < 3) {
        throw InvalidArgument("the Weyl projective operator needs m >= 3 (ker rho = 0 when m = 2)");
    }
    const RationalMatrix rho = ricci(a);
    if (auto w = ricci_asymmetry(rho)) {
        throw ClassViolation("operator is not equiaffine",
                             "rho(" + std::to_string(w->indices[0]) + "," +
                                 std::to_string(w->indices[1]) + ") - rho(" +
                                 std::to_string(w->indices[1]) + "," +
                                 std::to_string(w->indices[0]) + ") = " + w->value);
    }
    return a - ricci_block(rho);
}

EquiaffineSplit decompose_equiaffine(const CurvatureOperator& a) {
    CurvatureOperator weyl = weyl_projective(a);
    return {ricci_block(ricci(a)), std::move(weyl)};
}

// ---------------------------------------------------------------- rank machinery

namespace {

constexpr std::size_t kMaxRankDim = 6;

std::size_t flat(std::size_t m, std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
    return ((i * m + j) * m + k) * m + l;
}

void add_curvature_constraints(RowEchelon& ech, std::size_t m) {
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j)
            for (std::size_t k = 0; k < m; ++k)
                for (std::size_t l = 0; l < m; ++l) {
                    SparseRow row;
                    row[flat(m, i, j, k, l)] += 1;
                    row[flat(m, j, i, k, l)] += 1;
                    ech.insert(std::move(row));
                }
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t k = 0; k < m; ++k)
                for (std::size_t l = 0; l < m; ++l) {
                    SparseRow row;
                    row[flat(m, i, j, k, l)] += 1;
                    row[flat(m, j, k, i, l)] += 1;
                    row[flat(m, k, i, j, l)] += 1;
                    ech.insert(std::move(row));
                }
}

// rho(j,k) - rho(k,j) = 0 for j < k.
void add_ricci_symmetry_constraints(RowEchelon& ech, std::size_t m) {
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = j + 1; k < m; ++k) {
            SparseRow row;
            for (std::size_t i = 0; i < m; ++i) {
                row[flat(m, i, j, k, i)] += 1;
                row[flat(m, i, k, j, i)] -= 1;
            }
            ech.insert(std::move(row));
        }
}

void add_ricci_zero_constraints(RowEchelon& ech, std::size_t m) {
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = 0; k < m; ++k) {
            SparseRow row;
            for (std::size_t i = 0; i < m; ++i) row[flat(m, i, j, k, i)] += 1;
            ech.insert(std::move(row));
        }
}

void check_rank_dim(std::size_t m) {
    if (m < 2 || m > kMaxRankDim) {
        throw InvalidArgument("space dimensions are computed for 2 <= m <= 6, got m = " +
                              std::to_string(m));
    }
}

std::uint64_t draw(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
    return static_cast<std::uint64_t>(lo) +
           rng() % static_cast<std::uint64_t>(hi - lo + 1);
}

Rational draw_int(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
    return Rational(static_cast<long>(static_cast<std::int64_t>(draw(rng, lo, hi))));
}

}  // namespace

std::size_t space_dimension(std::size_t m, OperatorClass cls) {
    check_rank_dim(m);
    const std::size_t unknowns = m * m * m * m;
    if (cls == OperatorClass::ProjectivelyFlat) {
        // Image of the symmetric matrices under ricci_block.
        RowEchelon ech(unknowns);
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = a; b < m; ++b) {
                RationalMatrix e(m, m);
                e(a, b) = 1;
                e(b, a) = 1;
                const CurvatureOperator op = ricci_block(e);
                SparseRow row;
                for (std::size_t n = 0; n < unknowns; ++n) {
                    if (op.components()[n] != 0) row[n] = op.components()[n];
                }
                ech.insert(std::move(row));
            }
        return ech.rank();
    }
    RowEchelon ech(unknowns);
    add_curvature_constraints(ech, m);
    if (cls == OperatorClass::Equiaffine) add_ricci_symmetry_constraints(ech, m);
    if (cls == OperatorClass::RicciFlat) add_ricci_zero_constraints(ech, m);
    return unknowns - ech.rank();
}

const std::vector<CurvatureOperator>& equiaffine_basis(std::size_t m) {
    check_rank_dim(m);
    static std::array<std::once_flag, kMaxRankDim + 1> once;
    static std::array<std::vector<CurvatureOperator>, kMaxRankDim + 1> cache;
    std::call_once(once[m], [m] {
        RowEchelon ech(m * m * m * m);
        add_curvature_constraints(ech, m);
        add_ricci_symmetry_constraints(ech, m);
        std::vector<CurvatureOperator> basis;
        for (const auto& v : ech.nullspace()) {
            CurvatureOperator op(m);
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < m; ++j)
                    for (std::size_t k = 0; k < m; ++k)
                        for (std::size_t l = 0; l < m; ++l) op(i, j, k, l) = v[flat(m, i, j, k, l)];
            basis.push_back(std::move(op));
        }
        cache[m] = std::move(basis);
    });
    return cache[m];
}

RationalMatrix random_symmetric_matrix(std::size_t m, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    RationalMatrix s(m, m);
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a; b < m; ++b) {
            s(a, b) = draw_int(rng, -3, 3);
            s(b, a) = s(a, b);
        }
    return s;
}

CurvatureOperator random_operator(std::size_t m, OperatorClass cls, std::uint64_t seed) {
    if (m < 2) throw InvalidArgument("curvature operators need dimension >= 2");
    switch (cls) {
        case OperatorClass::Generic: {
            if (m > 8) throw InvalidArgument("random operators are generated for m <= 8");
            std::mt19937_64 rng(seed);
            CurvatureOperator raw(m);
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < m; ++j)
                    for (std::size_t k = 0; k < m; ++k)
                        for (std::size_t l = 0; l < m; ++l) raw(i, j, k, l) = draw_int(rng, -3, 3);
            return project_to_curvature_space(raw);
        }
        case OperatorClass::Equiaffine: {
            const auto& basis = equiaffine_basis(m);
            std::mt19937_64 rng(seed);
            CurvatureOperator a(m);
            for (const auto& b : basis) {
                const Rational c = draw_int(rng, -2, 2);
                if (c != 0) a += c * b;
            }
            return a;
        }
        case OperatorClass::ProjectivelyFlat:
            return ricci_block(random_symmetric_matrix(m, seed));
        case OperatorClass::RicciFlat:
            if (m < 3) {
                throw InvalidArgument("ricci-flat operators need m >= 3 (ker rho = 0 when m = 2)");
            }
            return weyl_projective(random_operator(m, OperatorClass::Equiaffine, seed));
    }
    throw InvalidArgument("unsupported operator class");
}

CurvatureOperator transform(const CurvatureOperator& a, const RationalMatrix& g) {
    const std::size_t m = a.dim();
    if (g.rows() != m || g.cols() != m) throw InvalidArgument("group element has wrong shape");
    const RationalMatrix h = inverse(g);
    // Contract one slot at a time: O(m^5) instead of O(m^8).
    CurvatureOperator t1(m), t2(m), t3(m), out(m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t b = 0; b < m; ++b)
            for (std::size_t c = 0; c < m; ++c)
                for (std::size_t d = 0; d < m; ++d)
                    for (std::size_t x = 0; x < m; ++x) {
                        if (h(x, i) != 0) t1(i, b, c, d) += a(x, b, c, d) * h(x, i);
                    }
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t c = 0; c < m; ++c)
                for (std::size_t d = 0; d < m; ++d)
                    for (std::size_t x = 0; x < m; ++x) {
                        if (h(x, j) != 0) t2(i, j, c, d) += t1(i, x, c, d) * h(x, j);
                    }
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t k = 0; k < m; ++k)
                for (std::size_t d = 0; d < m; ++d)
                    for (std::size_t x = 0; x < m; ++x) {
                        if (h(x, k) != 0) t3(i, j, k, d) += t2(i, j, x, d) * h(x, k);
                    }
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t k = 0; k < m; ++k)
                for (std::size_t l = 0; l < m; ++l)
                    for (std::size_t x = 0; x < m; ++x) {
                        if (g(l, x) != 0) out(i, j, k, l) += g(l, x) * t3(i, j, k, x);
                    }
    return out;
}

}  // namespace affrep
