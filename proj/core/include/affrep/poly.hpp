#pragma once

#include "affrep/rational.hpp"

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace affrep {

/// Vanishing order of the zero polynomial. Compares greater than every
/// finite order, so `vanishing_order(p) >= n` reads naturally.
inline constexpr int kInfiniteOrder = std::numeric_limits<int>::max();

/// Exponent vector x^{e_1} ... x^{e_m}, packed one byte per coordinate with
/// coordinate 0 in the most significant byte. Integer comparison of the
/// packed word is then lexicographic comparison of the exponent vectors.
class Monomial {
public:
    static constexpr std::size_t kMaxDim = 8;
    static constexpr unsigned kMaxExponent = 255;

    constexpr Monomial() = default;
    explicit Monomial(std::span<const unsigned> exponents);

    static constexpr Monomial from_packed(std::uint64_t packed) {
        Monomial m;
        m.packed_ = packed;
        return m;
    }
    static Monomial unit(std::size_t k);

    constexpr std::uint64_t packed() const { return packed_; }
    unsigned exponent(std::size_t k) const {
        return static_cast<unsigned>((packed_ >> shift(k)) & 0xffu);
    }
    unsigned degree() const;
    std::vector<unsigned> exponents(std::size_t dim) const;

    /// Product of monomials; throws InvalidArgument on exponent overflow.
    Monomial operator*(Monomial other) const;

    friend constexpr bool operator==(Monomial a, Monomial b) { return a.packed_ == b.packed_; }

    static constexpr unsigned shift(std::size_t k) { return static_cast<unsigned>(56 - 8 * k); }

private:
    std::uint64_t packed_ = 0;
};

/// Canonical term order: ascending total degree, then descending
/// lexicographic (x1^2 < x1 x2 < x2^2 within degree 2).
bool canonical_less(Monomial a, Monomial b);

struct Term {
    Monomial monomial;
    Rational coef;

    friend bool operator==(const Term&, const Term&) = default;
};

/// Sparse polynomial in m variables with rational coefficients. Terms are
/// kept in canonical order and no stored coefficient is zero; the zero
/// polynomial has no terms.
class Poly {
public:
    Poly() = default;
    explicit Poly(std::size_t dim);

    static Poly constant(std::size_t dim, const Rational& c);
    /// The coordinate function x^k (0-based k).
    static Poly variable(std::size_t dim, std::size_t k);
    static Poly monomial(std::size_t dim, std::span<const unsigned> exponents, const Rational& c);
    /// Builds from arbitrary (possibly repeated, possibly zero) terms.
    static Poly from_terms(std::size_t dim, std::vector<Term> terms);

    std::size_t dim() const { return dim_; }
    const std::vector<Term>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }

    Rational coefficient(std::span<const unsigned> exponents) const;
    Rational coefficient(Monomial m) const;

    /// Minimal total degree of a stored term; kInfiniteOrder for zero.
    int vanishing_order() const;
    /// Maximal total degree; -1 for zero.
    int max_degree() const;
    bool is_homogeneous(unsigned degree) const;

    Poly truncate_below_degree(unsigned d) const;

    Poly& operator+=(const Poly& other);
    Poly& operator-=(const Poly& other);
    Poly& operator*=(const Rational& s);

    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator*(const Poly& a, const Poly& b);
    friend Poly operator*(Poly a, const Rational& s) { return a *= s; }
    friend Poly operator*(const Rational& s, Poly a) { return a *= s; }
    Poly operator-() const;

    friend bool operator==(const Poly& a, const Poly& b) {
        return a.dim_ == b.dim_ && a.terms_ == b.terms_;
    }

    Rational eval(std::span<const Rational> point) const;
    double eval(std::span<const double> point) const;

    /// Human-readable form, e.g. "2/9*x1^2*x2 - x3". Coordinates are 1-based.
    std::string to_string() const;

private:
    void check_same_dim(const Poly& other, const char* op) const;
    void merge(const Poly& other, bool subtract);

    std::size_t dim_ = 0;
    std::vector<Term> terms_;

    friend class PolyAccumulator;
};

Poly partial_derivative(const Poly& p, std::size_t k);

/// Coordinate antiderivative along x^k: x^k * integral_0^1 p(..., t x^k, ...) dt.
/// On a monomial with exponent a in x^k this multiplies by x^k / (a + 1), so
/// partial_derivative(integrate(p, k), k) == p and the vanishing order
/// rises by exactly one.
Poly integrate(const Poly& p, std::size_t k);

/// Substitutes x^c = sum_w M[c][w] y^w, where M is dim x dim row-major.
Poly substitute_linear(const Poly& p, std::span<const Rational> matrix);

/// Integer-numerator accumulator for sums of scaled products. Avoids the
/// gcd normalisation of rational addition on every term, which dominates
/// the cost of the curvature contractions.
class PolyAccumulator {
public:
    /// p written as (integer numerators) / den; reusable across products.
    struct IntegerForm {
        std::size_t dim = 0;
        mpz_class den;
        std::vector<std::pair<std::uint64_t, mpz_class>> nums;
        // Copy of the numerators when all of them fit in 64 bits.
        std::vector<std::int64_t> small;
        bool fits_small = true;

        bool is_zero() const { return nums.empty(); }
    };
    static IntegerForm integer_form(const Poly& p);

    explicit PolyAccumulator(std::size_t dim);

    void add(const Poly& p, const Rational& scale = Rational(1));
    void add_product(const Poly& a, const Poly& b, const Rational& scale = Rational(1));
    void add_product(const IntegerForm& a, const IntegerForm& b, const Rational& scale = Rational(1));

    Poly finish() const;

private:
    __extension__ typedef __int128 Int128;

    struct Hash {
        std::size_t operator()(std::uint64_t k) const noexcept {
            k ^= k >> 33;
            k *= 0xff51afd7ed558ccdULL;
            k ^= k >> 33;
            return static_cast<std::size_t>(k);
        }
    };

    void rescale_to(const mpz_class& den);
    // Moves the 128-bit numerators to GMP integers; used on overflow.
    void promote();

    std::size_t dim_;
    mpz_class den_ = 1;
    bool big_ = false;
    std::unordered_map<std::uint64_t, Int128, Hash> small_;
    std::unordered_map<std::uint64_t, mpz_class, Hash> nums_;
};

}  // namespace affrep
