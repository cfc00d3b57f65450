#include "affrep/poly.hpp"

#include "affrep/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace affrep {

namespace {

constexpr std::uint64_t kHighBits = 0x8080808080808080ULL;

void check_dim(std::size_t dim) {
    if (dim == 0 || dim > Monomial::kMaxDim) {
        throw InvalidArgument("polynomial dimension must be in [1, " +
                              std::to_string(Monomial::kMaxDim) + "], got " +
                              std::to_string(dim));
    }
}

void check_index(std::size_t dim, std::size_t k) {
    if (k >= dim) {
        throw InvalidArgument("coordinate index " + std::to_string(k) +
                              " out of range for dimension " + std::to_string(dim));
    }
}

}  // namespace

// ---------------------------------------------------------------- Monomial

Monomial::Monomial(std::span<const unsigned> exponents) {
    if (exponents.size() > kMaxDim) throw InvalidArgument("too many exponents for a monomial");
    for (std::size_t k = 0; k < exponents.size(); ++k) {
        if (exponents[k] > kMaxExponent) throw InvalidArgument("exponent exceeds 255");
        packed_ |= static_cast<std::uint64_t>(exponents[k]) << shift(k);
    }
}

Monomial Monomial::unit(std::size_t k) {
    if (k >= kMaxDim) throw InvalidArgument("coordinate index out of range");
    return from_packed(std::uint64_t{1} << shift(k));
}

unsigned Monomial::degree() const {
    unsigned d = 0;
    for (std::uint64_t p = packed_; p != 0; p >>= 8) d += static_cast<unsigned>(p & 0xffu);
    return d;
}

std::vector<unsigned> Monomial::exponents(std::size_t dim) const {
    std::vector<unsigned> e(dim);
    for (std::size_t k = 0; k < dim; ++k) e[k] = exponent(k);
    return e;
}

Monomial Monomial::operator*(Monomial other) const {
    if (((packed_ | other.packed_) & kHighBits) != 0) {
        for (std::size_t k = 0; k < kMaxDim; ++k) {
            if (exponent(k) + other.exponent(k) > kMaxExponent) {
                throw InvalidArgument("monomial exponent overflow (> 255)");
            }
        }
    }
    return from_packed(packed_ + other.packed_);
}

bool canonical_less(Monomial a, Monomial b) {
    const unsigned da = a.degree();
    const unsigned db = b.degree();
    if (da != db) return da < db;
    return a.packed() > b.packed();
}

// ---------------------------------------------------------------- Poly

Poly::Poly(std::size_t dim) : dim_(dim) { check_dim(dim); }

Poly Poly::constant(std::size_t dim, const Rational& c) {
    Poly p(dim);
    if (c != 0) p.terms_.push_back({Monomial{}, c});
    return p;
}

Poly Poly::variable(std::size_t dim, std::size_t k) {
    Poly p(dim);
    check_index(dim, k);
    p.terms_.push_back({Monomial::unit(k), Rational(1)});
    return p;
}

Poly Poly::monomial(std::size_t dim, std::span<const unsigned> exponents, const Rational& c) {
    Poly p(dim);
    if (exponents.size() != dim) throw InvalidArgument("exponent vector length must equal dim");
    if (c != 0) p.terms_.push_back({Monomial(exponents), c});
    return p;
}

Poly Poly::from_terms(std::size_t dim, std::vector<Term> terms) {
    Poly p(dim);
    const std::uint64_t allowed = dim == Monomial::kMaxDim
                                      ? ~std::uint64_t{0}
                                      : ~((std::uint64_t{1} << Monomial::shift(dim - 1)) - 1);
    for (const auto& t : terms) {
        if ((t.monomial.packed() & ~allowed) != 0) {
            throw InvalidArgument("monomial uses a coordinate beyond dim");
        }
    }
    std::sort(terms.begin(), terms.end(),
              [](const Term& a, const Term& b) { return canonical_less(a.monomial, b.monomial); });
    for (auto& t : terms) {
        if (!p.terms_.empty() && p.terms_.back().monomial == t.monomial) {
            p.terms_.back().coef += t.coef;
        } else {
            p.terms_.push_back(std::move(t));
        }
    }
    std::erase_if(p.terms_, [](const Term& t) { return t.coef == 0; });
    return p;
}

Rational Poly::coefficient(std::span<const unsigned> exponents) const {
    if (exponents.size() != dim_) throw InvalidArgument("exponent vector length must equal dim");
    return coefficient(Monomial(exponents));
}

Rational Poly::coefficient(Monomial m) const {
    auto it = std::lower_bound(
        terms_.begin(), terms_.end(), m,
        [](const Term& t, Monomial key) { return canonical_less(t.monomial, key); });
    if (it != terms_.end() && it->monomial == m) return it->coef;
    return Rational(0);
}

int Poly::vanishing_order() const {
    // Canonical order starts at the lowest degree.
    return terms_.empty() ? kInfiniteOrder : static_cast<int>(terms_.front().monomial.degree());
}

int Poly::max_degree() const {
    return terms_.empty() ? -1 : static_cast<int>(terms_.back().monomial.degree());
}

bool Poly::is_homogeneous(unsigned degree) const {
    return std::all_of(terms_.begin(), terms_.end(),
                       [degree](const Term& t) { return t.monomial.degree() == degree; });
}

Poly Poly::truncate_below_degree(unsigned d) const {
    Poly p(dim_);
    for (const auto& t : terms_) {
        if (t.monomial.degree() >= d) p.terms_.push_back(t);
    }
    return p;
}

void Poly::check_same_dim(const Poly& other, const char* op) const {
    if (dim_ != other.dim_) {
        throw InvalidArgument(std::string("dimension mismatch in ") + op + ": " +
                              std::to_string(dim_) + " vs " + std::to_string(other.dim_));
    }
}

void Poly::merge(const Poly& other, bool subtract) {
    std::vector<Term> out;
    out.reserve(terms_.size() + other.terms_.size());
    auto a = terms_.begin();
    auto b = other.terms_.begin();
    while (a != terms_.end() || b != other.terms_.end()) {
        if (b == other.terms_.end() ||
            (a != terms_.end() && canonical_less(a->monomial, b->monomial))) {
            out.push_back(std::move(*a++));
        } else if (a == terms_.end() || canonical_less(b->monomial, a->monomial)) {
            out.push_back({b->monomial, subtract ? Rational(-b->coef) : b->coef});
            ++b;
        } else {
            Rational c = subtract ? Rational(a->coef - b->coef) : Rational(a->coef + b->coef);
            if (c != 0) out.push_back({a->monomial, std::move(c)});
            ++a;
            ++b;
        }
    }
    terms_ = std::move(out);
}

Poly& Poly::operator+=(const Poly& other) {
    check_same_dim(other, "addition");
    merge(other, false);
    return *this;
}

Poly& Poly::operator-=(const Poly& other) {
    check_same_dim(other, "subtraction");
    merge(other, true);
    return *this;
}

Poly& Poly::operator*=(const Rational& s) {
    if (s == 0) {
        terms_.clear();
    } else {
        for (auto& t : terms_) t.coef *= s;
    }
    return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
    a.check_same_dim(b, "multiplication");
    PolyAccumulator acc(a.dim_);
    acc.add_product(a, b);
    return acc.finish();
}

Poly Poly::operator-() const {
    Poly p = *this;
    for (auto& t : p.terms_) t.coef = -t.coef;
    return p;
}

Rational Poly::eval(std::span<const Rational> point) const {
    if (point.size() != dim_) {
        throw InvalidArgument("evaluation point has length " + std::to_string(point.size()) +
                              ", expected " + std::to_string(dim_));
    }
    Rational sum = 0;
    Rational term;
    for (const auto& t : terms_) {
        term = t.coef;
        for (std::size_t k = 0; k < dim_; ++k) {
            for (unsigned e = t.monomial.exponent(k); e > 0; --e) term *= point[k];
        }
        sum += term;
    }
    return sum;
}

double Poly::eval(std::span<const double> point) const {
    if (point.size() != dim_) {
        throw InvalidArgument("evaluation point has length " + std::to_string(point.size()) +
                              ", expected " + std::to_string(dim_));
    }
    double sum = 0.0;
    for (const auto& t : terms_) {
        double term = t.coef.get_d();
        for (std::size_t k = 0; k < dim_; ++k) {
            const unsigned e = t.monomial.exponent(k);
            if (e != 0) term *= std::pow(point[k], static_cast<int>(e));
        }
        sum += term;
    }
    return sum;
}

std::string Poly::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& t : terms_) {
        Rational c = t.coef;
        if (first) {
            if (c < 0) os << '-';
        } else {
            os << (c < 0 ? " - " : " + ");
        }
        c = abs(c);
        const bool is_const = t.monomial.packed() == 0;
        bool need_star = false;
        if (c != 1 || is_const) {
            os << affrep::to_string(c);
            need_star = true;
        }
        for (std::size_t k = 0; k < dim_; ++k) {
            const unsigned e = t.monomial.exponent(k);
            if (e == 0) continue;
            if (need_star) os << '*';
            os << 'x' << (k + 1);
            if (e > 1) os << '^' << e;
            need_star = true;
        }
        first = false;
    }
    return os.str();
}

// ---------------------------------------------------------------- calculus

Poly partial_derivative(const Poly& p, std::size_t k) {
    check_index(p.dim(), k);
    const Monomial unit = Monomial::unit(k);
    std::vector<Term> out;
    out.reserve(p.size());
    // Lowering one exponent by one preserves canonical order among survivors.
    for (const auto& t : p.terms()) {
        const unsigned e = t.monomial.exponent(k);
        if (e == 0) continue;
        out.push_back({Monomial::from_packed(t.monomial.packed() - unit.packed()),
                       t.coef * static_cast<unsigned long>(e)});
    }
    return Poly::from_terms(p.dim(), std::move(out));
}

Poly integrate(const Poly& p, std::size_t k) {
    check_index(p.dim(), k);
    const Monomial unit = Monomial::unit(k);
    std::vector<Term> out;
    out.reserve(p.size());
    for (const auto& t : p.terms()) {
        const unsigned e = t.monomial.exponent(k);
        Rational c = t.coef / static_cast<unsigned long>(e + 1);
        out.push_back({t.monomial * unit, std::move(c)});
    }
    return Poly::from_terms(p.dim(), std::move(out));
}

Poly substitute_linear(const Poly& p, std::span<const Rational> matrix) {
    const std::size_t m = p.dim();
    if (matrix.size() != m * m) throw InvalidArgument("substitution matrix must be dim x dim");
    std::vector<Poly> forms;
    forms.reserve(m);
    for (std::size_t c = 0; c < m; ++c) {
        Poly f(m);
        for (std::size_t w = 0; w < m; ++w) f += Poly::variable(m, w) * matrix[c * m + w];
        forms.push_back(std::move(f));
    }
    // powers[c][e] = forms[c]^e, grown on demand.
    std::vector<std::vector<Poly>> powers(m, std::vector<Poly>{Poly::constant(m, 1)});
    auto power = [&](std::size_t c, unsigned e) -> const Poly& {
        while (powers[c].size() <= e) powers[c].push_back(powers[c].back() * forms[c]);
        return powers[c][e];
    };
    PolyAccumulator acc(m);
    for (const auto& t : p.terms()) {
        Poly prod = Poly::constant(m, t.coef);
        for (std::size_t c = 0; c < m; ++c) {
            const unsigned e = t.monomial.exponent(c);
            if (e != 0) prod = prod * power(c, e);
        }
        acc.add(prod);
    }
    return acc.finish();
}

// ---------------------------------------------------------------- accumulator

PolyAccumulator::PolyAccumulator(std::size_t dim) : dim_(dim) { check_dim(dim); }

namespace {

__extension__ typedef __int128 Int128;
__extension__ typedef unsigned __int128 UInt128;

mpz_class from_int128(Int128 v) {
    const bool negative = v < 0;
    UInt128 u = negative ? -static_cast<UInt128>(v) : static_cast<UInt128>(v);
    mpz_class r = static_cast<unsigned long>(static_cast<std::uint64_t>(u >> 64));
    r <<= 64;
    r += static_cast<unsigned long>(static_cast<std::uint64_t>(u));
    return negative ? mpz_class(-r) : r;
}

}  // namespace

PolyAccumulator::IntegerForm PolyAccumulator::integer_form(const Poly& p) {
    IntegerForm f;
    f.dim = p.dim();
    f.den = 1;
    for (const auto& t : p.terms()) mpz_lcm(f.den.get_mpz_t(), f.den.get_mpz_t(), t.coef.get_den_mpz_t());
    f.nums.reserve(p.size());
    f.small.reserve(p.size());
    for (const auto& t : p.terms()) {
        mpz_class n = f.den / t.coef.get_den();
        n *= t.coef.get_num();
        if (f.fits_small && mpz_fits_slong_p(n.get_mpz_t())) {
            f.small.push_back(n.get_si());
        } else {
            f.fits_small = false;
        }
        f.nums.emplace_back(t.monomial.packed(), std::move(n));
    }
    if (!f.fits_small) f.small.clear();
    return f;
}

void PolyAccumulator::promote() {
    if (big_) return;
    nums_.reserve(small_.size());
    for (const auto& [key, v] : small_) nums_.emplace(key, from_int128(v));
    small_.clear();
    big_ = true;
}

void PolyAccumulator::rescale_to(const mpz_class& den) {
    if (den == den_) return;
    const mpz_class factor = den / den_;
    den_ = den;
    if (!big_ && mpz_fits_slong_p(factor.get_mpz_t())) {
        const Int128 f = factor.get_si();
        bool ok = true;
        for (const auto& [key, v] : small_) {
            Int128 scaled;
            ok = ok && !__builtin_mul_overflow(v, f, &scaled);
        }
        if (ok) {
            for (auto& [key, v] : small_) v *= f;
            return;
        }
    }
    promote();
    for (auto& [key, num] : nums_) num *= factor;
}

void PolyAccumulator::add(const Poly& p, const Rational& scale) {
    if (p.dim() != dim_) throw InvalidArgument("dimension mismatch in accumulation");
    if (p.is_zero() || scale == 0) return;
    IntegerForm one;
    one.dim = dim_;
    one.den = 1;
    one.nums.emplace_back(0, mpz_class(1));
    one.small.push_back(1);
    add_product(integer_form(p), one, scale);
}

void PolyAccumulator::add_product(const Poly& a, const Poly& b, const Rational& scale) {
    if (a.is_zero() || b.is_zero() || scale == 0) {
        if (a.dim() != dim_ || b.dim() != dim_) throw InvalidArgument("dimension mismatch in accumulation");
        return;
    }
    add_product(integer_form(a), integer_form(b), scale);
}

void PolyAccumulator::add_product(const IntegerForm& fa, const IntegerForm& fb, const Rational& scale) {
    if (fa.dim != dim_ || fb.dim != dim_) {
        throw InvalidArgument("dimension mismatch in accumulation");
    }
    if (fa.is_zero() || fb.is_zero() || scale == 0) return;
    Rational s = scale / Rational(fa.den * fb.den);
    mpz_class target;
    mpz_lcm(target.get_mpz_t(), den_.get_mpz_t(), s.get_den_mpz_t());
    rescale_to(target);
    const mpz_class factor = s.get_num() * (den_ / s.get_den());

    const bool small_inputs = fa.fits_small && fb.fits_small && mpz_fits_slong_p(factor.get_mpz_t());
    const Int128 f = small_inputs ? factor.get_si() : 0;
    mpz_class scaled;
    for (std::size_t ia = 0; ia < fa.nums.size(); ++ia) {
        const Monomial ma = Monomial::from_packed(fa.nums[ia].first);
        Int128 sa = 0;
        bool sa_ok = small_inputs && !big_ && !__builtin_mul_overflow(static_cast<Int128>(fa.small[ia]), f, &sa);
        bool scaled_ready = false;
        for (std::size_t ib = 0; ib < fb.nums.size(); ++ib) {
            const std::uint64_t key = (ma * Monomial::from_packed(fb.nums[ib].first)).packed();
            if (sa_ok && !big_) {
                Int128 term;
                if (!__builtin_mul_overflow(sa, static_cast<Int128>(fb.small[ib]), &term)) {
                    Int128& v = small_[key];
                    Int128 sum;
                    if (!__builtin_add_overflow(v, term, &sum)) {
                        v = sum;
                        continue;
                    }
                }
            }
            promote();
            if (!scaled_ready) {
                scaled = fa.nums[ia].second * factor;
                scaled_ready = true;
            }
            mpz_addmul(nums_[key].get_mpz_t(), scaled.get_mpz_t(), fb.nums[ib].second.get_mpz_t());
        }
    }
}

Poly PolyAccumulator::finish() const {
    std::vector<std::pair<Monomial, mpz_class>> live;
    if (big_) {
        live.reserve(nums_.size());
        for (const auto& [key, num] : nums_)
            if (num != 0) live.emplace_back(Monomial::from_packed(key), num);
    } else {
        live.reserve(small_.size());
        for (const auto& [key, v] : small_)
            if (v != 0) live.emplace_back(Monomial::from_packed(key), from_int128(v));
    }
    std::sort(live.begin(), live.end(),
              [](const auto& a, const auto& b) { return canonical_less(a.first, b.first); });
    Poly p(dim_);
    p.terms_.reserve(live.size());
    for (auto& [mono, num] : live) {
        Term& t = p.terms_.emplace_back();
        t.monomial = mono;
        mpq_set_num(t.coef.get_mpq_t(), num.get_mpz_t());
        mpq_set_den(t.coef.get_mpq_t(), den_.get_mpz_t());
        t.coef.canonicalize();
    }
    return p;
}

}  // namespace affrep
