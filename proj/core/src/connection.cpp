#include "affrep/connection.hpp"

#include "affrep/error.hpp"

#include <algorithm>
#include <string>

namespace affrep {

namespace {

Witness poly_witness(std::vector<int> indices, const Poly& p) {
    Witness w{std::move(indices), "", ""};
    if (!p.is_zero()) {
        const Term& t = p.terms().front();
        w.monomial = Poly::monomial(p.dim(), t.monomial.exponents(p.dim()), Rational(1)).to_string();
        w.value = to_string(t.coef);
    }
    return w;
}

}  // namespace

// ---------------------------------------------------------------- PolyMatrix

PolyMatrix::PolyMatrix(std::size_t dim) : dim_(dim), entries_(dim * dim, Poly(dim)) {}

bool PolyMatrix::is_zero() const {
    return std::all_of(entries_.begin(), entries_.end(), [](const Poly& p) { return p.is_zero(); });
}

bool PolyMatrix::is_symmetric() const {
    for (std::size_t i = 0; i < dim_; ++i)
        for (std::size_t j = i + 1; j < dim_; ++j)
            if (!((*this)(i, j) == (*this)(j, i))) return false;
    return true;
}

int PolyMatrix::vanishing_order() const {
    int order = kInfiniteOrder;
    for (const auto& p : entries_) order = std::min(order, p.vanishing_order());
    return order;
}

RationalMatrix PolyMatrix::eval(std::span<const Rational> point) const {
    RationalMatrix r(dim_, dim_);
    for (std::size_t i = 0; i < dim_; ++i)
        for (std::size_t j = 0; j < dim_; ++j) r(i, j) = (*this)(i, j).eval(point);
    return r;
}

PolyMatrix PolyMatrix::operator-() const {
    PolyMatrix r = *this;
    for (auto& p : r.entries_) p = -p;
    return r;
}

PolyMatrix operator+(PolyMatrix a, const PolyMatrix& b) {
    if (a.dim_ != b.dim_) throw InvalidArgument("matrix field dimension mismatch");
    for (std::size_t n = 0; n < a.entries_.size(); ++n) a.entries_[n] += b.entries_[n];
    return a;
}

PolyMatrix operator-(PolyMatrix a, const PolyMatrix& b) {
    if (a.dim_ != b.dim_) throw InvalidArgument("matrix field dimension mismatch");
    for (std::size_t n = 0; n < a.entries_.size(); ++n) a.entries_[n] -= b.entries_[n];
    return a;
}

std::optional<Witness> first_nonzero(const PolyMatrix& m) {
    for (std::size_t i = 0; i < m.dim(); ++i)
        for (std::size_t j = 0; j < m.dim(); ++j)
            if (!m(i, j).is_zero()) {
                return poly_witness({static_cast<int>(i + 1), static_cast<int>(j + 1)}, m(i, j));
            }
    return std::nullopt;
}

// ---------------------------------------------------------------- OneForm

OneForm::OneForm(std::size_t dim) : comps_(dim, Poly(dim)) {}

OneForm::OneForm(std::vector<Poly> components) : comps_(std::move(components)) {
    for (const auto& p : comps_) {
        if (p.dim() != comps_.size()) throw InvalidArgument("one-form component has wrong dimension");
    }
}

bool OneForm::is_zero() const {
    return std::all_of(comps_.begin(), comps_.end(), [](const Poly& p) { return p.is_zero(); });
}

PolyMatrix exterior_derivative(const OneForm& theta) {
    const std::size_t m = theta.dim();
    PolyMatrix d(m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            if (i != j) d(i, j) = partial_derivative(theta[j], i) - partial_derivative(theta[i], j);
    return d;
}

OneForm gradient(const Poly& f) {
    OneForm df(f.dim());
    for (std::size_t i = 0; i < f.dim(); ++i) df[i] = partial_derivative(f, i);
    return df;
}

// ---------------------------------------------------------------- PolyConnection

PolyConnection::PolyConnection(std::size_t dim) : dim_(dim), gamma_(dim * dim * dim, Poly(dim)) {}

void PolyConnection::set(std::size_t i, std::size_t j, std::size_t k, Poly p) {
    if (p.dim() != dim_) throw InvalidArgument("Christoffel symbol has wrong dimension");
    if (i >= dim_ || j >= dim_ || k >= dim_) throw InvalidArgument("Christoffel index out of range");
    gamma_[index(j, i, k)] = p;
    gamma_[index(i, j, k)] = std::move(p);
}

void PolyConnection::add(std::size_t i, std::size_t j, std::size_t k, const Poly& p) {
    if (i >= dim_ || j >= dim_ || k >= dim_) throw InvalidArgument("Christoffel index out of range");
    gamma_[index(i, j, k)] += p;
    if (i != j) gamma_[index(j, i, k)] += p;
}

bool PolyConnection::is_zero() const {
    return std::all_of(gamma_.begin(), gamma_.end(), [](const Poly& p) { return p.is_zero(); });
}

int PolyConnection::max_degree() const {
    int d = -1;
    for (const auto& p : gamma_) d = std::max(d, p.max_degree());
    return d;
}

int PolyConnection::vanishing_order() const {
    int order = kInfiniteOrder;
    for (const auto& p : gamma_) order = std::min(order, p.vanishing_order());
    return order;
}

PolyConnection& PolyConnection::operator+=(const PolyConnection& other) {
    if (dim_ != other.dim_) throw InvalidArgument("connection dimension mismatch");
    for (std::size_t n = 0; n < gamma_.size(); ++n) gamma_[n] += other.gamma_[n];
    return *this;
}

// ---------------------------------------------------------------- CurvatureField

CurvatureField::CurvatureField(std::size_t dim) : dim_(dim), comps_(dim * dim * dim * dim, Poly(dim)) {}

bool CurvatureField::is_zero() const {
    return std::all_of(comps_.begin(), comps_.end(), [](const Poly& p) { return p.is_zero(); });
}

CurvatureOperator CurvatureField::eval(std::span<const Rational> point) const {
    CurvatureOperator a(dim_);
    for (std::size_t i = 0; i < dim_; ++i)
        for (std::size_t j = 0; j < dim_; ++j)
            for (std::size_t k = 0; k < dim_; ++k)
                for (std::size_t l = 0; l < dim_; ++l) a(i, j, k, l) = (*this)(i, j, k, l).eval(point);
    return a;
}

// ---------------------------------------------------------------- curvature

namespace {

using Forms = std::vector<PolyAccumulator::IntegerForm>;

// Integer forms of every Gamma_{jk}^l, indexed (j * m + k) * m + l.
Forms integer_forms(const PolyConnection& c) {
    const std::size_t m = c.dim();
    Forms f(m * m * m);
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = 0; k < m; ++k)
            for (std::size_t l = 0; l < m; ++l) f[(j * m + k) * m + l] = PolyAccumulator::integer_form(c(j, k, l));
    return f;
}

// Accumulates R_{ijk}^l into acc with the given sign.
void accumulate_curvature(PolyAccumulator& acc, const PolyConnection& c, const Forms& f,
                          std::size_t i, std::size_t j, std::size_t k, std::size_t l,
                          const Rational& sign) {
    const std::size_t m = c.dim();
    auto F = [&](std::size_t a, std::size_t b, std::size_t d) -> const PolyAccumulator::IntegerForm& {
        return f[(a * m + b) * m + d];
    };
    acc.add(partial_derivative(c(j, k, l), i), sign);
    acc.add(partial_derivative(c(i, k, l), j), -sign);
    for (std::size_t n = 0; n < m; ++n) {
        acc.add_product(F(i, n, l), F(j, k, n), sign);
        acc.add_product(F(j, n, l), F(i, k, n), -sign);
    }
}

}  // namespace

CurvatureField curvature_field(const PolyConnection& conn) {
    const std::size_t m = conn.dim();
    CurvatureField r(m);
    const Forms f = integer_forms(conn);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t k = 0; k < m; ++k)
                for (std::size_t l = 0; l < m; ++l) {
                    PolyAccumulator acc(m);
                    accumulate_curvature(acc, conn, f, i, j, k, l, Rational(1));
                    r(i, j, k, l) = acc.finish();
                }
    return r;
}

CurvatureOperator curvature_at(const PolyConnection& conn, std::span<const Rational> point) {
    const std::size_t m = conn.dim();
    if (point.size() != m) throw InvalidArgument("evaluation point has wrong length");
    std::vector<Rational> g(m * m * m);
    std::vector<Rational> dg(m * m * m * m);  // dg[a][j][k][l] = d_a Gamma_{jk}^l
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = 0; k < m; ++k)
            for (std::size_t l = 0; l < m; ++l) {
                const Poly& p = conn(j, k, l);
                g[(j * m + k) * m + l] = p.eval(point);
                for (std::size_t a = 0; a < m; ++a) {
                    dg[((a * m + j) * m + k) * m + l] = partial_derivative(p, a).eval(point);
                }
            }
    auto G = [&](std::size_t a, std::size_t b, std::size_t c) -> const Rational& {
        return g[(a * m + b) * m + c];
    };
    auto D = [&](std::size_t a, std::size_t b, std::size_t c, std::size_t d) -> const Rational& {
        return dg[((a * m + b) * m + c) * m + d];
    };
    CurvatureOperator r(m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t k = 0; k < m; ++k)
                for (std::size_t l = 0; l < m; ++l) {
                    Rational v = D(i, j, k, l) - D(j, i, k, l);
                    for (std::size_t n = 0; n < m; ++n) {
                        v += G(i, n, l) * G(j, k, n) - G(j, n, l) * G(i, k, n);
                    }
                    r(i, j, k, l) = v;
                }
    return r;
}

CurvatureOperator curvature_at_origin(const PolyConnection& conn) {
    const std::vector<Rational> origin(conn.dim(), Rational(0));
    return curvature_at(conn, origin);
}

PolyMatrix ricci_field(const PolyConnection& conn) {
    // rho_jk = sum_i d_i G_jk^i - d_j omega_k + omega_n G_jk^n - G_jn^i G_ik^n
    const std::size_t m = conn.dim();
    const OneForm w = omega(conn);
    const Forms f = integer_forms(conn);
    std::vector<PolyAccumulator::IntegerForm> wf(m);
    for (std::size_t n = 0; n < m; ++n) wf[n] = PolyAccumulator::integer_form(w[n]);
    auto F = [&](std::size_t a, std::size_t b, std::size_t d) -> const PolyAccumulator::IntegerForm& {
        return f[(a * m + b) * m + d];
    };
    PolyMatrix rho(m);
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = 0; k < m; ++k) {
            PolyAccumulator acc(m);
            for (std::size_t i = 0; i < m; ++i) acc.add(partial_derivative(conn(j, k, i), i));
            acc.add(partial_derivative(w[k], j), Rational(-1));
            for (std::size_t n = 0; n < m; ++n) {
                acc.add_product(wf[n], F(j, k, n));
                for (std::size_t i = 0; i < m; ++i) acc.add_product(F(j, n, i), F(i, k, n), Rational(-1));
            }
            rho(j, k) = acc.finish();
        }
    return rho;
}

OneForm omega(const PolyConnection& conn) {
    const std::size_t m = conn.dim();
    OneForm w(m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) w[i] += conn(i, j, j);
    return w;
}

PolyMatrix d_omega(const PolyConnection& conn) { return exterior_derivative(omega(conn)); }

PolyMatrix trace_curvature_field(const PolyConnection& conn) {
    const std::size_t m = conn.dim();
    PolyMatrix t(m);
    const Forms f = integer_forms(conn);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            PolyAccumulator acc(m);
            for (std::size_t l = 0; l < m; ++l) accumulate_curvature(acc, conn, f, i, j, l, l, Rational(1));
            t(i, j) = acc.finish();
        }
    return t;
}

// ---------------------------------------------------------------- volume form

VolumePotential try_volume_potential(const PolyConnection& conn) {
    const std::size_t m = conn.dim();
    const OneForm w = omega(conn);
    Poly phi(m);
    for (std::size_t k = 0; k < m; ++k) {
        // omega_k restricted to x^{k+1} = ... = x^m = 0.
        std::vector<Term> kept;
        for (const auto& t : w[k].terms()) {
            bool on_path = true;
            for (std::size_t c = k + 1; c < m; ++c) on_path = on_path && t.monomial.exponent(c) == 0;
            if (on_path) kept.push_back(t);
        }
        phi += integrate(Poly::from_terms(m, std::move(kept)), k);
    }
    for (std::size_t i = 0; i < m; ++i) {
        const Poly defect = partial_derivative(phi, i) - w[i];
        if (!defect.is_zero()) {
            return {std::nullopt, poly_witness({static_cast<int>(i + 1)}, defect)};
        }
    }
    return {std::move(phi), std::nullopt};
}

Poly volume_potential(const PolyConnection& conn) {
    VolumePotential v = try_volume_potential(conn);
    if (!v.potential) {
        const Witness& w = *v.witness;
        throw ClassViolation("omega is not closed, no parallel volume form",
                             "d_" + std::to_string(w.indices[0]) + " Phi - omega_" +
                                 std::to_string(w.indices[0]) + " has term " + w.value + "*" +
                                 w.monomial);
    }
    return std::move(*v.potential);
}

VerificationReport lemma2_report(const PolyConnection& conn) {
    VerificationReport report;
    report.metadata().dim = conn.dim();

    const auto closed = first_nonzero(d_omega(conn));
    const auto trace = first_nonzero(trace_curvature_field(conn));
    const PolyMatrix rho = ricci_field(conn);
    std::optional<Witness> asym;
    {
        PolyMatrix skew(conn.dim());
        for (std::size_t j = 0; j < conn.dim(); ++j)
            for (std::size_t k = 0; k < conn.dim(); ++k) skew(j, k) = rho(j, k) - rho(k, j);
        asym = first_nonzero(skew);
    }
    const VolumePotential vol = try_volume_potential(conn);

    const bool c1 = !closed;
    const bool c2 = !trace;
    const bool c3 = !asym;
    const bool c4 = vol.potential.has_value();
    report.record("closed_omega", c1, closed.value_or(Witness{}));
    report.record("traceless_curvature", c2, trace.value_or(Witness{}));
    report.record("ricci_symmetric", c3, asym.value_or(Witness{}));
    report.record("parallel_volume_form", c4, vol.witness.value_or(Witness{}));

    const bool agree = c1 == c2 && c2 == c3 && c3 == c4;
    std::string states;
    for (bool b : {c1, c2, c3, c4}) states += b ? '1' : '0';
    report.record("conditions_agree", agree, Witness{{}, "", states});
    report.fact("equiaffine", c1 && agree ? "true" : "false");
    return report;
}

// ---------------------------------------------------------------- projective

PolyConnection projective_shift(const PolyConnection& conn, const OneForm& theta) {
    const std::size_t m = conn.dim();
    if (theta.dim() != m) throw InvalidArgument("one-form dimension mismatch");
    PolyConnection out = conn;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) {
            // theta_i delta_j^k + theta_j delta_i^k
            out.add(i, j, j, -theta[i]);
            out.add(i, j, i, -theta[j]);
        }
    return out;
}

CurvatureField weyl_projective_field(const PolyConnection& conn) {
    const std::size_t m = conn.dim();
    if (m < 3) throw InvalidArgument("the Weyl projective field needs m >= 3");
    const PolyMatrix rho = ricci_field(conn);
    if (!rho.is_symmetric()) {
        PolyMatrix skew(m);
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t k = 0; k < m; ++k) skew(j, k) = rho(j, k) - rho(k, j);
        const Witness w = *first_nonzero(skew);
        throw ClassViolation("Ricci field is not symmetric",
                             "rho(" + std::to_string(w.indices[0]) + "," +
                                 std::to_string(w.indices[1]) + ") - rho(" +
                                 std::to_string(w.indices[1]) + "," +
                                 std::to_string(w.indices[0]) + ") has term " + w.value + "*" +
                                 w.monomial);
    }
    CurvatureField w = curvature_field(conn);
    const Rational scale(1, static_cast<long>(m - 1));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t k = 0; k < m; ++k) {
                w(i, j, k, i) -= rho(j, k) * scale;
                w(i, j, k, j) += rho(i, k) * scale;
            }
    return w;
}

PolyConnection transform(const PolyConnection& conn, const RationalMatrix& g) {
    const std::size_t m = conn.dim();
    if (g.rows() != m || g.cols() != m) throw InvalidArgument("group element has wrong shape");
    const RationalMatrix h = inverse(g);

    // s[a][b][d] = Gamma_{ab}^d(h y)
    std::vector<Poly> s(m * m * m, Poly(m));
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b)
            for (std::size_t d = 0; d < m; ++d) {
                if (!conn(a, b, d).is_zero()) s[(a * m + b) * m + d] = substitute_linear(conn(a, b, d), h.data());
            }
    auto contract = [m](const std::vector<Poly>& in, auto&& coef, auto&& src_index) {
        std::vector<Poly> out(m * m * m, Poly(m));
        for (std::size_t p = 0; p < m; ++p)
            for (std::size_t q = 0; q < m; ++q)
                for (std::size_t r = 0; r < m; ++r) {
                    PolyAccumulator acc(m);
                    for (std::size_t x = 0; x < m; ++x) {
                        const Rational c = coef(p, q, r, x);
                        if (c != 0) acc.add(in[src_index(p, q, r, x)], c);
                    }
                    out[(p * m + q) * m + r] = acc.finish();
                }
        return out;
    };
    // t1[i][b][d] = sum_a s[a][b][d] h(a,i)
    auto t1 = contract(
        s, [&](std::size_t i, std::size_t, std::size_t, std::size_t a) { return h(a, i); },
        [m](std::size_t, std::size_t b, std::size_t d, std::size_t a) { return (a * m + b) * m + d; });
    // t2[i][j][d] = sum_b t1[i][b][d] h(b,j)
    auto t2 = contract(
        t1, [&](std::size_t, std::size_t j, std::size_t, std::size_t b) { return h(b, j); },
        [m](std::size_t i, std::size_t, std::size_t d, std::size_t b) { return (i * m + b) * m + d; });
    // out[i][j][l] = sum_d g(l,d) t2[i][j][d]
    auto t3 = contract(
        t2, [&](std::size_t, std::size_t, std::size_t l, std::size_t d) { return g(l, d); },
        [m](std::size_t i, std::size_t j, std::size_t, std::size_t d) { return (i * m + j) * m + d; });

    PolyConnection out(m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j)
            for (std::size_t l = 0; l < m; ++l) out.set(i, j, l, t3[(i * m + j) * m + l]);
    return out;
}

}  // namespace affrep
