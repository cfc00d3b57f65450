#include "affrep/connection.hpp"
#include "affrep/error.hpp"
#include "affrep/representability.hpp"
#include "oracles.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace affrep;

namespace {

Poly x(std::size_t m, std::size_t k) { return Poly::variable(m, k); }

// m = 2, Gamma_{11}^2 = x^2 (1-based), everything else zero.
PolyConnection two_dim_example() {
    PolyConnection c(2);
    c.set(0, 0, 1, x(2, 1));
    return c;
}

PolyConnection omega_free(PolyConnection c) {
    const auto w = oracle::omega(c);
    for (std::size_t i = 0; i < c.dim(); ++i) c.add(i, i, i, -w[i]);
    return c;
}

bool symmetries_hold(const CurvatureField& r) {
    const std::size_t m = r.dim();
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t k = 0; k < m; ++k)
                for (std::size_t l = 0; l < m; ++l) {
                    if (r(i, j, k, l) != -r(j, i, k, l)) return false;
                    if (!(r(i, j, k, l) + r(j, k, i, l) + r(k, i, j, l)).is_zero()) return false;
                }
    return true;
}

}  // namespace

TEST_CASE("curvature field examples") {
    CHECK(curvature_field(PolyConnection(3)).is_zero());

    const auto r = curvature_field(two_dim_example());
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t k = 0; k < 2; ++k)
                for (std::size_t l = 0; l < 2; ++l) {
                    Rational expected = 0;
                    if (i == 1 && j == 0 && k == 0 && l == 1) expected = 1;
                    if (i == 0 && j == 1 && k == 0 && l == 1) expected = -1;
                    CHECK(r(i, j, k, l) == Poly::constant(2, expected));
                }

    const auto a = remark6_operator();
    CHECK(curvature_at_origin(represent_generic(a)) == a);
}

TEST_CASE("curvature at a point") {
    const std::vector<Rational> p{Rational(3, 2), Rational(-7)};
    CHECK(curvature_at(PolyConnection(2), p).is_zero());
    const auto r = curvature_at(two_dim_example(), p);
    CurvatureOperator expected(2);
    expected(1, 0, 0, 1) = 1;
    expected(0, 1, 0, 1) = -1;
    CHECK(r == expected);
    const std::vector<Rational> bad{1};
    CHECK_THROWS_AS(curvature_at(two_dim_example(), bad), InvalidArgument);
}

TEST_CASE("curvature field agrees with full expansion and keeps its symmetries") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t m = 2 + rng() % 3;
        const auto c = oracle::random_connection(m, 2, rng);
        const auto r = curvature_field(c);
        CHECK(symmetries_hold(r));
        bool same = true;
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j)
                for (std::size_t k = 0; k < m; ++k)
                    for (std::size_t l = 0; l < m; ++l) same = same && r(i, j, k, l) == oracle::curvature_entry(c, i, j, k, l);
        CHECK(same);
        std::vector<Rational> pt;
        for (std::size_t i = 0; i < m; ++i) pt.emplace_back(static_cast<long>(rng() % 7) - 3, 2);
        for (auto& q : pt) q.canonicalize();
        CHECK(curvature_at(c, pt) == r.eval(pt));
    }
}

TEST_CASE("finite-difference cross-check of the m = 2 example") {
    const std::vector<double> p{0.3, -1.2};
    const std::vector<Rational> pr{Rational(3, 10), Rational(-6, 5)};
    const auto c = two_dim_example();
    CHECK(oracle::scaled_error(curvature_at(c, pr), oracle::curvature_finite_difference(c, p)) < 1e-6);
}

TEST_CASE("ricci field") {
    CHECK(ricci_field(PolyConnection(3)).is_zero());
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t m = 2 + rng() % 3;
        const auto c = oracle::random_connection(m, 2, rng);
        const auto rho = ricci_field(c);
        CHECK(rho == oracle::ricci_field(c));
        // antisymmetric part is minus the curvature trace
        const auto t = trace_curvature_field(c);
        bool ok = true;
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t k = 0; k < m; ++k) ok = ok && rho(j, k) - rho(k, j) == -t(j, k);
        CHECK(ok);
        // the reduced formula holds once omega is removed
        const auto c0 = omega_free(c);
        CHECK(oracle::omega(c0) == std::vector<Poly>(m, Poly(m)));
        CHECK(ricci_field(c0) == oracle::ricci_reduced(c0));
    }
}

TEST_CASE("omega and its exterior derivative") {
    const auto eq = random_operator(3, OperatorClass::Equiaffine, 8);
    CHECK(d_omega(represent_equiaffine(eq)).is_zero());

    const auto rho0 = random_symmetric_matrix(4, 3);
    const auto theta = theta_from_ricci(rho0);
    const auto w = omega(represent_proj_flat(ricci_block(rho0)));
    for (std::size_t i = 0; i < 4; ++i) CHECK(w[i] == Rational(5) * theta[i]);

    CHECK(omega(represent_ricci_flat(remark6_operator(), 3)).is_zero());

    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 10; ++trial) {
        const auto c = oracle::random_connection(3, 2, rng);
        const auto d = d_omega(c);
        const auto wo = oracle::omega(c);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) {
                CHECK(d(i, j) == partial_derivative(wo[j], i) - partial_derivative(wo[i], j));
                CHECK(d(i, j) == -d(j, i));
            }
    }
}

TEST_CASE("curvature trace equals d omega") {
    CHECK(trace_curvature_field(PolyConnection(3)).is_zero());
    CHECK(trace_curvature_field(represent_equiaffine(random_operator(3, OperatorClass::Equiaffine, 1))).is_zero());
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 30; ++trial) {
        const auto c = oracle::random_connection(3, 2, rng);
        CHECK(trace_curvature_field(c) == d_omega(c));
    }
}

TEST_CASE("volume potential") {
    const auto zero = volume_potential(PolyConnection(3));
    CHECK(zero.is_zero());
    CHECK(zero.dim() == 3);

    // Projectively flat construction: omega = (m + 1) theta with theta = df.
    const std::size_t m = 3;
    const auto rho0 = random_symmetric_matrix(m, 5);
    Poly f(m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            f += Rational(Rational(-1, 2 * (static_cast<long>(m) - 1)) * rho0(i, j)) * (x(m, i) * x(m, j));
    CHECK(gradient(f) == theta_from_ricci(rho0));
    CHECK(volume_potential(represent_proj_flat(ricci_block(rho0))) == Rational(static_cast<long>(m) + 1) * f);

    CHECK(volume_potential(represent_ricci_flat(remark6_operator(), 2)).is_zero());

    std::mt19937_64 rng(59);
    for (int trial = 0; trial < 30; ++trial) {
        const auto c = oracle::random_closed_connection(3, 2, rng);
        const Poly phi = volume_potential(c);
        const auto w = oracle::omega(c);
        for (std::size_t i = 0; i < 3; ++i) CHECK(partial_derivative(phi, i) == w[i]);
        const std::vector<Rational> origin(3, Rational(0));
        CHECK(phi.eval(std::span<const Rational>(origin)) == 0);
    }

    PolyConnection bad(3);
    bad.set(0, 0, 0, x(3, 1));  // omega_1 = x^2, d omega != 0
    const auto vp = try_volume_potential(bad);
    CHECK_FALSE(vp.potential.has_value());
    CHECK(vp.witness.has_value());
    CHECK_THROWS_AS(volume_potential(bad), ClassViolation);
}

TEST_CASE("equiaffine conditions report") {
    auto all_four = [](const VerificationReport& r, bool expected) {
        for (const char* name : {"closed_omega", "traceless_curvature", "ricci_symmetric", "parallel_volume_form"}) {
            const Check* c = r.find(name);
            REQUIRE(c != nullptr);
            CHECK(c->pass == expected);
            if (!c->pass) CHECK(c->witness.has_value());
        }
        CHECK(r.find("conditions_agree")->pass);
    };
    const auto thm3 = lemma2_report(represent_equiaffine(random_operator(4, OperatorClass::Equiaffine, 2)));
    all_four(thm3, true);
    CHECK(thm3.fact_value("equiaffine") == "true");
    all_four(lemma2_report(PolyConnection(3)), true);

    PolyConnection bad(3);
    bad.set(0, 0, 0, x(3, 1));  // Gamma_{11}^1 = x^2
    const auto r = lemma2_report(bad);
    all_four(r, false);
    CHECK(r.fact_value("equiaffine") == "false");
}

TEST_CASE("projective shift") {
    std::mt19937_64 rng(61);
    const auto c = oracle::random_closed_connection(3, 2, rng);
    CHECK(projective_shift(c, OneForm(3)) == c);

    const Poly f = x(3, 0) * x(3, 1);
    const OneForm theta = gradient(f);
    const auto shifted = projective_shift(PolyConnection(3), theta);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t k = 0; k < 3; ++k) {
                Poly expected(3);
                if (j == k) expected -= theta[i];
                if (i == k) expected -= theta[j];
                CHECK(shifted(i, j, k) == expected);
            }

    for (int trial = 0; trial < 5; ++trial) {
        const auto e = oracle::random_closed_connection(3, 1, rng);
        CHECK(weyl_projective_field(projective_shift(e, theta)) == weyl_projective_field(e));
    }
    const auto thm3 = represent_equiaffine(random_operator(3, OperatorClass::Equiaffine, 6));
    CHECK(weyl_projective_field(projective_shift(thm3, theta)) == weyl_projective_field(thm3));
}

TEST_CASE("weyl projective field") {
    const auto rho0 = random_symmetric_matrix(3, 9);
    CHECK(weyl_projective_field(represent_proj_flat(ricci_block(rho0))).is_zero());

    const auto rf = represent_ricci_flat(remark6_operator(), 2);
    REQUIRE(ricci_field(rf).is_zero());
    CHECK(weyl_projective_field(rf) == curvature_field(rf));

    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto c = represent_equiaffine(random_operator(4, OperatorClass::Equiaffine, seed));
        const std::vector<Rational> origin(4, Rational(0));
        CHECK(weyl_projective_field(c).eval(origin) == weyl_projective(curvature_at_origin(c)));
    }

    CHECK_THROWS_AS(weyl_projective_field(PolyConnection(2)), InvalidArgument);
    PolyConnection bad(3);
    bad.set(0, 0, 0, x(3, 1));
    CHECK_THROWS_AS(weyl_projective_field(bad), ClassViolation);
}

TEST_CASE("pushforward of connections") {
    std::mt19937_64 rng(67);
    const auto c = oracle::random_connection(3, 2, rng);
    CHECK(transform(c, RationalMatrix::identity(3)) == c);
    for (int trial = 0; trial < 5; ++trial) {
        const auto g = random_invertible_matrix(3, rng());
        const auto h = random_invertible_matrix(3, rng());
        CHECK(transform(transform(c, g), h) == transform(c, h * g));
        CHECK(transform(transform(c, g), inverse(g)) == c);
        // the origin is fixed, so the curvature there moves tensorially
        CHECK(curvature_at_origin(transform(c, g)) == transform(curvature_at_origin(c), g));
    }
}

TEST_CASE("first nonzero witness") {
    PolyMatrix m(3);
    CHECK_FALSE(first_nonzero(m).has_value());
    m(1, 2) = Poly::monomial(3, std::vector<unsigned>{2, 0, 0}, Rational(-2, 9));
    const auto w = first_nonzero(m);
    REQUIRE(w.has_value());
    CHECK(w->indices == std::vector<int>{2, 3});
    CHECK(w->value == "-2/9");
    CHECK(w->monomial == "x1^2");
}
