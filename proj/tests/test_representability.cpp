#include "affrep/error.hpp"
#include "affrep/representability.hpp"
#include "oracles.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>
#include <random>

using namespace affrep;

namespace {

Poly mono(std::vector<unsigned> e, Rational c) { return Poly::monomial(e.size(), e, c); }

RationalMatrix permutation(const std::vector<std::size_t>& p) {
    RationalMatrix g(p.size(), p.size());
    for (std::size_t i = 0; i < p.size(); ++i) g(p[i], i) = 1;
    return g;
}

}  // namespace

TEST_CASE("linear construction examples") {
    CHECK(represent_generic(CurvatureOperator(3)).is_zero());

    // golden operator, 1-based: G_11^2 = 2/3 x2, G_12^2 = -1/3 x1,
    // G_11^3 = -2/3 x3, G_13^3 = 1/3 x1.
    const auto c = represent_generic(remark6_operator());
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t k = 0; k < 3; ++k) {
                Poly expected(3);
                if (i == 0 && j == 0 && k == 1) expected = mono({0, 1, 0}, Rational(2, 3));
                if (((i == 0 && j == 1) || (i == 1 && j == 0)) && k == 1) expected = mono({1, 0, 0}, Rational(-1, 3));
                if (i == 0 && j == 0 && k == 2) expected = mono({0, 0, 1}, Rational(-2, 3));
                if (((i == 0 && j == 2) || (i == 2 && j == 0)) && k == 2) expected = mono({1, 0, 0}, Rational(1, 3));
                CHECK(c(i, j, k) == expected);
            }
    CHECK(curvature_at_origin(c) == remark6_operator());

    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto a = random_operator(4, OperatorClass::Generic, seed);
        const auto g = represent_generic(a);
        CHECK(curvature_at_origin(g) == a);
        CHECK(g.max_degree() == 1);
        CHECK(g.vanishing_order() >= 1);
    }

    CurvatureOperator bad(3);
    bad(0, 1, 0, 0) = 1;
    CHECK_THROWS_AS(represent_generic(bad), ClassViolation);
}

TEST_CASE("equiaffine construction") {
    const auto rf = random_operator(3, OperatorClass::RicciFlat, 4);
    CHECK(represent_equiaffine(rf) == represent_generic(rf));
    CHECK(d_omega(represent_equiaffine(rf)).is_zero());

    const auto block = ricci_block(random_symmetric_matrix(3, 12));
    CHECK(lemma2_report(represent_equiaffine(block)).all_pass());

    CurvatureOperator non;
    for (std::uint64_t seed = 0;; ++seed) {
        non = random_operator(3, OperatorClass::Generic, seed);
        if (!oracle::ricci(non).is_symmetric()) break;
    }
    CHECK_THROWS_AS(represent_equiaffine(non), ClassViolation);
}

TEST_CASE("theta from ricci") {
    CHECK(theta_from_ricci(RationalMatrix(3, 3)).is_zero());
    const auto theta = theta_from_ricci(RationalMatrix::identity(3));
    for (std::size_t v = 0; v < 3; ++v) CHECK(theta[v] == Rational(-1, 2) * Poly::variable(3, v));
    CHECK(exterior_derivative(theta).is_zero());

    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const std::size_t m = 3 + seed % 2;
        const auto rho0 = random_symmetric_matrix(m, seed);
        const auto th = theta_from_ricci(rho0);
        CHECK(exterior_derivative(th).is_zero());
        CHECK(oracle::ricci(curvature_at_origin(represent_proj_flat(ricci_block(rho0)))) == rho0);
    }
    RationalMatrix asym(3, 3);
    asym(2, 0) = 1;
    CHECK_THROWS_AS(theta_from_ricci(asym), ClassViolation);
}

TEST_CASE("projectively flat construction") {
    CHECK(represent_proj_flat(CurvatureOperator(3)).is_zero());

    const auto a = ricci_block(RationalMatrix::identity(3));
    const auto c = represent_proj_flat(a);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t k = 0; k < 3; ++k) {
                Poly expected(3);
                if (j == k) expected += Rational(-1, 2) * Poly::variable(3, i);
                if (i == k) expected += Rational(-1, 2) * Poly::variable(3, j);
                CHECK(c(i, j, k) == expected);
            }
    CHECK(curvature_at_origin(c) == a);

    try {
        represent_proj_flat(remark6_operator());
        FAIL("expected a class violation");
    } catch (const ClassViolation& e) {
        CHECK_FALSE(e.witness().empty());
    }
    CHECK_THROWS_AS(represent_proj_flat(CurvatureOperator(2)), InvalidArgument);
}

TEST_CASE("k index table") {
    const auto k3 = choose_k_indices(3);
    CHECK(k3(0, 0) == 1);  // k_11 = 2
    CHECK(k3(0, 1) == 2);  // k_12 = 3
    CHECK(k3(1, 0) == 2);
    for (std::size_t m = 3; m <= 8; ++m) {
        const auto k = choose_k_indices(m);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) {
                CHECK(k(i, j) == k(j, i));
                CHECK(k(i, j) != i);
                CHECK(k(i, j) != j);
                CHECK(k(i, j) < m);
            }
    }
    CHECK_THROWS_AS(choose_k_indices(2), InvalidArgument);

    std::vector<std::size_t> custom{2, 2, 1, 2, 0, 0, 1, 0, 1};
    CHECK_NOTHROW(KTable(3, custom));
    std::vector<std::size_t> hits_index{0, 2, 1, 2, 0, 0, 1, 0, 1};
    CHECK_THROWS_AS(KTable(3, hits_index), InvalidArgument);
    std::vector<std::size_t> asymmetric{1, 2, 1, 2, 0, 0, 2, 0, 1};
    CHECK_THROWS_AS(KTable(3, asymmetric), InvalidArgument);
}

TEST_CASE("series for the counterexample") {
    const auto s = ricci_flat_series(remark6_operator(), 2);
    REQUIRE(s.layers.size() == 2);
    REQUIRE(s.thetas.size() == 2);
    CHECK(s.thetas[0](0, 0) == mono({2, 0, 0}, Rational(2, 9)));
    CHECK(s.layers[1](0, 0, 1) == mono({2, 1, 0}, Rational(2, 9)));
    CHECK(s.layers[1](0, 0, 0).is_zero());
    CHECK(s.layers[1](0, 0, 2).is_zero());
    CHECK(s.layers[0] == represent_generic(remark6_operator()));

    const auto r1 = ricci_field(represent_ricci_flat(remark6_operator(), 1));
    CHECK(r1 == -s.thetas[0]);
    CHECK(r1(0, 0) == mono({2, 0, 0}, Rational(-2, 9)));

    CHECK(ricci_field(represent_ricci_flat(remark6_operator(), 3)).vanishing_order() >= 6);

    const auto z = ricci_flat_series(CurvatureOperator(3), 3);
    for (const auto& l : z.layers) CHECK(l.is_zero());
    CHECK(ricci_field(represent_ricci_flat(CurvatureOperator(4), 2)).is_zero());
}

TEST_CASE("series invariants on random ricci-flat operators") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const std::size_t m = 3 + seed % 2;
        const std::size_t n = m == 3 ? 3 : 2;
        const auto a = random_operator(m, OperatorClass::RicciFlat, seed);
        const auto s = ricci_flat_series(a, n);
        REQUIRE(s.layers.size() == n);
        REQUIRE(s.thetas.size() == n);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j)
                for (std::size_t l = 0; l < m; ++l) CHECK(s.layers[0](i, j, l).is_homogeneous(1));
        for (std::size_t v = 0; v < n; ++v) {
            const auto& layer = s.layers[v];
            CHECK(layer.vanishing_order() >= static_cast<int>(2 * v + 1));
            CHECK(omega(layer).is_zero());
            CHECK(s.thetas[v].is_symmetric());
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < m; ++j)
                    for (std::size_t l = 0; l < m; ++l) {
                        CHECK(layer(i, j, l) == layer(j, i, l));
                        if (v > 0 && l != s.k_table(i, j)) CHECK(layer(i, j, l).is_zero());
                    }
        }
        for (std::size_t t = 1; t <= n; ++t) {
            const auto tn = s.truncation(t);
            CHECK(curvature_at_origin(tn) == a);
            const auto rho = ricci_field(tn);
            CHECK(rho == -s.thetas[t - 1]);
            CHECK(rho == oracle::ricci_field(tn));
            CHECK(rho == oracle::ricci_reduced(tn));
            CHECK(rho.vanishing_order() >= static_cast<int>(2 * t));
        }
        CHECK(ricci_flat_series(a, 1).layers[0] == s.layers[0]);
    }
    CHECK_THROWS_AS(ricci_flat_series(random_operator(3, OperatorClass::Equiaffine, 1), 2), ClassViolation);
    CHECK_THROWS_AS(ricci_flat_series(remark6_operator(), 0), InvalidArgument);
}

TEST_CASE("series with an explicit index table") {
    const KTable k(3, {2, 2, 1, 2, 0, 0, 1, 0, 1});
    const auto a = random_operator(3, OperatorClass::RicciFlat, 9);
    const auto s = ricci_flat_series(a, 3, k);
    CHECK(s.k_table == k);
    for (std::size_t t = 1; t <= 3; ++t) {
        const auto rho = ricci_field(s.truncation(t));
        CHECK(rho == -s.thetas[t - 1]);
        CHECK(rho.vanishing_order() >= static_cast<int>(2 * t));
    }
}

TEST_CASE("convergence diagnostics") {
    const auto zero = convergence_report(ricci_flat_series(CurvatureOperator(3), 3), 50, 1);
    CHECK(zero.pass());
    for (const auto& l : zero.per_layer) CHECK(l.max_ratio == 0.0);
    CHECK(zero.params.c1 == 1.0);

    const auto s = ricci_flat_series(remark6_operator(), 6);
    const auto p = convergence_params(s);
    CHECK(p.c1 >= 1.0);
    CHECK(p.c == 4.0 * p.c1);
    CHECK(p.epsilon == 1.0 / (8.0 * p.c1));
    // Gamma_1 rows have coefficient sums at most 2/3, so C1 = max(1, 3 * 2/3).
    CHECK(p.c1 == Catch::Approx(2.0));

    const auto r = convergence_report(s, 1000, 7);
    CHECK(r.per_layer.size() == 6);
    CHECK(r.total_violations() == 0);
    for (const auto& l : r.per_layer) CHECK(l.max_ratio <= 1.0);
    const auto again = convergence_report(s, 1000, 7);
    for (std::size_t v = 0; v < 6; ++v) CHECK(again.per_layer[v].max_ratio == r.per_layer[v].max_ratio);

    CHECK_THROWS_AS(convergence_report(ricci_flat_series(remark6_operator(), 1), 10, 1), InvalidArgument);
}

TEST_CASE("counterexample demo report") {
    const auto rep = remark6_demo(4);
    CHECK(rep.all_pass());
    for (const char* name : {"operator_antisymmetry", "operator_first_bianchi", "operator_ricci_flat",
                             "naive_ricci_nonzero", "naive_ricci_single_entry", "naive_ricci_quadratic",
                             "naive_ricci_magnitude_2_9", "corrected_ricci_order_N2", "corrected_ricci_order_N4"}) {
        const Check* c = rep.find(name);
        REQUIRE(c != nullptr);
        CHECK(c->pass);
    }
    CHECK(rep.fact_value("naive_ricci_coefficient_magnitude") == "2/9");
    CHECK(rep.to_text().find("naive_ricci_nonzero: true") != std::string::npos);
    CHECK(rep.to_text().find("operator_ricci_flat: true") != std::string::npos);
}

TEST_CASE("equivariance probe") {
    const auto id = RationalMatrix::identity(3);
    CHECK(equivariance_probe(remark6_operator(), id, Construction::Thm1).equivariant);
    CHECK(equivariance_probe(remark6_operator(), id, Construction::Thm5).equivariant);
    CHECK(equivariance_probe(ricci_block(RationalMatrix::identity(3)), id, Construction::Thm4).equivariant);

    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto g = random_invertible_matrix(3, seed + 100);
        CHECK(equivariance_probe(random_operator(3, OperatorClass::Generic, seed), g, Construction::Thm1).equivariant);
        CHECK(equivariance_probe(random_operator(3, OperatorClass::Equiaffine, seed), g, Construction::Thm3).equivariant);
        CHECK(equivariance_probe(random_operator(3, OperatorClass::ProjectivelyFlat, seed), g, Construction::Thm4).equivariant);
    }

    std::vector<std::size_t> perm(3);
    std::iota(perm.begin(), perm.end(), 0);
    int failures = 0;
    do {
        if (!equivariance_probe(remark6_operator(), permutation(perm), Construction::Thm5).equivariant) ++failures;
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(failures > 0);

    CHECK(parse_construction("thm4") == Construction::Thm4);
    CHECK(to_string(Construction::Thm5) == "thm5");
    CHECK_THROWS_AS(parse_construction("thm2"), InvalidArgument);
    RationalMatrix singular(3, 3);
    CHECK_THROWS_AS(equivariance_probe(remark6_operator(), singular, Construction::Thm1), InvalidArgument);
}
