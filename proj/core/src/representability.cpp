#include "affrep/representability.hpp"

#include "affrep/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace affrep {

namespace {

std::string quad(std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
    return "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + "," + std::to_string(k + 1) +
           "," + std::to_string(l + 1) + ")";
}

void require_curvature_operator(const CurvatureOperator& a) {
    const VerificationReport r = validate(a);
    for (const auto& c : r.checks()) {
        if (!c.pass) {
            const auto& w = *c.witness;
            throw ClassViolation("input is not an algebraic curvature operator",
                                 c.name + " fails at (" + std::to_string(w.indices[0]) + "," +
                                     std::to_string(w.indices[1]) + "," +
                                     std::to_string(w.indices[2]) + "," +
                                     std::to_string(w.indices[3]) + "), value " + w.value);
        }
    }
}

void require_equiaffine(const CurvatureOperator& a) {
    const RationalMatrix rho = ricci(a);
    for (std::size_t j = 0; j < rho.rows(); ++j)
        for (std::size_t k = j + 1; k < rho.cols(); ++k)
            if (rho(j, k) != rho(k, j)) {
                throw ClassViolation("operator is not equiaffine",
                                     "rho(" + std::to_string(j + 1) + "," + std::to_string(k + 1) +
                                         ") = " + to_string(rho(j, k)) + " but rho(" +
                                         std::to_string(k + 1) + "," + std::to_string(j + 1) +
                                         ") = " + to_string(rho(k, j)));
            }
}

void require_ricci_flat(const CurvatureOperator& a) {
    const RationalMatrix rho = ricci(a);
    for (std::size_t j = 0; j < rho.rows(); ++j)
        for (std::size_t k = 0; k < rho.cols(); ++k)
            if (rho(j, k) != 0) {
                throw ClassViolation("operator is not Ricci flat",
                                     "rho(" + std::to_string(j + 1) + "," + std::to_string(k + 1) +
                                         ") = " + to_string(rho(j, k)));
            }
}

// Bits in [0, 1).
double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

// ---------------------------------------------------------------- linear constructions

PolyConnection represent_generic(const CurvatureOperator& a) {
    require_curvature_operator(a);
    const std::size_t m = a.dim();
    const Rational third(1, 3);
    PolyConnection conn(m);
    for (std::size_t u = 0; u < m; ++u)
        for (std::size_t v = u; v < m; ++v)
            for (std::size_t l = 0; l < m; ++l) {
                std::vector<Term> terms;
                for (std::size_t w = 0; w < m; ++w) {
                    Rational c = third * (a(w, u, v, l) + a(w, v, u, l));
                    if (c != 0) terms.push_back({Monomial::unit(w), std::move(c)});
                }
                conn.set(u, v, l, Poly::from_terms(m, std::move(terms)));
            }
    return conn;
}

PolyConnection represent_equiaffine(const CurvatureOperator& a) {
    require_curvature_operator(a);
    require_equiaffine(a);
    return represent_generic(a);
}

OneForm theta_from_ricci(const RationalMatrix& rho0) {
    if (!rho0.is_square() || rho0.rows() < 2) throw InvalidArgument("theta_from_ricci needs an m x m matrix, m >= 2");
    const std::size_t m = rho0.rows();
    for (std::size_t v = 0; v < m; ++v)
        for (std::size_t j = v + 1; j < m; ++j)
            if (rho0(v, j) != rho0(j, v)) {
                throw ClassViolation("Ricci matrix must be symmetric",
                                     "rho0(" + std::to_string(v + 1) + "," + std::to_string(j + 1) +
                                         ") != rho0(" + std::to_string(j + 1) + "," +
                                         std::to_string(v + 1) + ")");
            }
    const Rational scale(-1, static_cast<long>(m) - 1);
    OneForm theta(m);
    for (std::size_t v = 0; v < m; ++v) {
        std::vector<Term> terms;
        for (std::size_t j = 0; j < m; ++j) {
            if (rho0(v, j) != 0) terms.push_back({Monomial::unit(j), scale * rho0(v, j)});
        }
        theta[v] = Poly::from_terms(m, std::move(terms));
    }
    return theta;
}

PolyConnection represent_proj_flat(const CurvatureOperator& a) {
    if (a.dim() < 3) throw InvalidArgument("projectively flat construction needs m >= 3");
    require_curvature_operator(a);
    require_equiaffine(a);
    const CurvatureOperator weyl = weyl_projective(a);
    const std::size_t m = a.dim();
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t k = 0; k < m; ++k)
                for (std::size_t l = 0; l < m; ++l)
                    if (weyl(i, j, k, l) != 0) {
                        throw ClassViolation("operator is not projectively flat",
                                             "Weyl projective component " + quad(i, j, k, l) +
                                                 " = " + to_string(weyl(i, j, k, l)));
                    }
    const OneForm theta = theta_from_ricci(ricci(a));
    PolyConnection conn(m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) {
            conn.add(i, j, j, theta[i]);
            conn.add(i, j, i, theta[j]);
        }
    return conn;
}

// ---------------------------------------------------------------- index table

KTable::KTable(std::size_t dim) : dim_(dim), k_(dim * dim) {
    if (dim < 3) throw InvalidArgument("an index distinct from i and j needs m >= 3");
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) {
            std::size_t k = 0;
            while (k == i || k == j) ++k;
            k_[i * dim + j] = k;
        }
}

KTable::KTable(std::size_t dim, std::vector<std::size_t> entries) : dim_(dim), k_(std::move(entries)) {
    if (dim < 3) throw InvalidArgument("an index distinct from i and j needs m >= 3");
    if (k_.size() != dim * dim) throw InvalidArgument("index table must be m x m");
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) {
            const std::size_t k = k_[i * dim + j];
            if (k >= dim || k == i || k == j || k != k_[j * dim + i]) {
                throw InvalidArgument("index table entry (" + std::to_string(i + 1) + "," +
                                      std::to_string(j + 1) + ") is not admissible");
            }
        }
}

KTable choose_k_indices(std::size_t m) { return KTable(m); }

// ---------------------------------------------------------------- Ricci-flat series

PolyConnection RicciFlatSeries::truncation() const { return truncation(layers.size()); }

PolyConnection RicciFlatSeries::truncation(std::size_t n) const {
    if (n == 0 || n > layers.size()) throw InvalidArgument("truncation order out of range");
    PolyConnection t = layers.front();
    for (std::size_t v = 1; v < n; ++v) t += layers[v];
    return t;
}

namespace {

// Theta_{2v,ij} from layers[0..v-1] (v is 1-based).
PolyMatrix next_theta(const std::vector<PolyConnection>& layers, std::size_t m) {
    using Form = PolyAccumulator::IntegerForm;
    const std::size_t v = layers.size();
    // forms[u][(i * m + n) * m + l] = Gamma_{2u+1, in}^l
    std::vector<std::vector<Form>> forms(v, std::vector<Form>(m * m * m));
    for (std::size_t u = 0; u < v; ++u)
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t n = 0; n < m; ++n)
                for (std::size_t l = 0; l < m; ++l)
                    forms[u][(i * m + n) * m + l] = PolyAccumulator::integer_form(layers[u](i, n, l));
    auto G = [&](std::size_t u, std::size_t i, std::size_t n, std::size_t l) -> const Form& {
        return forms[u][(i * m + n) * m + l];
    };
    const std::size_t t = v - 1;
    PolyMatrix theta(m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) {
            PolyAccumulator acc(m);
            for (std::size_t n = 0; n < m; ++n)
                for (std::size_t l = 0; l < m; ++l) {
                    acc.add_product(G(t, i, n, l), G(t, j, l, n));
                    for (std::size_t u = 0; u < t; ++u) {
                        acc.add_product(G(t, i, n, l), G(u, j, l, n));
                        acc.add_product(G(u, i, n, l), G(t, j, l, n));
                    }
                }
            theta(i, j) = acc.finish();
            if (i != j) theta(j, i) = theta(i, j);
        }
    return theta;
}

}  // namespace

RicciFlatSeries ricci_flat_series(const CurvatureOperator& a, std::size_t n_layers) {
    if (a.dim() < 3) throw InvalidArgument("Ricci-flat series needs m >= 3");
    return ricci_flat_series(a, n_layers, choose_k_indices(a.dim()));
}

RicciFlatSeries ricci_flat_series(const CurvatureOperator& a, std::size_t n_layers, const KTable& k) {
    const std::size_t m = a.dim();
    if (m < 3) throw InvalidArgument("Ricci-flat series needs m >= 3");
    if (n_layers == 0) throw InvalidArgument("Ricci-flat series needs at least one layer");
    if (k.dim() != m) throw InvalidArgument("index table dimension mismatch");
    require_curvature_operator(a);
    require_ricci_flat(a);

    RicciFlatSeries s;
    s.dim = m;
    s.k_table = k;
    s.layers.push_back(represent_generic(a));
    for (std::size_t v = 1; v <= n_layers; ++v) {
        s.thetas.push_back(next_theta(s.layers, m));
        if (v == n_layers) break;
        const PolyMatrix& theta = s.thetas.back();
        PolyConnection layer(m);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i; j < m; ++j) {
                const std::size_t kij = k(i, j);
                layer.set(i, j, kij, integrate(theta(i, j), kij));
            }
        s.layers.push_back(std::move(layer));
    }
    return s;
}

PolyConnection represent_ricci_flat(const CurvatureOperator& a, std::size_t n_layers) {
    return ricci_flat_series(a, n_layers).truncation();
}

// ---------------------------------------------------------------- convergence

std::size_t ConvergenceReport::total_violations() const {
    std::size_t n = 0;
    for (const auto& l : per_layer) n += l.violations;
    return n;
}

ConvergenceParams convergence_params(const RicciFlatSeries& series) {
    if (series.layers.empty()) throw InvalidArgument("series has no layers");
    const std::size_t m = series.dim;
    const PolyConnection& g1 = series.layers.front();
    Rational best = 0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t l = 0; l < m; ++l) {
                Rational sum = 0;
                for (const auto& t : g1(i, j, l).terms()) sum += abs(t.coef);
                best = std::max(best, sum);
            }
    ConvergenceParams p;
    p.c1 = std::max(1.0, static_cast<double>(m) * best.get_d());
    p.c = 4.0 * p.c1;
    p.epsilon = 1.0 / (8.0 * p.c1);
    return p;
}

ConvergenceReport convergence_report(const RicciFlatSeries& series, std::size_t samples,
                                     std::uint64_t seed, std::vector<double> radius_grid,
                                     double slack) {
    if (series.layers.size() < 2) throw InvalidArgument("convergence report needs at least 2 layers");
    if (radius_grid.empty()) throw InvalidArgument("radius grid is empty");
    for (double r : radius_grid) {
        if (!(r > 0.0 && r <= 1.0)) throw InvalidArgument("radius grid fractions must lie in (0, 1]");
    }
    const std::size_t m = series.dim;
    ConvergenceReport report;
    report.params = convergence_params(series);
    report.samples = samples;
    report.slack = slack;
    for (std::size_t v = 1; v <= series.layers.size(); ++v) report.per_layer.push_back({v, 0.0, 0});

    std::mt19937_64 rng(seed);
    std::vector<double> x(m);
    for (std::size_t s = 0; s < samples; ++s) {
        const double radius = radius_grid[s % radius_grid.size()] * report.params.epsilon;
        // A direction on the unit sup-norm sphere: one coordinate pinned to +-1.
        for (auto& xi : x) xi = 2.0 * unit_uniform(rng) - 1.0;
        const std::size_t pinned = static_cast<std::size_t>(rng() % m);
        x[pinned] = (rng() & 1u) ? 1.0 : -1.0;
        for (auto& xi : x) xi *= radius;

        for (std::size_t v = 1; v <= series.layers.size(); ++v) {
            const PolyConnection& layer = series.layers[v - 1];
            double max_abs = 0.0;
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < m; ++j)
                    for (std::size_t l = 0; l < m; ++l) {
                        const Poly& p = layer(i, j, l);
                        if (!p.is_zero()) max_abs = std::max(max_abs, std::fabs(p.eval(std::span<const double>(x))));
                    }
            const double norm = static_cast<double>(m) * max_abs;
            const double bound = std::pow(report.params.c, static_cast<double>(v)) *
                                 std::pow(radius, static_cast<double>(2 * v - 1));
            LayerEstimate& est = report.per_layer[v - 1];
            est.max_ratio = std::max(est.max_ratio, norm / bound);
            if (norm > bound + slack) ++est.violations;
        }
    }
    return report;
}

// ---------------------------------------------------------------- the counterexample

CurvatureOperator remark6_operator() {
    CurvatureOperator a(3);
    a(1, 0, 0, 1) = 1;
    a(0, 1, 0, 1) = -1;
    a(2, 0, 0, 2) = -1;
    a(0, 2, 0, 2) = 1;
    return a;
}

VerificationReport remark6_demo(std::size_t max_order) {
    VerificationReport report;
    report.metadata().dim = 3;
    report.metadata().operator_class = "ricci-flat";
    report.metadata().truncation_order = max_order;

    const CurvatureOperator a = remark6_operator();
    report.merge(validate(a), "operator_");
    const RationalMatrix rho = ricci(a);
    report.record("operator_ricci_flat", rho.is_zero(), Witness{{}, "", "ricci(A) != 0"});

    const PolyConnection naive = represent_generic(a);
    report.record("naive_represents_operator", curvature_at_origin(naive) == a, Witness{{}, "", "R(0) != A"});
    const PolyMatrix naive_rho = ricci_field(naive);
    report.record("naive_ricci_nonzero", !naive_rho.is_zero(), Witness{{}, "", "ricci field is zero"});

    std::vector<std::pair<std::size_t, std::size_t>> entries;
    for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t k = j; k < 3; ++k)
            if (!naive_rho(j, k).is_zero()) entries.emplace_back(j, k);
    report.record("naive_ricci_symmetric", naive_rho.is_symmetric(), Witness{{}, "", "asymmetric"});
    report.record("naive_ricci_single_entry", entries.size() == 1,
                  Witness{{}, "", std::to_string(entries.size()) + " independent nonzero entries"});
    if (!entries.empty()) {
        const auto [j, k] = entries.front();
        const Poly& p = naive_rho(j, k);
        const bool quadratic_monomial = p.size() == 1 && p.is_homogeneous(2);
        report.record("naive_ricci_quadratic", quadratic_monomial,
                      Witness{{static_cast<int>(j + 1), static_cast<int>(k + 1)}, "", p.to_string()});
        const Rational magnitude = abs(p.terms().front().coef);
        report.record("naive_ricci_magnitude_2_9", magnitude == Rational(2, 9),
                      Witness{{static_cast<int>(j + 1), static_cast<int>(k + 1)}, "", to_string(magnitude)});
        report.fact("naive_ricci_entry",
                    "(" + std::to_string(j + 1) + "," + std::to_string(k + 1) + ") = " + p.to_string());
        report.fact("naive_ricci_coefficient_magnitude", to_string(magnitude));
    }

    if (max_order > 0) {
        const RicciFlatSeries series = ricci_flat_series(a, max_order);
        for (std::size_t n = 1; n <= max_order; ++n) {
            const PolyConnection t = series.truncation(n);
            const int order = ricci_field(t).vanishing_order();
            const std::string tag = "N" + std::to_string(n);
            report.record("corrected_represents_" + tag, curvature_at_origin(t) == a,
                          Witness{{}, "", "R(0) != A"});
            report.record("corrected_ricci_order_" + tag, order >= static_cast<int>(2 * n),
                          Witness{{}, "", std::to_string(order)});
            report.fact("corrected_ricci_order_" + tag,
                        order == kInfiniteOrder ? std::string("inf") : std::to_string(order));
        }
    }
    return report;
}

// ---------------------------------------------------------------- equivariance

std::string_view to_string(Construction c) {
    switch (c) {
        case Construction::Thm1: return "thm1";
        case Construction::Thm3: return "thm3";
        case Construction::Thm4: return "thm4";
        case Construction::Thm5: return "thm5";
    }
    return "unknown";
}

Construction parse_construction(std::string_view name) {
    if (name == "thm1") return Construction::Thm1;
    if (name == "thm3") return Construction::Thm3;
    if (name == "thm4") return Construction::Thm4;
    if (name == "thm5") return Construction::Thm5;
    throw InvalidArgument("unknown method '" + std::string(name) + "' (expected thm1, thm3, thm4, thm5)");
}

PolyConnection construct(Construction method, const CurvatureOperator& a, std::size_t n_layers) {
    switch (method) {
        case Construction::Thm1: return represent_generic(a);
        case Construction::Thm3: return represent_equiaffine(a);
        case Construction::Thm4: return represent_proj_flat(a);
        case Construction::Thm5: return represent_ricci_flat(a, n_layers);
    }
    throw InvalidArgument("unsupported construction");
}

EquivarianceResult equivariance_probe(const CurvatureOperator& a, const RationalMatrix& g,
                                      Construction method, std::size_t n_layers) {
    if (g.rows() != a.dim() || g.cols() != a.dim()) throw InvalidArgument("group element has wrong shape");
    if (determinant(g) == 0) throw InvalidArgument("group element is singular");
    EquivarianceResult r;
    r.action =
        "(g.A)_{ijk}^l = g^l_d A_{abc}^d h^a_i h^b_j h^c_k; "
        "(g.Gamma)_{ij}^l(y) = g^l_d Gamma_{ab}^d(h y) h^a_i h^b_j; h = g^-1";
    const PolyConnection lhs = construct(method, transform(a, g), n_layers);
    const PolyConnection rhs = transform(construct(method, a, n_layers), g);
    r.equivariant = lhs == rhs;
    return r;
}

RationalMatrix random_invertible_matrix(std::size_t m, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (;;) {
        RationalMatrix g(m, m);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) g(i, j) = Rational(static_cast<long>(rng() % 5) - 2);
        if (determinant(g) != 0) return g;
    }
}

}  // namespace affrep
