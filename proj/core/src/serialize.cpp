#include "affrep/serialize.hpp"

#include "affrep/error.hpp"

#include <set>
#include <tuple>

namespace affrep::json {

namespace {

const Json& field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) {
        throw ParseError(std::string("missing field '") + key + "'");
    }
    return j.at(key);
}

std::size_t read_dim(const Json& j, std::size_t lo = 1) {
    const Json& d = field(j, "dim");
    if (!d.is_number_unsigned() || d.get<std::size_t>() < lo || d.get<std::size_t>() > Monomial::kMaxDim) {
        throw ParseError("field 'dim' must be an integer in [" + std::to_string(lo) + ", " +
                         std::to_string(Monomial::kMaxDim) + "]");
    }
    return d.get<std::size_t>();
}

// 1-based index in [1, dim], returned 0-based.
std::size_t read_index(const Json& j, const char* key, std::size_t dim) {
    const Json& v = field(j, key);
    if (!v.is_number_unsigned() || v.get<std::size_t>() < 1 || v.get<std::size_t>() > dim) {
        throw ParseError(std::string("index '") + key + "' must be in [1, " + std::to_string(dim) + "]");
    }
    return v.get<std::size_t>() - 1;
}

Rational read_rational(const Json& v) {
    if (!v.is_string()) throw ParseError("exact values must be fraction strings");
    return parse_rational(v.get<std::string>());
}

}  // namespace

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------- Poly

Json to_json(const Poly& p) {
    Json terms = Json::array();
    for (const auto& t : p.terms()) {
        terms.push_back(Json{{"exps", t.monomial.exponents(p.dim())}, {"coef", to_string(t.coef)}});
    }
    return Json{{"dim", p.dim()}, {"terms", std::move(terms)}};
}

Poly poly_from_json(const Json& j) {
    const std::size_t dim = read_dim(j);
    const Json& terms = field(j, "terms");
    if (!terms.is_array()) throw ParseError("'terms' must be an array");
    std::vector<Term> out;
    std::set<std::uint64_t> seen;
    for (const auto& t : terms) {
        const Json& exps = field(t, "exps");
        if (!exps.is_array() || exps.size() != dim) throw ParseError("'exps' must have length dim");
        std::vector<unsigned> e;
        for (const auto& x : exps) {
            if (!x.is_number_unsigned() || x.get<unsigned>() > Monomial::kMaxExponent) {
                throw ParseError("exponents must be integers in [0, 255]");
            }
            e.push_back(x.get<unsigned>());
        }
        Monomial mono(e);
        if (!seen.insert(mono.packed()).second) throw ParseError("duplicate monomial in polynomial");
        Rational c = read_rational(field(t, "coef"));
        if (c == 0) throw ParseError("zero coefficients are not stored");
        out.push_back({mono, std::move(c)});
    }
    return Poly::from_terms(dim, std::move(out));
}

// ---------------------------------------------------------------- operators

Json to_json(const CurvatureOperator& a) {
    const std::size_t m = a.dim();
    Json comps = Json::array();
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t k = 0; k < m; ++k)
                for (std::size_t l = 0; l < m; ++l)
                    if (a(i, j, k, l) != 0) {
                        comps.push_back(Json{{"i", i + 1},
                                             {"j", j + 1},
                                             {"k", k + 1},
                                             {"l", l + 1},
                                             {"value", to_string(a(i, j, k, l))}});
                    }
    return Json{{"dim", m}, {"components", std::move(comps)}};
}

CurvatureOperator operator_from_json(const Json& j) {
    const std::size_t m = read_dim(j, 2);
    const Json& comps = field(j, "components");
    if (!comps.is_array()) throw ParseError("'components' must be an array");
    CurvatureOperator a(m);
    std::set<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>> seen;
    for (const auto& c : comps) {
        const auto i = read_index(c, "i", m);
        const auto jj = read_index(c, "j", m);
        const auto k = read_index(c, "k", m);
        const auto l = read_index(c, "l", m);
        if (!seen.emplace(i, jj, k, l).second) throw ParseError("duplicate operator component");
        a(i, jj, k, l) = read_rational(field(c, "value"));
    }
    return a;
}

Json to_json(const RationalMatrix& m) {
    Json rows = Json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(to_string(m(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

RationalMatrix matrix_from_json(const Json& j) {
    if (!j.is_array() || j.empty() || !j.front().is_array()) throw ParseError("matrix must be a nested array");
    const std::size_t rows = j.size();
    const std::size_t cols = j.front().size();
    RationalMatrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        if (!j[r].is_array() || j[r].size() != cols) throw ParseError("matrix rows must have equal length");
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = read_rational(j[r][c]);
    }
    return m;
}

// ---------------------------------------------------------------- connections

Json to_json(const PolyConnection& c) {
    const std::size_t m = c.dim();
    Json gamma = Json::array();
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j)
            for (std::size_t k = 0; k < m; ++k)
                if (!c(i, j, k).is_zero()) {
                    gamma.push_back(Json{{"i", i + 1}, {"j", j + 1}, {"k", k + 1}, {"poly", to_json(c(i, j, k))}});
                }
    return Json{{"dim", m}, {"gamma", std::move(gamma)}};
}

PolyConnection connection_from_json(const Json& j) {
    const std::size_t m = read_dim(j);
    const Json& gamma = field(j, "gamma");
    if (!gamma.is_array()) throw ParseError("'gamma' must be an array");
    PolyConnection c(m);
    std::set<std::tuple<std::size_t, std::size_t, std::size_t>> seen;
    for (const auto& e : gamma) {
        const auto i = read_index(e, "i", m);
        const auto jj = read_index(e, "j", m);
        const auto k = read_index(e, "k", m);
        if (i > jj) throw ParseError("connection entries must have i <= j");
        if (!seen.emplace(i, jj, k).second) throw ParseError("duplicate Christoffel entry");
        Poly p = poly_from_json(field(e, "poly"));
        if (p.dim() != m) throw ParseError("Christoffel polynomial has wrong dimension");
        c.set(i, jj, k, std::move(p));
    }
    return c;
}

Json to_json(const PolyMatrix& m) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.dim(); ++i) {
        Json row = Json::array();
        for (std::size_t j = 0; j < m.dim(); ++j) row.push_back(to_json(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

PolyMatrix poly_matrix_from_json(const Json& j, std::size_t dim) {
    if (!j.is_array() || j.size() != dim) throw ParseError("polynomial matrix must have dim rows");
    PolyMatrix m(dim);
    for (std::size_t r = 0; r < dim; ++r) {
        if (!j[r].is_array() || j[r].size() != dim) throw ParseError("polynomial matrix must be square");
        for (std::size_t c = 0; c < dim; ++c) {
            Poly p = poly_from_json(j[r][c]);
            if (p.dim() != dim) throw ParseError("matrix entry has wrong dimension");
            m(r, c) = std::move(p);
        }
    }
    return m;
}

Json to_json(const OneForm& theta) {
    Json comps = Json::array();
    for (std::size_t i = 0; i < theta.dim(); ++i) comps.push_back(to_json(theta[i]));
    return Json{{"dim", theta.dim()}, {"components", std::move(comps)}};
}

// ---------------------------------------------------------------- series

Json to_json(const RicciFlatSeries& s) {
    Json k = Json::array();
    for (std::size_t i = 0; i < s.dim; ++i) {
        Json row = Json::array();
        for (std::size_t j = 0; j < s.dim; ++j) row.push_back(s.k_table(i, j) + 1);
        k.push_back(std::move(row));
    }
    Json layers = Json::array();
    for (const auto& l : s.layers) layers.push_back(to_json(l));
    Json thetas = Json::array();
    for (const auto& t : s.thetas) thetas.push_back(to_json(t));
    return Json{{"dim", s.dim}, {"k_table", std::move(k)}, {"layers", std::move(layers)}, {"thetas", std::move(thetas)}};
}

RicciFlatSeries series_from_json(const Json& j) {
    RicciFlatSeries s;
    s.dim = read_dim(j, 3);
    const Json& k = field(j, "k_table");
    if (!k.is_array() || k.size() != s.dim) throw ParseError("'k_table' must be dim x dim");
    std::vector<std::size_t> entries;
    for (const auto& row : k) {
        if (!row.is_array() || row.size() != s.dim) throw ParseError("'k_table' must be dim x dim");
        for (const auto& v : row) {
            if (!v.is_number_unsigned() || v.get<std::size_t>() < 1 || v.get<std::size_t>() > s.dim) {
                throw ParseError("'k_table' entries must be indices in [1, dim]");
            }
            entries.push_back(v.get<std::size_t>() - 1);
        }
    }
    try {
        s.k_table = KTable(s.dim, std::move(entries));
    } catch (const InvalidArgument& e) {
        throw ParseError(e.what());
    }
    const Json& layers = field(j, "layers");
    if (!layers.is_array() || layers.empty()) throw ParseError("'layers' must be a non-empty array");
    for (const auto& l : layers) {
        PolyConnection c = connection_from_json(l);
        if (c.dim() != s.dim) throw ParseError("layer has wrong dimension");
        s.layers.push_back(std::move(c));
    }
    const Json& thetas = field(j, "thetas");
    if (!thetas.is_array()) throw ParseError("'thetas' must be an array");
    for (const auto& t : thetas) s.thetas.push_back(poly_matrix_from_json(t, s.dim));
    return s;
}

Json to_json(const ConvergenceReport& r) {
    Json layers = Json::array();
    for (const auto& l : r.per_layer) {
        layers.push_back(Json{{"nu", l.nu}, {"max_ratio", l.max_ratio}, {"violations", l.violations}});
    }
    return Json{{"C1", r.params.c1},
                {"C", r.params.c},
                {"epsilon", r.params.epsilon},
                {"per_layer", std::move(layers)},
                {"samples", r.samples},
                {"slack", r.slack},
                {"norm", r.params.norm}};
}

// ---------------------------------------------------------------- reports

Json to_json(const VerificationReport& r) {
    Json meta = Json::object();
    const auto& md = r.metadata();
    if (md.dim) meta["dim"] = *md.dim;
    if (md.operator_class) meta["class"] = *md.operator_class;
    if (md.seed) meta["seed"] = *md.seed;
    if (md.truncation_order) meta["truncation_order"] = *md.truncation_order;

    Json checks = Json::array();
    for (const auto& c : r.checks()) {
        Json jc{{"name", c.name}, {"status", c.pass ? "pass" : "fail"}};
        if (c.witness) {
            jc["witness"] = Json{{"indices", c.witness->indices},
                                 {"monomial", c.witness->monomial},
                                 {"value", c.witness->value}};
        }
        checks.push_back(std::move(jc));
    }
    Json facts = Json::object();
    for (const auto& [k, v] : r.facts()) facts[k] = v;
    return Json{{"metadata", std::move(meta)},
                {"all_pass", r.all_pass()},
                {"checks", std::move(checks)},
                {"facts", std::move(facts)}};
}

VerificationReport report_from_json(const Json& j) {
    VerificationReport r;
    const Json& meta = field(j, "metadata");
    if (meta.contains("dim")) r.metadata().dim = meta.at("dim").get<std::size_t>();
    if (meta.contains("class")) r.metadata().operator_class = meta.at("class").get<std::string>();
    if (meta.contains("seed")) r.metadata().seed = meta.at("seed").get<std::uint64_t>();
    if (meta.contains("truncation_order")) r.metadata().truncation_order = meta.at("truncation_order").get<std::size_t>();
    for (const auto& c : field(j, "checks")) {
        const std::string name = field(c, "name").get<std::string>();
        const std::string status = field(c, "status").get<std::string>();
        if (status == "pass") {
            r.pass(name);
        } else if (status == "fail") {
            const Json& w = field(c, "witness");
            r.fail(name, Witness{w.at("indices").get<std::vector<int>>(), w.at("monomial").get<std::string>(),
                                 w.at("value").get<std::string>()});
        } else {
            throw ParseError("check status must be pass or fail");
        }
    }
    if (j.contains("facts")) {
        for (const auto& [k, v] : j.at("facts").items()) r.fact(k, v.get<std::string>());
    }
    return r;
}

}  // namespace affrep::json
