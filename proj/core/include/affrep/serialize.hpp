#pragma once

#include "affrep/connection.hpp"
#include "affrep/curvature_space.hpp"
#include "affrep/poly.hpp"
#include "affrep/report.hpp"
#include "affrep/representability.hpp"

#include <json.hpp>

namespace affrep::json {

using Json = nlohmann::ordered_json;

// All index fields are 1-based; all exact values are fraction strings.
// Parsers throw ParseError on malformed input.

/// {"dim": m, "terms": [{"exps": [...], "coef": "p/q"}]} in canonical order.
Json to_json(const Poly& p);
Poly poly_from_json(const Json& j);

/// {"dim": m, "components": [{"i","j","k","l","value"}]}, nonzero entries in
/// lexicographic index order.
Json to_json(const CurvatureOperator& a);
CurvatureOperator operator_from_json(const Json& j);

/// Dense row-major array of fraction strings.
Json to_json(const RationalMatrix& m);
RationalMatrix matrix_from_json(const Json& j);

/// {"dim": m, "gamma": [{"i","j","k","poly"}]}, nonzero entries with i <= j.
Json to_json(const PolyConnection& c);
PolyConnection connection_from_json(const Json& j);

/// Dense m x m array of Poly objects.
Json to_json(const PolyMatrix& m);
PolyMatrix poly_matrix_from_json(const Json& j, std::size_t dim);

Json to_json(const OneForm& theta);

/// {"dim", "k_table", "layers", "thetas"}.
Json to_json(const RicciFlatSeries& s);
RicciFlatSeries series_from_json(const Json& j);

/// {"C1", "C", "epsilon", "per_layer": [{"nu", "max_ratio", "violations"}], ...}.
Json to_json(const ConvergenceReport& r);

Json to_json(const VerificationReport& r);
VerificationReport report_from_json(const Json& j);

/// Two-space indented dump with a trailing newline.
std::string dump(const Json& j);

}  // namespace affrep::json
