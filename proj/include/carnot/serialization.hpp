#pragma once

// JSON forms of algebras, elements, paths, morphisms, direct systems and function
// expressions. Rationals are "p/q" strings.

#include "carnot/rademacher.hpp"

#include <json.hpp>

namespace carnot {

using Json = nlohmann::ordered_json;

Json rational_json(const Rational& q);
Rational rational_from(const Json& j);
/// Evidence floats: rounded to 12 significant digits.
double evidence(double x);

/// {"kind": "free", "rank": r, "step": s} | {"kind": "amalgam", "i": i} | {"kind": "abelian", "weights": [...]}
/// | {"kind": "heisenberg"} | {"kind": "custom", ...full table...} | "free:2:3" (id string).
Json algebra_json(const LieAlgebra& alg, bool full_table = false);
AlgebraPtr algebra_from(const Json& j, const SizeCap& cap = {});

/// {"algebra_id": id, "coords": [[index, "p/q"], ...]} with zero coordinates omitted;
/// an optional "level" is ignored here.
Json element_json(const GroupElement& x);
GroupElement element_from(const Json& j, const AlgebraPtr& alg);
/// Resolves the algebra from the "algebra_id" field.
GroupElement element_from(const Json& j, const SizeCap& cap = {});
std::vector<Rational> sparse_from(const Json& j, int dim);
Json sparse_json(const std::vector<Rational>& v);

Json path_json(const HorizontalPath& p);
HorizontalPath path_from(const Json& j, const AlgebraPtr& alg);

/// {"source": algebra, "target": algebra, "images": [sparse, ...]} per source generator.
Morphism morphism_from(const Json& j, const SizeCap& cap = {});
Json morphism_json(const Morphism& m);

/// {"preset": name, "K": k} or {"name", "levels": [algebra...], "connectors": [{"from","to","images"}], "backend"}.
SystemSpec system_spec_from(const Json& j);
Json system_spec_json(const SystemSpec& s);
ColimitElement colimit_element_from(const Json& j, const DirectSystem& sys);
Json colimit_element_json(const ColimitElement& x);

/// Nested tagged nodes: {"node": "add", "args": [f, g]}, {"node": "coord", "index": 0}, ...
ExprPtr expr_from(const Json& j, const AlgebraPtr& alg);
Json expr_json(const Expr& f);

}  // namespace carnot
