#include "carnot/serialization.hpp"

#include <cstdio>

namespace carnot {

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) fail(ErrorKind::Parse, std::string("missing field '") + key + "'");
  return j.at(key);
}

int int_from(const Json& j, const char* what) {
  if (!j.is_number_integer()) fail(ErrorKind::Parse, std::string(what) + " must be an integer");
  return j.get<int>();
}

std::vector<Rational> dense_from(const Json& j) {
  if (!j.is_array()) fail(ErrorKind::Parse, "expected an array of rationals");
  std::vector<Rational> out;
  for (const auto& v : j) out.push_back(rational_from(v));
  return out;
}

Json dense_json(const std::vector<Rational>& v) {
  Json a = Json::array();
  for (const auto& q : v) a.push_back(rational_json(q));
  return a;
}

}  // namespace

Json rational_json(const Rational& q) { return to_string(q); }

Rational rational_from(const Json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long>());
  fail(ErrorKind::Parse, "rationals are written as \"p/q\" strings or integers, got " + j.dump());
}

double evidence(double x) {
  if (!std::isfinite(x)) return x;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

// ---- algebras ------------------------------------------------------------------

Json algebra_json(const LieAlgebra& alg, bool full_table) {
  Json j;
  j["id"] = alg.id();
  j["kind"] = to_string(alg.kind());
  j["rank"] = alg.rank();
  j["step"] = alg.step();
  j["dimension"] = alg.dim();
  if (full_table || alg.kind() == AlgebraKind::Custom) {
    Json basis = Json::array();
    for (const auto& w : alg.basis()) {
      Json b;
      b["label"] = w.label;
      b["degree"] = w.degree;
      if (w.left >= 0) b["factors"] = {w.left, w.right};
      basis.push_back(b);
    }
    j["basis"] = basis;
    Json br = Json::array();
    for (const auto& e : alg.upper_entries()) {
      Json v = Json::array();
      for (const auto& [k, q] : e.value) v.push_back({k, rational_json(q)});
      br.push_back({{"i", e.i}, {"j", e.j}, {"value", v}});
    }
    j["brackets"] = br;
  }
  return j;
}

AlgebraPtr algebra_from(const Json& j, const SizeCap& cap) {
  if (j.is_string()) return algebra_from_id(j.get<std::string>(), cap);
  if (!j.is_object()) fail(ErrorKind::Parse, "algebra must be an id string or an object");
  if (j.contains("basis")) {
    std::vector<BasisWord> basis;
    int rank = 0, step = 1;
    for (const auto& b : field(j, "basis")) {
      BasisWord w;
      w.index = static_cast<int>(basis.size());
      w.degree = int_from(field(b, "degree"), "degree");
      w.label = b.value("label", "E" + std::to_string(w.index + 1));
      if (b.contains("factors")) {
        w.left = int_from(b["factors"].at(0), "factor");
        w.right = int_from(b["factors"].at(1), "factor");
      }
      if (w.degree == 1) ++rank;
      step = std::max(step, w.degree);
      basis.push_back(std::move(w));
    }
    std::vector<LieAlgebra::Entry> entries;
    for (const auto& e : j.value("brackets", Json::array())) {
      Combination c;
      for (const auto& t : field(e, "value")) c.emplace_back(int_from(t.at(0), "index"), rational_from(t.at(1)));
      std::sort(c.begin(), c.end());
      entries.push_back({int_from(field(e, "i"), "i"), int_from(field(e, "j"), "j"), std::move(c)});
    }
    std::string id = j.value("id", std::string("custom"));
    return std::make_shared<LieAlgebra>(id, AlgebraKind::Custom, rank, step, std::move(basis), entries);
  }
  if (j.contains("id") && !j.contains("kind")) return algebra_from_id(j["id"].get<std::string>(), cap);
  const std::string kind = field(j, "kind").get<std::string>();
  if (kind == "free") return free_nilpotent(int_from(field(j, "rank"), "rank"), int_from(field(j, "step"), "step"), cap);
  if (kind == "heisenberg") return free_nilpotent(2, 2, cap);
  if (kind == "amalgam") return amalgam_algebra(int_from(field(j, "i"), "i"), cap);
  if (kind == "abelian") {
    std::vector<int> w;
    for (const auto& d : field(j, "weights")) w.push_back(int_from(d, "weight"));
    return abelian_algebra(w);
  }
  fail(ErrorKind::Parse, "unknown algebra kind '" + kind + "'");
}

// ---- elements and paths ----------------------------------------------------------

Json sparse_json(const std::vector<Rational>& v) {
  Json a = Json::array();
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!is_zero(v[i])) a.push_back({static_cast<int>(i), rational_json(v[i])});
  return a;
}

std::vector<Rational> sparse_from(const Json& j, int dim) {
  std::vector<Rational> v(static_cast<std::size_t>(dim));
  if (!j.is_array()) fail(ErrorKind::Parse, "coordinates must be an array of [index, \"p/q\"] pairs");
  for (const auto& t : j) {
    if (!t.is_array() || t.size() != 2) fail(ErrorKind::Parse, "coordinate entries are [index, \"p/q\"] pairs");
    int i = int_from(t[0], "basis index");
    if (i < 0 || i >= dim) fail(ErrorKind::Validation, "basis index " + std::to_string(i) + " out of range");
    v[static_cast<std::size_t>(i)] += rational_from(t[1]);
  }
  return v;
}

Json element_json(const GroupElement& x) {
  Json j;
  j["algebra_id"] = x.algebra->id();
  j["coords"] = sparse_json(x.coords);
  return j;
}

GroupElement element_from(const Json& j, const AlgebraPtr& alg) {
  if (j.contains("algebra_id") && j["algebra_id"].get<std::string>() != alg->id() &&
      algebra_from_id(j["algebra_id"].get<std::string>())->id() != alg->id())
    fail(ErrorKind::Validation, "element of " + j["algebra_id"].get<std::string>() + " where " + alg->id() + " is expected");
  return GroupElement::from_coords(alg, sparse_from(field(j, "coords"), alg->dim()));
}

GroupElement element_from(const Json& j, const SizeCap& cap) {
  return element_from(j, algebra_from_id(field(j, "algebra_id").get<std::string>(), cap));
}

Json path_json(const HorizontalPath& p) {
  Json j;
  j["algebra_id"] = p.algebra->id();
  Json segs = Json::array();
  for (const auto& s : p.segments) segs.push_back({{"direction", dense_json(s.direction)}, {"duration", rational_json(s.duration)}});
  j["segments"] = segs;
  return j;
}

HorizontalPath path_from(const Json& j, const AlgebraPtr& alg) {
  HorizontalPath p = HorizontalPath::empty(alg);
  for (const auto& s : field(j, "segments")) {
    Segment seg{dense_from(field(s, "direction")), rational_from(field(s, "duration"))};
    if (static_cast<int>(seg.direction.size()) != alg->first_layer_dim())
      fail(ErrorKind::Validation, "segment direction has the wrong length");
    if (sgn(seg.duration) < 0) fail(ErrorKind::Validation, "negative segment duration");
    p.segments.push_back(std::move(seg));
  }
  return p;
}

// ---- morphisms and systems -----------------------------------------------------------

Morphism morphism_from(const Json& j, const SizeCap& cap) {
  AlgebraPtr src = algebra_from(field(j, "source"), cap);
  AlgebraPtr tgt = algebra_from(field(j, "target"), cap);
  std::vector<std::vector<Rational>> imgs;
  for (const auto& im : field(j, "images")) imgs.push_back(sparse_from(im, tgt->dim()));
  return build_morphism(src, tgt, imgs);
}

Json morphism_json(const Morphism& m) {
  Json j;
  j["source"] = m.source()->id();
  j["target"] = m.target()->id();
  Json imgs = Json::array();
  for (const auto& im : m.generator_images()) imgs.push_back(sparse_json(im));
  j["images"] = imgs;
  return j;
}

SystemSpec system_spec_from(const Json& j) {
  if (j.contains("preset")) {
    SystemSpec s = preset_spec(j["preset"].get<std::string>(), int_from(field(j, "K"), "K"));
    if (j.contains("backend")) s.backend = parse_backend(j["backend"].get<std::string>());
    return s;
  }
  SystemSpec s;
  s.name = j.value("name", std::string("custom"));
  for (const auto& l : field(j, "levels")) {
    AlgebraPtr a = algebra_from(l);
    s.levels.push_back(a->id());
    s.algebras.push_back(a);
  }
  for (const auto& c : j.value("connectors", Json::array())) {
    ConnectorSpec cs;
    cs.from = int_from(field(c, "from"), "from");
    cs.to = int_from(field(c, "to"), "to");
    if (cs.to < 1 || cs.to > static_cast<int>(s.algebras.size()))
      fail(ErrorKind::Validation, "connector target level " + std::to_string(cs.to) + " out of range");
    const int dim = s.algebras[static_cast<std::size_t>(cs.to - 1)]->dim();
    for (const auto& im : field(c, "images")) cs.images.push_back(sparse_from(im, dim));
    s.connectors.push_back(std::move(cs));
  }
  s.backend = parse_backend(j.value("backend", std::string("cc")));
  return s;
}

Json system_spec_json(const SystemSpec& s) {
  Json j;
  j["name"] = s.name;
  j["levels"] = s.levels;
  Json cs = Json::array();
  for (const auto& c : s.connectors) {
    Json imgs = Json::array();
    for (const auto& im : c.images) imgs.push_back(sparse_json(im));
    cs.push_back({{"from", c.from}, {"to", c.to}, {"images", imgs}});
  }
  j["connectors"] = cs;
  j["backend"] = to_string(s.backend);
  return j;
}

ColimitElement colimit_element_from(const Json& j, const DirectSystem& sys) {
  int level = j.contains("level") ? int_from(j["level"], "level") : 1;
  if (level < 1 || level > sys.size()) fail(ErrorKind::Validation, "element level " + std::to_string(level) + " out of range");
  return {level, element_from(j, sys.group(level))};
}

Json colimit_element_json(const ColimitElement& x) {
  Json j = element_json(x.rep);
  j["level"] = x.level;
  return j;
}

// ---- expressions ----------------------------------------------------------------------

ExprPtr expr_from(const Json& j, const AlgebraPtr& alg) {
  const std::string n = field(j, "node").get<std::string>();
  NodeKind k = parse_node_kind(n);
  auto arg = [&] { return expr_from(field(j, "arg"), alg); };
  auto args = [&] {
    const Json& a = field(j, "args");
    if (!a.is_array() || a.size() != 2) fail(ErrorKind::Parse, n + " takes two args");
    return std::make_pair(expr_from(a[0], alg), expr_from(a[1], alg));
  };
  ExprPtr out;
  switch (k) {
    case NodeKind::Const: out = fx::constant(rational_from(field(j, "value"))); break;
    case NodeKind::Coord: out = fx::coord(int_from(field(j, "index"), "index")); break;
    case NodeKind::Linear: out = fx::linear(dense_from(field(j, "weights"))); break;
    case NodeKind::QuasiNorm: out = fx::quasinorm(); break;
    case NodeKind::Translate: out = fx::translate(element_from(field(j, "element"), alg), arg()); break;
    case NodeKind::Dilate: out = fx::dilate(rational_from(field(j, "lambda")), arg()); break;
    case NodeKind::Scale: out = fx::scale(rational_from(field(j, "factor")), arg()); break;
    case NodeKind::Abs: out = fx::abs(arg()); break;
    case NodeKind::Add: {
      auto [a, b] = args();
      out = fx::add(a, b);
      break;
    }
    case NodeKind::Min: {
      auto [a, b] = args();
      out = fx::min(a, b);
      break;
    }
    case NodeKind::Max: {
      auto [a, b] = args();
      out = fx::max(a, b);
      break;
    }
  }
  validate(*out, alg);
  return out;
}

Json expr_json(const Expr& f) {
  Json j;
  j["node"] = to_string(f.kind);
  switch (f.kind) {
    case NodeKind::Const: j["value"] = rational_json(f.value); break;
    case NodeKind::Coord: j["index"] = f.index; break;
    case NodeKind::Linear: j["weights"] = dense_json(f.weights); break;
    case NodeKind::QuasiNorm: break;
    case NodeKind::Translate:
      j["element"] = element_json(*f.element);
      j["arg"] = expr_json(*f.children[0]);
      break;
    case NodeKind::Dilate:
      j["lambda"] = rational_json(f.value);
      j["arg"] = expr_json(*f.children[0]);
      break;
    case NodeKind::Scale:
      j["factor"] = rational_json(f.value);
      j["arg"] = expr_json(*f.children[0]);
      break;
    case NodeKind::Abs: j["arg"] = expr_json(*f.children[0]); break;
    case NodeKind::Add:
    case NodeKind::Min:
    case NodeKind::Max: j["args"] = {expr_json(*f.children[0]), expr_json(*f.children[1])}; break;
  }
  return j;
}

}  // namespace carnot
