#include "carnot/service.hpp"

#include "carnot/serialization.hpp"

#include <functional>
#include <map>
#include <sstream>

namespace carnot {

namespace {

using Handler = std::function<std::string(const Json&)>;

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json bracket_json(const Rational& lower, const Rational& upper) {
  Json j;
  j["lower"] = rational_json(lower);
  j["upper"] = rational_json(upper);
  j["lower_decimal"] = to_decimal(lower, 12, Rounding::Down);
  j["upper_decimal"] = to_decimal(upper, 12, Rounding::Up);
  j["label"] = lower == upper ? "exact" : "certified-bound";
  return j;
}

Json interval_json(const Interval& iv) {
  Json j = bracket_json(iv.lo, iv.hi);
  return j;
}

unsigned long long seed_of(const Json& r) { return r.value("seed", 1ULL); }

SizeCap cap_of(const Json& r) {
  SizeCap cap;
  if (r.contains("max_dimension")) cap.max_dimension = r["max_dimension"].get<std::size_t>();
  return cap;
}

SearchBudget budget_of(const Json& r) {
  SearchBudget b;
  b.seed = seed_of(r);
  if (r.contains("budget")) {
    const Json& j = r["budget"];
    b.segments = j.value("segments", b.segments);
    b.restarts = j.value("restarts", b.restarts);
    b.iterations = j.value("iterations", b.iterations);
    b.max_path_segments = j.value("max_path_segments", b.max_path_segments);
  }
  if (b.segments < 1 || b.restarts < 0 || b.iterations < 0) fail(ErrorKind::Validation, "search budget out of range");
  return b;
}

const Json& need(const Json& r, const char* key) {
  if (!r.contains(key)) fail(ErrorKind::Parse, std::string("request is missing '") + key + "'");
  return r.at(key);
}

Json level_json(const LevelDistance& d) {
  Json j = bracket_json(d.lower, d.upper);
  j["level"] = d.level;
  j["label"] = d.label;
  if (d.box) {
    j["exact_value"] = d.box->to_string();
  }
  if (d.witness) j["witness_length"] = rational_json(dyadic_ceil(d.witness->length().hi));
  return j;
}

Json certificates_json(const std::vector<Certificate>& cs) {
  Json a = Json::array();
  for (const auto& c : cs) a.push_back({{"kind", c.kind}, {"detail", c.detail}, {"value", rational_json(c.value)}});
  return a;
}

DirectSystem system_of(const Json& r) { return DirectSystem::build(system_spec_from(need(r, "system")), cap_of(r)); }

// ---- commands ---------------------------------------------------------------------

std::string hall_basis_cmd(const Json& r) {
  AlgebraPtr alg = r.contains("algebra") ? algebra_from(r["algebra"], cap_of(r))
                                         : free_nilpotent(need(r, "rank").get<int>(), need(r, "step").get<int>(), cap_of(r));
  Json j;
  j["algebra"] = algebra_json(*alg, r.value("table", false));
  j["dims_per_degree"] = alg->dims_per_degree();
  Json words = Json::array();
  for (const auto& w : alg->basis()) words.push_back({{"index", w.index}, {"degree", w.degree}, {"word", w.label}});
  j["words"] = words;
  StructureReport rep = verify_jacobi(*alg);
  j["jacobi"] = rep.ok() ? "verified" : "violated";
  j["label"] = "exact";
  if (r.value("format", std::string("json")) == "csv") {
    std::ostringstream os;
    os << "index,degree,word\n";
    for (const auto& w : alg->basis()) os << w.index << ',' << w.degree << ",\"" << w.label << "\"\n";
    return os.str();
  }
  return dump(j);
}

std::string mul_cmd(const Json& r) {
  GroupElement x = element_from(need(r, "x"), cap_of(r));
  GroupElement y = element_from(need(r, "y"), x.algebra);
  return dump({{"result", element_json(mul(x, y))}, {"label", "exact"}});
}

std::string inv_cmd(const Json& r) {
  GroupElement x = element_from(need(r, "x"), cap_of(r));
  return dump({{"result", element_json(inverse(x))}, {"label", "exact"}});
}

std::string dilate_cmd(const Json& r) {
  GroupElement x = element_from(need(r, "x"), cap_of(r));
  Rational l = rational_from(need(r, "lambda"));
  return dump({{"result", element_json(dilate(l, x))}, {"label", "exact"}});
}

std::string lift_cmd(const Json& r) {
  AlgebraPtr alg = algebra_from(need(r, "algebra"), cap_of(r));
  std::vector<std::pair<Rational, Rational>> pts;
  if (r.contains("curve")) {
    if (r["curve"].get<std::string>() != "gamma") fail(ErrorKind::Validation, "the only named curve is 'gamma'");
    pts = gamma_curve(rational_from(need(r, "epsilon")));
  } else {
    for (const auto& p : need(r, "points")) {
      if (!p.is_array() || p.size() != 2) fail(ErrorKind::Parse, "points are [\"x\", \"y\"] pairs");
      pts.emplace_back(rational_from(p[0]), rational_from(p[1]));
    }
  }
  LiftResult lift = lift_polygonal(pts, alg);
  Json j;
  j["endpoint"] = element_json(lift.endpoint);
  j["length"] = rational_json(lift.length);
  j["path"] = path_json(lift.path);
  j["label"] = "exact";
  return dump(j);
}

std::string ccdist_cmd(const Json& r) {
  GroupElement x = element_from(need(r, "x"), cap_of(r));
  if (r.contains("y")) x = mul(inverse(x), element_from(r["y"], x.algebra));
  std::vector<HorizontalPath> seeds;
  for (const auto& s : r.value("seeds", Json::array())) seeds.push_back(path_from(s, x.algebra));
  DistanceBracket br = cc_distance(x, budget_of(r), seeds);
  Json j = bracket_json(br.lower, br.upper);
  j["algebra_id"] = x.algebra->id();
  j["upper_source"] = br.upper_source;
  j["witness_length"] = rational_json(dyadic_ceil(br.witness.length().hi));
  j["witness_segments"] = br.witness.segments.size();
  j["certificates"] = certificates_json(br.certificates);
  if (r.value("witness", false)) j["witness"] = path_json(br.witness);
  return dump(j);
}

std::string lipschitz_cmd(const Json& r) {
  Morphism phi = morphism_from(need(r, "morphism"), cap_of(r));
  std::string backend = r.value("backend", std::string("box"));
  LipschitzEstimate e = lipschitz_estimate(phi, backend, r.value("samples", 256), seed_of(r));
  Json j;
  j["backend"] = e.backend;
  j["morphism"] = morphism_json(phi);
  if (e.exact) {
    j["exact"] = e.exact->to_string();
    j["value"] = interval_json(e.exact->bounds());
    j["label"] = "exact";
  } else {
    j["estimate"] = evidence(e.estimate);
    j["at_most_one"] = e.at_most_one;
    j["label"] = e.at_most_one ? "certified-bound" : "evidence";
  }
  j["certified"] = e.certified;
  j["note"] = e.note;
  return dump(j);
}

MapDescriptor map_of(const Json& j, const AlgebraPtr& alg) {
  MapDescriptor m;
  const std::string kind = need(j, "kind").get<std::string>();
  if (kind == "identity") m.kind = MapKind::Identity;
  else if (kind == "left-translation") m.kind = MapKind::LeftTranslation;
  else if (kind == "right-translation") m.kind = MapKind::RightTranslation;
  else if (kind == "inverse") m.kind = MapKind::Inverse;
  else if (kind == "dilation") m.kind = MapKind::Dilation;
  else if (kind == "morphism") m.kind = MapKind::Morphism;
  else fail(ErrorKind::Parse, "unknown map kind '" + kind + "'");
  if (m.kind == MapKind::LeftTranslation || m.kind == MapKind::RightTranslation) m.element = element_from(need(j, "element"), alg);
  if (m.kind == MapKind::Dilation) m.lambda = rational_from(need(j, "lambda"));
  if (m.kind == MapKind::Morphism) m.morphism = morphism_from(need(j, "morphism"));
  return m;
}

std::string modulus_cmd(const Json& r) {
  GroupElement base = element_from(need(r, "base"), cap_of(r));
  MapDescriptor m = map_of(need(r, "map"), base.algebra);
  ProbeBudget b;
  b.samples = r.value("samples", b.samples);
  b.seed = seed_of(r);
  b.rho_min = r.value("rho_min", b.rho_min);
  b.rho_max = r.value("rho_max", b.rho_max);
  b.bisection_steps = r.value("bisection_steps", b.bisection_steps);
  double eps = need(r, "epsilon").is_number() ? r["epsilon"].get<double>() : rational_from(r["epsilon"]).get_d();
  ModulusEstimate e = modulus_probe(m, base, eps, b);
  Json j;
  j["map"] = e.map_id;
  j["base"] = element_json(e.base);
  j["epsilon"] = evidence(e.epsilon);
  if (e.unbounded) j["omega"] = "unbounded";
  else j["omega"] = evidence(e.omega);
  j["max_ratio"] = evidence(e.max_ratio);
  j["samples"] = e.samples;
  j["status"] = e.status;
  j["label"] = "evidence";
  return dump(j);
}

std::string pseudodist_cmd(const Json& r) {
  DirectSystem sys = system_of(r);
  ColimitElement x = colimit_element_from(need(r, "x"), sys);
  ColimitElement y = colimit_element_from(need(r, "y"), sys);
  int K = r.value("K", sys.size());
  PseudodistanceReport rep = infimum_pseudodistance(sys, x, y, K, budget_of(r));
  Json j;
  j["system"] = sys.name();
  j["backend"] = to_string(sys.backend());
  j["isometric"] = rep.isometric;
  j["join"] = rep.join;
  j["K"] = rep.K;
  Json levels = Json::array();
  for (std::size_t k = 0; k < rep.levels.size(); ++k) {
    Json l = level_json(rep.levels[k]);
    l["running_inf_upper"] = rational_json(rep.running_inf_upper[k]);
    levels.push_back(l);
  }
  j["levels"] = levels;
  j["tail"] = rep.tail;
  j["pseudodistance"] = bracket_json(rep.isometric ? rep.levels.back().lower : Rational(0), rep.running_inf_upper.back());
  if (!rep.isometric) j["pseudodistance"]["label"] = "certified-bound";
  if (r.contains("zero_set_samples")) {
    ZeroSetReport z = zero_set_probe(sys, K, r["zero_set_samples"].get<int>(), seed_of(r));
    Json c = Json::array();
    for (const auto& cand : z.candidates)
      c.push_back({{"element", colimit_element_json(cand.element)}, {"first_upper", rational_json(cand.first_upper)},
                   {"last_upper", rational_json(cand.last_upper)}});
    j["zero_set"] = {{"samples", z.samples}, {"certified_nonzero", z.certified_nonzero}, {"candidates", c}, {"label", "evidence"}};
  }
  for (const auto& n : sys.notes()) j["notes"].push_back(n);
  if (r.value("format", std::string("json")) == "csv") {
    std::ostringstream os;
    os << "level,lower,upper,running_inf_upper,label\n";
    for (std::size_t k = 0; k < rep.levels.size(); ++k)
      os << rep.levels[k].level << ',' << to_string(rep.levels[k].lower) << ',' << to_string(rep.levels[k].upper) << ','
         << to_string(rep.running_inf_upper[k]) << ',' << rep.levels[k].label << '\n';
    return os.str();
  }
  return dump(j);
}

std::string nondeg_cmd(const Json& r) {
  DirectSystem sys = system_of(r);
  NondegBudget b;
  b.seed = seed_of(r);
  b.K = r.value("K", std::min(b.K, sys.size()));
  b.scales = r.value("scales", b.scales);
  b.samples = r.value("samples", b.samples);
  if (r.contains("threshold")) b.threshold = rational_from(r["threshold"]);
  b.search = budget_of(r);
  if (!r.contains("budget")) b.search.restarts = 0;
  if (b.scales < 2 || b.K < 1) fail(ErrorKind::Validation, "nondeg probe needs scales >= 2 and K >= 1");
  const std::string cond = need(r, "condition").get<std::string>();
  NondegReport rep;
  if (cond == "c1") {
    rep = nondeg_probe_c1(sys, colimit_element_from(need(r, "x"), sys), rational_from(r.value("t", Json("1"))), b);
  } else if (cond == "c2") {
    rep = nondeg_probe_c2(sys, colimit_element_from(need(r, "x"), sys), b);
  } else if (cond == "c3") {
    std::vector<ColimitElement> cloud;
    if (r.contains("cloud"))
      for (const auto& e : r["cloud"]) cloud.push_back(colimit_element_from(e, sys));
    else
      cloud.push_back(colimit_element_from(need(r, "x"), sys));
    rep = nondeg_probe_c3(sys, cloud, b);
  } else {
    fail(ErrorKind::Validation, "condition must be c1, c2 or c3");
  }
  Json j;
  j["system"] = sys.name();
  j["condition"] = rep.condition;
  j["verdict"] = rep.verdict;
  j["threshold"] = rational_json(b.threshold);
  Json rows = Json::array();
  for (const auto& row : rep.rows) {
    Json x = bracket_json(row.lower, row.upper);
    x["label"] = sys.isometric() ? (row.lower == row.upper ? "exact" : "certified-bound") : "evidence";
    x["sample"] = row.label;
    x["parameter"] = rational_json(row.parameter);
    x["input"] = rational_json(row.input);
    rows.push_back(x);
  }
  j["rows"] = rows;
  j["note"] = rep.note;
  j["label"] = "evidence";
  return dump(j);
}

std::vector<GroupElement> tuple_from(const Json& j, const InverseTower& t) {
  std::vector<GroupElement> out;
  if (!j.is_array()) fail(ErrorKind::Parse, "a tower point is an array of elements, one per level");
  for (std::size_t k = 0; k < j.size(); ++k) {
    if (static_cast<int>(k) >= t.size()) fail(ErrorKind::Validation, "tower point has too many entries");
    out.push_back(element_from(j[k], t.group(static_cast<int>(k) + 1)));
  }
  return out;
}

std::string tower_cmd(const Json& r) {
  InverseTower tower = [&] {
    if (r.contains("tower")) {
      const Json& t = r["tower"];
      TowerSpec spec;
      for (const auto& l : need(t, "levels")) spec.levels.push_back(algebra_from(l)->id());
      for (const auto& p : t.value("projections", Json::array())) {
        ConnectorSpec c;
        c.from = need(p, "from").get<int>();
        c.to = need(p, "to").get<int>();
        if (c.to < 1 || c.to > static_cast<int>(spec.levels.size())) fail(ErrorKind::Validation, "projection target out of range");
        int dim = algebra_from_id(spec.levels[static_cast<std::size_t>(c.to - 1)])->dim();
        for (const auto& im : need(p, "images")) c.images.push_back(sparse_from(im, dim));
        spec.projections.push_back(c);
      }
      return InverseTower::build(spec, cap_of(r));
    }
    return InverseTower::free_tower(need(r, "K").get<int>());
  }();
  std::vector<GroupElement> x, y;
  std::vector<HorizontalPath> seeds;
  if (r.contains("x")) {
    x = tuple_from(r["x"], tower);
    y = tuple_from(need(r, "y"), tower);
  } else {
    // Identity against the endpoints of the lifted square loop at each level.
    Rational eps = rational_from(need(r, "epsilon"));
    for (int k = 1; k <= tower.size(); ++k) {
      LiftResult lift = lift_polygonal(gamma_curve(eps), tower.group(k));
      x.push_back(GroupElement::identity(tower.group(k)));
      y.push_back(lift.endpoint);
      if (k == tower.size()) seeds.push_back(lift.path);
    }
  }
  SupDistanceReport rep = sup_distance(tower, x, y, budget_of(r), seeds);
  Json j;
  j["K"] = tower.size();
  Json levels = Json::array();
  for (const auto& d : rep.levels) levels.push_back(level_json(d));
  j["levels"] = levels;
  j["sup_distance"] = bracket_json(rep.lower, rep.upper);
  j["finite"] = rep.finite;
  return dump(j);
}

std::string filtration_cmd(const Json& r) {
  DirectSystem sys = system_of(r);
  FiltrationReport rep = filtration_report(sys, r.value("samples", 64), seed_of(r));
  Json j;
  j["system"] = sys.name();
  Json levels = Json::array();
  for (const auto& l : rep.levels)
    levels.push_back({{"level", l.level}, {"algebra_id", l.algebra}, {"dimension", l.dimension},
                      {"generated_dimension", l.generated_dimension}, {"step", l.step}, {"generates", l.generates},
                      {"first_layer_preserved", l.first_layer_preserved}});
  j["levels"] = levels;
  j["generation_ok"] = rep.generation_ok;
  j["nilpotent_ok"] = rep.nilpotent_ok;
  j["commutator_samples"] = rep.commutator_samples;
  j["isometry_ok"] = rep.isometry_ok;
  j["isometry_samples"] = rep.isometry_samples;
  j["isometric_connectors"] = sys.isometric();
  j["ok"] = rep.ok();
  j["label"] = sys.backend() == Backend::Box ? "exact" : "certified-bound";
  return dump(j);
}

Json value_json(const Value& v) {
  Json j = interval_json(v.iv);
  j["label"] = v.exact ? "exact" : "certified-bound";
  return j;
}

std::string rademacher_cmd(const Json& r) {
  GroupElement p = element_from(need(r, "p"), cap_of(r));
  ExprPtr f = expr_from(need(r, "f"), p.algebra);
  std::vector<GroupElement> dirs;
  for (const auto& d : r.value("dirs", Json::array())) dirs.push_back(element_from(d, p.algebra));
  GateauxOptions opts;
  opts.schedule = r.value("schedule", opts.schedule);
  if (r.contains("tolerance")) opts.tolerance = r["tolerance"].get<double>();
  DifferentialReport rep = gateaux_probe(*f, p, dirs, opts);
  Json j;
  j["function"] = expr_json(*f);
  j["base"] = element_json(rep.base);
  j["tolerance"] = evidence(rep.tolerance);
  j["exact_function"] = rep.exact_function;
  Json ds = Json::array();
  for (const auto& d : rep.directions) {
    Json x;
    x["direction"] = element_json(d.direction);
    x["verdict"] = d.verdict;
    if (d.verdict == "converged") {
      x["limit"] = value_json(d.limit);
      x["rate"] = evidence(d.rate);
    }
    x["tail_diameter"] = evidence(d.tail_diameter);
    x["two_sided_gap"] = evidence(d.gap);
    if (d.witness)
      x["witness"] = {{{"lambda", rational_json(d.witness->first.lambda)}, {"ratio", value_json(d.witness->first.value)}},
                      {{"lambda", rational_json(d.witness->second.lambda)}, {"ratio", value_json(d.witness->second.value)}}};
    ds.push_back(x);
  }
  j["directions"] = ds;
  j["all_converged"] = rep.all_converged;
  j["nd_flag"] = rep.flagged_nd;
  if (rep.differential) {
    Json w = Json::array();
    for (const auto& q : *rep.differential) w.push_back(rational_json(q));
    j["differential"] = {{"weights", w}, {"label", rep.differential_exact ? "exact" : "evidence"}};
  }
  j["homomorphism"] = {{"result", rep.homomorphism}, {"pairs", rep.homomorphism_pairs}, {"exact", rep.homomorphism_exact}};
  if (r.contains("equilipschitz")) {
    const Json& e = r["equilipschitz"];
    std::vector<Rational> ls;
    for (const auto& l : e.value("lambdas", Json::array())) ls.push_back(rational_from(l));
    std::optional<Rational> lip;
    if (e.contains("lipschitz")) lip = rational_from(e["lipschitz"]);
    EquiLipschitzReport el = equilipschitz_check(*f, p, e.value("samples", 1000), ls, seed_of(r), lip);
    Json v = Json::array();
    for (std::size_t k = 0; k < el.violations.size() && k < 10; ++k) {
      const auto& w = el.violations[k];
      v.push_back({{"lambda", rational_json(w.lambda)}, {"g", element_json(w.g)}, {"h", element_json(w.h)},
                   {"lhs", interval_json(w.lhs)}, {"rhs", rational_json(w.rhs)}});
    }
    j["equilipschitz"] = {{"lipschitz", el.lipschitz ? Json(rational_json(*el.lipschitz)) : Json("unbounded")},
                          {"checks", el.checks},
                          {"violations", el.violations.size()},
                          {"witnesses", v},
                          {"passed", el.passed()},
                          {"note", el.note}};
  }
  j["label"] = "evidence";
  return dump(j);
}

std::string repro_cmd(const Json& r) {
  const std::string what = need(r, "example").get<std::string>();
  if (what != "degenerate") fail(ErrorKind::Validation, "unknown example '" + what + "' (expected degenerate)");
  Rational eps = rational_from(r.value("epsilon", Json("1")));
  int kmax = r.value("kmax", 4);
  auto rows = degenerate_table(eps, kmax, budget_of(r));
  if (r.value("format", std::string("csv")) == "csv") {
    std::ostringstream os;
    os << "k,lower,upper,witness-length,label,lower_decimal,upper_decimal\n";
    for (const auto& row : rows)
      os << row.k << ',' << to_string(row.lower) << ',' << to_string(row.upper) << ',' << to_string(row.witness_length) << ','
         << row.label << ',' << to_decimal(row.lower, 12, Rounding::Down) << ',' << to_decimal(row.upper, 12, Rounding::Up)
         << '\n';
    return os.str();
  }
  Json j;
  j["epsilon"] = rational_json(eps);
  Json a = Json::array();
  for (const auto& row : rows) {
    Json x = bracket_json(row.lower, row.upper);
    x["k"] = row.k;
    x["witness_length"] = rational_json(row.witness_length);
    x["label"] = row.label;
    a.push_back(x);
  }
  j["rows"] = a;
  return dump(j);
}

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> h = {
      {"hall-basis", hall_basis_cmd},   {"mul", mul_cmd},
      {"inv", inv_cmd},                 {"dilate", dilate_cmd},
      {"lift", lift_cmd},               {"ccdist", ccdist_cmd},
      {"lipschitz", lipschitz_cmd},     {"modulus-probe", modulus_cmd},
      {"dl-pseudodist", pseudodist_cmd}, {"nondeg-probe", nondeg_cmd},
      {"tower-supdist", tower_cmd},     {"filtration-report", filtration_cmd},
      {"rademacher-probe", rademacher_cmd}, {"repro", repro_cmd},
  };
  return h;
}

}  // namespace

std::vector<std::string> command_names() {
  std::vector<std::string> out;
  for (const auto& [k, v] : handlers()) out.push_back(k);
  return out;
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return 2;
    case ErrorKind::Validation:
    case ErrorKind::Domain:
    case ErrorKind::Unsupported: return 3;
    case ErrorKind::Resource: return 4;
    case ErrorKind::NoCertifiedPath: return 5;
  }
  return 1;
}

std::string execute_command(const std::string& command, const std::string& request_json) {
  auto it = handlers().find(command);
  if (it == handlers().end()) fail(ErrorKind::Parse, "unknown command '" + command + "'");
  Json request;
  try {
    request = request_json.empty() ? Json::object() : Json::parse(request_json);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Parse, std::string("request is not valid JSON: ") + e.what());
  }
  if (!request.is_object()) fail(ErrorKind::Parse, "request must be a JSON object");
  try {
    return it->second(request);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Parse, std::string("bad request field: ") + e.what());
  }
}

}  // namespace carnot
