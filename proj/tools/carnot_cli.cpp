// Command-line front end over the C interface.

#include "carnot/carnot.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

using Json = nlohmann::ordered_json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Json load(const std::string& text_or_path) {
  std::string text = text_or_path;
  if (!text.empty() && text[0] != '{' && text[0] != '[') {
    std::ifstream in(text_or_path);
    if (!in) throw UsageError("cannot read '" + text_or_path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  try {
    return Json::parse(text);
  } catch (const std::exception& e) {
    throw UsageError("invalid JSON in '" + text_or_path + "': " + e.what());
  }
}

// A preset name, or a system spec as JSON / file.
Json system_arg(const std::string& s, std::optional<int> K) {
  for (const char* p : {"filtration", "degenerate", "abelian-chain", "contracting"})
    if (s == p) return {{"preset", s}, {"K", K.value_or(4)}};
  return load(s);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

int run(const std::string& command, const Json& request, const std::string& out_path) {
  const std::string body = request.dump();
  std::optional<std::filesystem::path> cache;
  if (const char* dir = std::getenv("CARNOT_CACHE_DIR"); dir && *dir) {
    std::ostringstream name;
    name << std::hex << fnv1a(command + "\n" + body) << ".out";
    cache = std::filesystem::path(dir) / name.str();
  }
  std::string output;
  if (cache && std::filesystem::exists(*cache)) {
    std::ifstream in(*cache, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    output = ss.str();
  } else {
    char* response = nullptr;
    carnot_status st = carnot_execute(command.c_str(), body.c_str(), &response);
    if (st != CARNOT_OK) {
      std::cerr << "error: " << carnot_last_error() << "\n";
      return static_cast<int>(st);
    }
    output = response;
    carnot_free_string(response);
    if (cache) {
      std::error_code ec;
      std::filesystem::create_directories(cache->parent_path(), ec);
      std::ofstream(*cache, std::ios::binary) << output;
    }
  }
  if (out_path.empty()) {
    std::cout << output;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw UsageError("cannot write '" + out_path + "'");
    out << output;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Carnot groups, direct systems and distance brackets"};
  app.require_subcommand(1);
  app.fallthrough();
  bool as_json = false, as_csv = false;
  unsigned long long seed = 1;
  std::string out_path;
  app.add_flag("--json", as_json, "JSON output (default for most commands)");
  app.add_flag("--csv", as_csv, "CSV output where supported");
  app.add_option("--seed", seed, "seed for every sampled quantity");
  app.add_option("-o,--out", out_path, "write the output to a file");

  // Shared knobs.
  int segments = 8, restarts = 3, iterations = 80, samples = -1;
  std::optional<int> K;
  auto budget = [&](CLI::App* c) {
    c->add_option("--segments", segments, "segments per candidate path");
    c->add_option("--restarts", restarts, "random restarts of the path search");
    c->add_option("--iterations", iterations, "optimizer iterations per restart");
  };

  Json req = Json::object();
  std::string command;

  // hall-basis
  auto* hb = app.add_subcommand("hall-basis", "Hall basis and structure constants");
  int rank = 2, step = 3;
  std::string algebra;
  bool table = false;
  hb->add_option("--rank", rank);
  hb->add_option("--step", step);
  hb->add_option("--algebra", algebra, "algebra id instead of rank/step");
  hb->add_flag("--table", table, "include the bracket table");

  // group law
  std::string x, y, lambda;
  auto* mul = app.add_subcommand("mul", "product x y");
  mul->add_option("--x", x, "element JSON or file")->required();
  mul->add_option("--y", y, "element JSON or file")->required();
  auto* inv = app.add_subcommand("inv", "inverse");
  inv->add_option("--x", x)->required();
  auto* dil = app.add_subcommand("dilate", "dilation");
  dil->add_option("--x", x)->required();
  dil->add_option("--lambda", lambda, "p/q")->required();

  // lift
  auto* lift = app.add_subcommand("lift", "horizontal lift of a planar axis-parallel polygon");
  std::string points, epsilon = "1";
  bool gamma = false;
  lift->add_option("--algebra", algebra)->required();
  lift->add_option("--points", points, "JSON array of [\"x\",\"y\"] pairs");
  lift->add_flag("--gamma", gamma, "the square loop (0,0),(-1,0),(-1,eps),(0,eps)");
  lift->add_option("--epsilon", epsilon);

  // ccdist
  auto* cc = app.add_subcommand("ccdist", "certified bracket for the CC distance");
  bool witness = false;
  cc->add_option("--x", x)->required();
  cc->add_option("--y", y, "optional second point: bracket d(x, y)");
  cc->add_flag("--witness", witness, "include the witness path");
  budget(cc);

  // lipschitz
  auto* lip = app.add_subcommand("lipschitz", "Lipschitz constant of a morphism");
  std::string morphism, backend = "box";
  lip->add_option("--morphism", morphism, "morphism JSON or file")->required();
  lip->add_option("--backend", backend)->check(CLI::IsMember({"box", "cc"}));
  lip->add_option("--samples", samples);

  // modulus
  auto* mod = app.add_subcommand("modulus-probe", "empirical modulus of continuity");
  std::string map, base, eps_str;
  mod->add_option("--map", map, "map JSON or file")->required();
  mod->add_option("--base", base)->required();
  mod->add_option("--epsilon", eps_str)->required();
  mod->add_option("--samples", samples);

  // direct systems
  std::string system, condition, t = "1", threshold, cloud;
  int zero_set = 0, scales = 5;
  auto* dl = app.add_subcommand("dl-pseudodist", "infimum-pseudodistance over levels");
  dl->add_option("--system", system, "preset name or system JSON/file")->required();
  dl->add_option("--x", x)->required();
  dl->add_option("--y", y)->required();
  dl->add_option("--K", K);
  dl->add_option("--zero-set", zero_set, "also sample the zero set with this many points");
  budget(dl);
  auto* nd = app.add_subcommand("nondeg-probe", "probes for the non-degeneracy conditions");
  nd->add_option("--system", system)->required();
  nd->add_option("--condition", condition)->required()->check(CLI::IsMember({"c1", "c2", "c3"}));
  nd->add_option("--x", x);
  nd->add_option("--cloud", cloud, "JSON array of elements (c3)");
  nd->add_option("--t", t);
  nd->add_option("--K", K);
  nd->add_option("--scales", scales);
  nd->add_option("--samples", samples);
  nd->add_option("--threshold", threshold);
  auto* fr = app.add_subcommand("filtration-report", "generation, nilpotency and isometry checks");
  fr->add_option("--system", system)->required();
  fr->add_option("--K", K);
  fr->add_option("--samples", samples);

  // towers
  auto* tw = app.add_subcommand("tower-supdist", "sup distance on an inverse tower");
  std::string tower;
  tw->add_option("--K", K);
  tw->add_option("--tower", tower, "tower JSON or file (default: free(2,k) tower)");
  tw->add_option("--epsilon", epsilon, "compare e with the lifted square loop endpoints");
  tw->add_option("--x", x, "JSON array of elements per level");
  tw->add_option("--y", y);
  budget(tw);

  // rademacher
  auto* rp = app.add_subcommand("rademacher-probe", "Gateaux differential probe");
  std::string f, p, dirs, lip_override;
  int schedule = 20, equi = 0;
  rp->add_option("--f", f, "function expression JSON or file")->required();
  rp->add_option("--p", p, "base point")->required();
  rp->add_option("--dirs", dirs, "JSON array of direction elements");
  rp->add_option("--schedule", schedule, "lambda = +-2^-m, m = 1..M");
  rp->add_option("--equilipschitz", equi, "also check the equi-Lipschitz bound on this many samples");
  rp->add_option("--lip", lip_override, "Lipschitz constant to use in that check");

  // repro
  auto* rep = app.add_subcommand("repro", "reproduction tables");
  std::string example;
  int kmax = 4;
  rep->add_option("example", example)->required()->check(CLI::IsMember({"degenerate"}));
  rep->add_option("--epsilon", epsilon);
  rep->add_option("--kmax", kmax);
  budget(rep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    auto* sub = app.get_subcommands().front();
    command = sub->get_name();
    req["seed"] = seed;
    if (as_csv) req["format"] = "csv";
    else if (as_json) req["format"] = "json";
    auto set_budget = [&] { req["budget"] = {{"segments", segments}, {"restarts", restarts}, {"iterations", iterations}}; };
    if (samples >= 0) req["samples"] = samples;

    if (sub == hb) {
      if (!algebra.empty()) req["algebra"] = algebra;
      else req["rank"] = rank, req["step"] = step;
      req["table"] = table;
    } else if (sub == mul) {
      req["x"] = load(x);
      req["y"] = load(y);
    } else if (sub == inv) {
      req["x"] = load(x);
    } else if (sub == dil) {
      req["x"] = load(x);
      req["lambda"] = lambda;
    } else if (sub == lift) {
      req["algebra"] = algebra;
      if (gamma) req["curve"] = "gamma", req["epsilon"] = epsilon;
      else if (!points.empty()) req["points"] = load(points);
      else throw UsageError("lift needs --points or --gamma");
    } else if (sub == cc) {
      req["x"] = load(x);
      if (!y.empty()) req["y"] = load(y);
      req["witness"] = witness;
      set_budget();
    } else if (sub == lip) {
      req["morphism"] = load(morphism);
      req["backend"] = backend;
    } else if (sub == mod) {
      req["map"] = load(map);
      req["base"] = load(base);
      req["epsilon"] = eps_str;
    } else if (sub == dl) {
      req["system"] = system_arg(system, K);
      req["x"] = load(x);
      req["y"] = load(y);
      if (K) req["K"] = *K;
      if (zero_set > 0) req["zero_set_samples"] = zero_set;
      set_budget();
    } else if (sub == nd) {
      req["system"] = system_arg(system, K);
      req["condition"] = condition;
      if (!x.empty()) req["x"] = load(x);
      if (!cloud.empty()) req["cloud"] = load(cloud);
      req["t"] = t;
      if (K) req["K"] = *K;
      req["scales"] = scales;
      if (!threshold.empty()) req["threshold"] = threshold;
    } else if (sub == fr) {
      req["system"] = system_arg(system, K);
    } else if (sub == tw) {
      if (!tower.empty()) req["tower"] = load(tower);
      else req["K"] = K.value_or(4);
      if (!x.empty()) {
        req["x"] = load(x);
        req["y"] = load(y);
      } else {
        req["epsilon"] = epsilon;
      }
      set_budget();
    } else if (sub == rp) {
      req["f"] = load(f);
      req["p"] = load(p);
      if (!dirs.empty()) req["dirs"] = load(dirs);
      req["schedule"] = schedule;
      if (equi > 0) {
        req["equilipschitz"] = {{"samples", equi}};
        if (!lip_override.empty()) req["equilipschitz"]["lipschitz"] = lip_override;
      }
    } else if (sub == rep) {
      command = "repro";
      req["example"] = example;
      req["epsilon"] = epsilon;
      req["kmax"] = kmax;
      if (!as_json) req["format"] = "csv";
      set_budget();
    }
    return run(command, req, out_path);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
