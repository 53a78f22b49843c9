#pragma once

#include <chrono>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mexp/auxiliary.hpp"
#include "mexp/families.hpp"
#include "mexp/graph_io.hpp"
#include "mexp/theorems.hpp"

namespace mexp::cli {

using nlohmann::json;

inline constexpr const char* kVersion = "1.0.0";

enum ExitCode { kOk = 0, kViolation = 1, kUsage = 2 };

struct Common {
  std::string input;
  std::uint64_t seed = 0;
  std::size_t cap = 22;
  double tolerance = kTheoremTolerance;
  std::string walk = "auto";
};

struct Outcome {
  json results;
  json inputs = json::object();
  int status = kOk;
};

inline json rational_json(const Rational& r) { return to_string(r); }

inline json optional_rational(const std::optional<Rational>& r) { return r ? rational_json(*r) : json(nullptr); }

inline json optional_double(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

inline json graph_digest(const std::string& path, const MeasuredGraph& g) {
  return {{"input", path},
          {"vertices", g.size()},
          {"edges", g.edges().size()},
          {"total_measure", rational_json(g.total_measure())},
          {"conductance", g.conductance().has_value()}};
}

inline MeasuredGraph require_graph(const Common& c) {
  if (c.input.empty()) throw InputError("--input is required");
  return load_graph_file(c.input);
}

/// The graph's own conductance when present (or forced), else the auxiliary
/// walk.
inline ReversibleWalk select_walk(const MeasuredGraph& g, const std::string& mode) {
  if (mode == "graph") return walk_from_graph(g);
  if (mode == "auxiliary") return auxiliary_walk(g);
  if (mode != "auto") throw InputError("--walk must be auto, graph or auxiliary");
  return g.conductance() ? walk_from_graph(g) : auxiliary_walk(g);
}

inline EnumerationOptions enumeration(const Common& c) {
  EnumerationOptions opt;
  opt.cap = c.cap;
  return opt;
}

inline VertexSubset parse_subset(const MeasuredGraph& g, const std::string& text) {
  VertexSubset s(g.size());
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    bool found = false;
    for (std::size_t v = 0; v < g.size(); ++v) {
      if (g.label(static_cast<Vertex>(v)) == item) {
        s.insert(static_cast<Vertex>(v));
        found = true;
      }
    }
    if (!found) throw InputError("unknown vertex \"" + item + "\"");
  }
  return s;
}

inline std::vector<Rational> parse_function(const std::string& text, std::size_t n) {
  std::vector<Rational> f;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) f.push_back(parse_rational(item));
  if (f.size() != n) throw InputError("--function needs " + std::to_string(n) + " values");
  return f;
}

inline std::vector<Rational> random_nonnegative_function(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Rational> f;
  for (std::size_t v = 0; v < n; ++v) f.push_back(rng.bernoulli(0.25) ? Rational(0) : random_positive_rational(rng));
  return f;
}

inline json report_json(const InequalityReport& r) {
  json cmp = json::array();
  for (const auto& c : r.comparisons) {
    cmp.push_back({{"relation", c.relation},
                   {"lhs", c.lhs_exact ? rational_json(*c.lhs_exact) : json(c.lhs)},
                   {"rhs", c.rhs_exact ? rational_json(*c.rhs_exact) : json(c.rhs)},
                   {"slack", c.slack},
                   {"holds", c.holds}});
  }
  json inputs = json::object();
  for (const auto& [k, v] : r.inputs) inputs[k] = v;
  return {{"name", r.name}, {"holds", r.holds}, {"comparisons", cmp}, {"inputs", inputs}};
}

// ------------------------------------------------------------ subcommands

inline Outcome cmd_cheeger(const Common& c, const std::string& flavor, const std::string& constraint, bool exact,
                           const std::vector<std::string>& alphas) {
  const auto g = require_graph(c);
  Outcome o;
  o.inputs = graph_digest(c.input, g);
  const auto opt = enumeration(c);
  CheegerCertificate cert;
  std::string method = "enumeration";
  if (flavor == "vertex") {
    if (exact && g.size() > opt.cap) method = "branch-and-bound";
    cert = exact ? cheeger_vertex_exact(g, opt) : cheeger_vertex(g, opt);
  } else if (flavor == "conductance") {
    const auto w = select_walk(g, c.walk);
    if (constraint == "mu") {
      cert = cheeger_conductance(w, opt);
    } else if (constraint == "m") {
      cert = cheeger_conductance(w, g.measure(), opt);
    } else {
      throw InputError("--constraint must be mu or m");
    }
  } else {
    throw InputError("--flavor must be vertex or conductance");
  }
  o.results = {{"value", rational_json(cert.value)},
               {"witness", subset_labels(g, cert.witness)},
               {"flavor", flavor_name(cert.flavor)},
               {"method", method}};
  if (!alphas.empty()) {
    std::vector<Rational> as;
    for (const auto& a : alphas) as.push_back(parse_rational(a));
    json profile = json::array();
    for (const auto& e : asymptotic_profile(g, as, opt)) {
      profile.push_back({{"alpha", rational_json(e.alpha)},
                         {"R", e.radius},
                         {"value", optional_rational(e.value)},
                         {"witness", e.witness ? subset_labels(g, *e.witness) : json(nullptr)}});
    }
    o.results["profile"] = profile;
  }
  return o;
}

inline Outcome cmd_spectrum(const Common& c, const std::string& which) {
  const auto g = require_graph(c);
  Outcome o;
  o.inputs = graph_digest(c.input, g);
  SelfAdjointOperator op;
  if (which == "delta") {
    op = delta_operator(select_walk(g, c.walk));
  } else if (which == "lambda") {
    op = lambda_operator(g);
  } else {
    throw InputError("--operator must be delta or lambda");
  }
  const auto res = spectrum(op);
  o.results = {{"operator", operator_name(op.kind)},
               {"eigenvalues", res.eigenvalues},
               {"gap", optional_double(res.gap)},
               {"zero_multiplicity", res.zero_multiplicity},
               {"sweeps", res.sweeps}};
  return o;
}

inline Outcome cmd_poincare(const Common& c, double p, int restarts) {
  const auto g = require_graph(c);
  Outcome o;
  o.inputs = graph_digest(c.input, g);
  const auto w = select_walk(g, c.walk);
  PoincareOptions popt;
  popt.restarts = restarts;
  popt.seed = c.seed;
  const auto est = optimal_lp_constant(w, p, popt);
  o.results = {{"p", p},
               {"estimate", est.estimate},
               {"converged", est.converged},
               {"restarts", est.restarts},
               {"best_restart", est.best_restart},
               {"minimizer", est.minimizer}};
  try {
    const auto cw = cheeger_conductance(w, enumeration(c)).value;
    const double cp = cp_formula(to_double(cw), p);
    const bool holds = cp <= est.estimate + c.tolerance;
    o.results["cheeger"] = rational_json(cw);
    o.results["c_p"] = cp;
    o.results["holds"] = holds;
    if (!holds) o.status = kViolation;
  } catch (const CapExceeded&) {
    o.results["cheeger"] = nullptr;
  }
  return o;
}

inline Outcome cmd_verify(const Common& c, const std::string& theorem, double p, const std::string& set_a,
                          const std::string& set_b, const std::string& function, int restarts) {
  const auto g = require_graph(c);
  Outcome o;
  o.inputs = graph_digest(c.input, g);
  TheoremOptions topt;
  topt.enumeration = enumeration(c);
  topt.tolerance = c.tolerance;
  InequalityReport r;
  if (theorem == "cheeger-sandwich") {
    r = verify_cheeger_sandwich(select_walk(g, c.walk), topt);
  } else if (theorem == "measured-sandwich") {
    r = verify_measured_sandwich(g, topt);
  } else if (theorem == "gap-controls") {
    r = verify_gap_controls(g, topt);
  } else if (theorem == "distance-bound") {
    VertexSubset a = set_a.empty() ? VertexSubset::from_vertices(g.size(), {0}) : parse_subset(g, set_a);
    VertexSubset b(g.size());
    if (set_b.empty()) {
      const auto d = distances_from(g, a);
      const auto far = std::max_element(d.begin(), d.end()) - d.begin();
      b.insert(static_cast<Vertex>(far));
    } else {
      b = parse_subset(g, set_b);
    }
    r = distance_gap_bound(select_walk(g, c.walk), a, b, topt);
  } else if (theorem == "poincare-to-cheeger") {
    r = verify_poincare_to_cheeger_measured(g, topt);
  } else if (theorem == "coarea") {
    const auto f = function.empty() ? random_nonnegative_function(g.size(), c.seed) : parse_function(function, g.size());
    r = verify_coarea(select_walk(g, c.walk), f);
  } else if (theorem == "lp-poincare") {
    PoincareOptions popt;
    popt.restarts = restarts;
    popt.seed = c.seed;
    r = verify_lp_poincare_optimised(select_walk(g, c.walk), p, popt, topt);
  } else {
    throw InputError("unknown theorem \"" + theorem + "\"");
  }
  o.results = report_json(r);
  if (!r.holds) o.status = kViolation;
  return o;
}

inline Outcome cmd_coarea(const Common& c, const std::string& function) {
  const auto g = require_graph(c);
  Outcome o;
  o.inputs = graph_digest(c.input, g);
  const auto f = function.empty() ? random_nonnegative_function(g.size(), c.seed) : parse_function(function, g.size());
  const auto res = coarea_check(select_walk(g, c.walk), f);
  json fj = json::array();
  for (const auto& x : f) fj.push_back(rational_json(x));
  o.results = {{"function", fj},
               {"B_f", rational_json(res.direct)},
               {"level_sum", rational_json(res.level_sum)},
               {"equal", res.equal}};
  if (!res.equal) o.status = kViolation;
  return o;
}

inline GraphFamily load_family(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw InputError("not a directory: " + dir);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
    return a.filename().string() < b.filename().string();
  });
  if (files.empty()) throw InputError("no .json graphs in " + dir);
  GraphFamily fam;
  fam.provenance = dir;
  for (const auto& f : files) fam.members.push_back(load_graph_file(f.string()));
  return fam;
}

inline Outcome cmd_family(const Common& c, const std::string& dir, const std::string& threshold, bool exact) {
  const auto fam = load_family(dir);
  Outcome o;
  o.inputs = {{"dir", dir}, {"members", fam.members.size()}, {"threshold", threshold}};
  FamilyOptions fopt;
  fopt.enumeration = enumeration(c);
  fopt.exact_beyond_cap = exact;
  const auto rep = family_report(fam, parse_rational(threshold), fopt);
  json rows = json::array();
  for (const auto& r : rep.rows) {
    rows.push_back({{"index", r.index},
                    {"vertices", r.vertices},
                    {"c", optional_rational(r.cheeger)},
                    {"lambda", optional_double(r.gap)},
                    {"K", r.valency},
                    {"s", optional_rational(r.ratio)},
                    {"gamma", rational_json(r.ghostliness)},
                    {"connected", r.connected},
                    {"full_support", r.full_support},
                    {"note", r.note}});
  }
  o.results = {{"rows", rows},
               {"valency_bound", rep.valency_bound},
               {"ratio_bound", optional_rational(rep.ratio_bound)},
               {"ghostly_trend", trend_name(rep.ghostly)},
               {"min_cheeger", optional_rational(rep.min_cheeger)},
               {"threshold", rational_json(rep.threshold)},
               {"expander", rep.expander ? json(*rep.expander) : json(nullptr)},
               {"partial", rep.partial}};
  return o;
}

inline RhoFunction load_rho(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path + ": parse failure: " + e.what());
  }
  const json& values = doc.is_object() && doc.contains("values") ? doc["values"] : doc;
  if (!values.is_array()) throw InputError(path + ": expected an array of rho values or {\"values\": [...]}");
  std::vector<double> v;
  for (const auto& x : values) {
    if (!x.is_number()) throw InputError(path + ": rho values must be numbers");
    v.push_back(x.get<double>());
  }
  return RhoFunction(std::move(v));
}

inline Outcome cmd_certify(const Common& c, const std::string& dir, double p, const std::string& rho_path) {
  GraphFamily fam;
  if (!dir.empty()) {
    fam = load_family(dir);
  } else {
    fam.members.push_back(require_graph(c));
    fam.provenance = c.input;
  }
  int diam = 1;
  for (const auto& g : fam.members) diam = std::max(diam, diameter(g));
  const RhoFunction rho = rho_path.empty() ? RhoFunction::linear(1.0, diam) : load_rho(rho_path);
  CertificateOptions copt;
  copt.enumeration = enumeration(c);
  copt.seed = c.seed;
  const auto cert = generalised_certificate(fam, p, rho, {}, copt);
  Outcome o;
  o.inputs = {{"source", fam.provenance}, {"members", fam.members.size()}, {"p", p},
              {"rho", rho_path.empty() ? json("linear slope 1") : json(rho_path)}};
  json members = json::array();
  for (const auto& m : cert.members) {
    json pairs = json::array();
    for (const auto& pm : m.pair_measure) pairs.push_back({pm.x, pm.y, rational_json(pm.mass)});
    json rejected = json::array();
    for (const auto& r : m.rejected) {
      rejected.push_back({{"map", r.map_index}, {"x", r.x}, {"y", r.y}, {"distance", r.distance}, {"norm", r.norm},
                          {"bound", r.bound}});
    }
    members.push_back({{"index", m.index},
                       {"vertices", m.vertices},
                       {"gamma", rational_json(m.gamma)},
                       {"r", m.cutoff},
                       {"skipped", m.skipped},
                       {"note", m.note},
                       {"cheeger", rational_json(m.cheeger)},
                       {"cheeger_exact", m.cheeger_exact},
                       {"off_diagonal_mass", rational_json(m.off_diagonal_mass)},
                       {"symmetric", m.symmetric},
                       {"probability", m.probability},
                       {"support_off_diagonal", m.support_off_diagonal},
                       {"mass_at_least_eighth", m.mass_at_least_eighth},
                       {"accepted_maps", m.accepted_maps},
                       {"rejected_maps", rejected},
                       {"max_energy", m.max_energy},
                       {"max_pair_energy", m.max_pair_energy},
                       {"energy_bound", m.energy_bound},
                       {"pair_measure", pairs}});
  }
  o.results = {{"p", cert.p},
               {"K", cert.valency},
               {"s", rational_json(cert.ratio)},
               {"c", rational_json(cert.cheeger)},
               {"poincare_constant", cert.poincare_constant},
               {"kappa", cert.kappa},
               {"energy_limit", 8 * cert.kappa},
               {"holds", cert.holds},
               {"members", members}};
  if (!cert.holds) o.status = kViolation;
  return o;
}

inline MeasureSpec parse_measure(const std::string& text, std::uint64_t seed) {
  MeasureSpec m;
  m.seed = seed;
  if (text == "counting") {
    m.kind = MeasureKind::counting;
  } else if (text == "probability") {
    m.kind = MeasureKind::probability;
  } else if (text == "rationals") {
    m.kind = MeasureKind::rationals;
  } else if (text.rfind("heat:", 0) == 0) {
    m.kind = MeasureKind::heat_kernel;
    const auto rest = text.substr(5);
    const auto colon = rest.find(':');
    if (colon == std::string::npos) throw InputError("heat measure is heat:<start>:<steps>");
    m.start = std::stoi(rest.substr(0, colon));
    m.steps = std::stoi(rest.substr(colon + 1));
  } else {
    m.kind = MeasureKind::explicit_values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) m.values.push_back(parse_rational(item));
    if (m.values.size() < 2 && text.find(',') == std::string::npos) {
      throw InputError("--measure must be counting, probability, rationals, heat:<x0>:<k> or a comma list");
    }
  }
  return m;
}

inline int parse_int(const std::string& s, const char* what) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InputError(std::string(what) + ": expected an integer, got \"" + s + "\"");
  }
}

inline json cmd_generate(const Common& c, const std::string& kind, const std::vector<std::string>& params,
                         const std::string& measure, double density) {
  auto need = [&](std::size_t k) {
    if (params.size() != k) throw InputError(kind + " takes " + std::to_string(k) + " parameter(s)");
  };
  if (kind == "product") {
    need(1);
    return graph_to_json(product_segment(require_graph(c), parse_int(params[0], "levels")));
  }
  GraphSpec spec;
  spec.seed = c.seed;
  spec.density = density;
  if (kind == "cycle") spec.kind = GraphKind::cycle;
  else if (kind == "path") spec.kind = GraphKind::path;
  else if (kind == "complete") spec.kind = GraphKind::complete;
  else if (kind == "hypercube") spec.kind = GraphKind::hypercube;
  else if (kind == "star") spec.kind = GraphKind::star;
  else if (kind == "random_regular") spec.kind = GraphKind::random_regular;
  else if (kind == "random_connected") spec.kind = GraphKind::random_connected;
  else if (kind == "random_graph") spec.kind = GraphKind::random_graph;
  else throw InputError("unknown graph kind \"" + kind + "\"");
  if (spec.kind == GraphKind::random_regular) {
    need(2);
    spec.k = parse_int(params[1], "k");
  } else {
    need(1);
  }
  spec.n = parse_int(params[0], "n");
  return graph_to_json(generate(spec, parse_measure(measure, c.seed)));
}

// ------------------------------------------------------------------ driver

inline void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--input", c.input, "graph file (JSON)");
  sub->add_option("--seed", c.seed, "seed for randomised steps");
  sub->add_option("--cap", c.cap, "enumeration cap on vertex count");
  sub->add_option("--tolerance", c.tolerance, "absolute slack for floating-point comparisons");
  sub->add_option("--walk", c.walk, "auto | graph | auxiliary");
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Expansion invariants of finite measured graphs"};
  app.require_subcommand(1);
  Common common;

  std::string flavor = "vertex", constraint = "mu";
  bool exact = false;
  std::vector<std::string> alphas;
  auto* cheeger = app.add_subcommand("cheeger", "exact Cheeger constant");
  add_common(cheeger, common);
  cheeger->add_option("--flavor", flavor, "vertex | conductance");
  cheeger->add_option("--constraint", constraint, "feasibility measure for the conductance flavour: mu | m");
  cheeger->add_flag("--exact", exact, "branch and bound beyond the enumeration cap");
  cheeger->add_option("--alpha", alphas, "also tabulate the asymptotic profile at these alphas");

  std::string which = "delta";
  auto* spec = app.add_subcommand("spectrum", "eigenvalues of delta or lambda");
  add_common(spec, common);
  spec->add_option("--operator", which, "delta | lambda");

  double p = 2;
  int restarts = 64;
  auto* poincare = app.add_subcommand("poincare", "numerical Lp-Poincaré constant");
  add_common(poincare, common);
  poincare->add_option("--p", p, "exponent p >= 1");
  poincare->add_option("--restarts", restarts, "optimiser restarts");

  std::string theorem, set_a, set_b, function;
  auto* verify = app.add_subcommand("verify", "check one inequality");
  add_common(verify, common);
  verify->add_option("--theorem", theorem,
                     "cheeger-sandwich | measured-sandwich | gap-controls | distance-bound | poincare-to-cheeger | "
                     "coarea | lp-poincare")
      ->required();
  verify->add_option("--p", p, "exponent for lp-poincare");
  verify->add_option("--restarts", restarts, "optimiser restarts for lp-poincare");
  verify->add_option("--set-a", set_a, "comma-separated labels of A (distance-bound)");
  verify->add_option("--set-b", set_b, "comma-separated labels of B (distance-bound)");
  verify->add_option("--function", function, "comma-separated nonnegative rationals (coarea)");

  auto* coarea = app.add_subcommand("coarea", "level-set decomposition of the squared-difference energy");
  add_common(coarea, common);
  coarea->add_option("--function", function, "comma-separated nonnegative rationals (default: seeded random)");

  std::string dir, threshold = "1/100";
  auto* family = app.add_subcommand("family", "per-member invariants and finite-family verdicts");
  add_common(family, common);
  family->add_option("--dir", dir, "directory of graph files")->required();
  family->add_option("--threshold", threshold, "expansion threshold p/q");
  family->add_flag("--exact", exact, "branch and bound beyond the enumeration cap");

  std::string rho;
  auto* certify = app.add_subcommand("certify", "pair-measure certificate for Lp-generalised expansion");
  add_common(certify, common);
  certify->add_option("--dir", dir, "directory of graph files (else --input)");
  certify->add_option("--p", p, "exponent p >= 1");
  certify->add_option("--rho", rho, "rho_+ table: JSON array of values at distances 0, 1, 2, ...");

  std::string kind, measure = "counting";
  std::vector<std::string> params;
  double density = 0.3;
  auto* gen = app.add_subcommand("generate", "write a generated graph as JSON");
  add_common(gen, common);
  gen->add_option("kind", kind,
                  "cycle | path | complete | hypercube | star | random_regular | random_connected | random_graph | "
                  "product")
      ->required();
  gen->add_option("params", params, "size parameters");
  gen->add_option("--measure", measure, "counting | probability | rationals | heat:<x0>:<k> | p/q,p/q,...");
  gen->add_option("--density", density, "extra-edge probability for random_connected / random_graph");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  std::string echo;
  for (int i = 1; i < argc; ++i) echo += (i > 1 ? " " : "") + std::string(argv[i]);
  const auto start = std::chrono::steady_clock::now();
  try {
    if (gen->parsed()) {
      out << cmd_generate(common, kind, params, measure, density).dump(2) << "\n";
      return kOk;
    }
    Outcome o;
    if (cheeger->parsed()) o = cmd_cheeger(common, flavor, constraint, exact, alphas);
    else if (spec->parsed()) o = cmd_spectrum(common, which);
    else if (poincare->parsed()) o = cmd_poincare(common, p, restarts);
    else if (verify->parsed()) o = cmd_verify(common, theorem, p, set_a, set_b, function, restarts);
    else if (coarea->parsed()) o = cmd_coarea(common, function);
    else if (family->parsed()) o = cmd_family(common, dir, threshold, exact);
    else if (certify->parsed()) o = cmd_certify(common, dir, p, rho);
    const auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    const json rep = {{"command", echo},    {"version", kVersion}, {"seed", common.seed},
                      {"inputs", o.inputs}, {"results", o.results}, {"timing_ms", elapsed}};
    out << rep.dump(2) << "\n";
    return o.status;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
  } catch (const PreconditionError& e) {
    err << "precondition failed: " << e.what() << "\n";
  } catch (const CapExceeded& e) {
    err << e.what() << "\n";
  } catch (const NoFeasibleSubset& e) {
    err << "no feasible subset: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return kUsage;
}

}  // namespace mexp::cli
