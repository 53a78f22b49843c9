#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <json.hpp>

#include "mexp/graph.hpp"

namespace mexp {

namespace detail {

inline std::string label_text(const nlohmann::json& id, const std::string& where) {
  if (id.is_string()) return id.get<std::string>();
  if (id.is_number_integer()) return std::to_string(id.get<long long>());
  throw InputError(where + ": vertex id must be a string or an integer");
}

inline Rational rational_field(const nlohmann::json& x, const std::string& where) {
  try {
    if (x.is_string()) return parse_rational(x.get<std::string>());
    if (x.is_number_integer()) return Rational(x.get<long long>());
  } catch (const InputError& e) {
    throw InputError(where + ": " + e.what());
  }
  throw InputError(where + ": expected a rational string \"p/q\" or an integer");
}

}  // namespace detail

/// Parses a graph document:
///   {"vertices":[{"id":<label>,"m":"p/q"}...],
///    "edges":[[<label>,<label>],...],
///    "conductance":[[<label>,<label>,"p/q"],...]}   (optional)
inline MeasuredGraph load_graph(const std::string& document) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(document);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("parse failure: ") + e.what());
  }
  if (!doc.is_object()) throw InputError("document root must be an object");
  if (!doc.contains("vertices") || !doc["vertices"].is_array()) throw InputError("missing \"vertices\" array");
  if (!doc.contains("edges") || !doc["edges"].is_array()) throw InputError("missing \"edges\" array");

  std::map<std::string, Vertex> index;
  std::vector<std::string> labels;
  std::vector<Rational> measure;
  const auto& vs = doc["vertices"];
  for (std::size_t i = 0; i < vs.size(); ++i) {
    const std::string where = "vertices[" + std::to_string(i) + "]";
    if (!vs[i].is_object() || !vs[i].contains("id") || !vs[i].contains("m")) {
      throw InputError(where + ": expected {\"id\":..., \"m\":...}");
    }
    const auto label = detail::label_text(vs[i]["id"], where + ".id");
    if (index.count(label)) throw InputError(where + ": duplicate vertex id \"" + label + "\"");
    const auto m = detail::rational_field(vs[i]["m"], where + ".m");
    if (m < 0) throw InputError(where + ".m: negative measure");
    index[label] = static_cast<Vertex>(labels.size());
    labels.push_back(label);
    measure.push_back(m);
  }

  auto lookup = [&](const nlohmann::json& id, const std::string& where) {
    const auto label = detail::label_text(id, where);
    auto it = index.find(label);
    if (it == index.end()) throw InputError(where + ": unknown vertex \"" + label + "\"");
    return it->second;
  };

  std::vector<Edge> edges;
  const auto& es = doc["edges"];
  for (std::size_t i = 0; i < es.size(); ++i) {
    const std::string where = "edges[" + std::to_string(i) + "]";
    if (!es[i].is_array() || es[i].size() != 2) throw InputError(where + ": expected [u, v]");
    const Vertex u = lookup(es[i][0], where + "[0]");
    const Vertex v = lookup(es[i][1], where + "[1]");
    if (u == v) throw InputError(where + ": self-loop");
    edges.push_back({std::min(u, v), std::max(u, v)});
  }

  MeasuredGraph g;
  try {
    g = MeasuredGraph::build(labels.size(), edges, measure, labels);
  } catch (const InputError& e) {
    throw InputError(std::string("graph: ") + e.what());
  }

  if (doc.contains("conductance")) {
    const auto& cs = doc["conductance"];
    if (!cs.is_array()) throw InputError("\"conductance\" must be an array");
    std::vector<std::optional<Rational>> a(g.edges().size());
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const std::string where = "conductance[" + std::to_string(i) + "]";
      if (!cs[i].is_array() || cs[i].size() != 3) throw InputError(where + ": expected [u, v, \"p/q\"]");
      const Vertex u = lookup(cs[i][0], where + "[0]");
      const Vertex v = lookup(cs[i][1], where + "[1]");
      const auto idx = g.edge_index(u, v);
      if (!idx) throw InputError(where + ": conductance on a non-edge");
      const auto value = detail::rational_field(cs[i][2], where + "[2]");
      if (value <= 0) throw InputError(where + ": conductance must be positive");
      if (a[*idx] && *a[*idx] != value) throw InputError(where + ": asymmetric conductance");
      if (a[*idx]) throw InputError(where + ": duplicate conductance entry");
      a[*idx] = value;
    }
    std::vector<Rational> values;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!a[i]) {
        const auto e = g.edges()[i];
        throw InputError("conductance missing for edge {" + g.label(e.u) + "," + g.label(e.v) + "}");
      }
      values.push_back(*a[i]);
    }
    g = g.with_conductance(std::move(values));
  }
  return g;
}

inline MeasuredGraph load_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return load_graph(buf.str());
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

/// Labels that look like integers are written back as integers.
inline nlohmann::json label_json(const std::string& label) {
  if (!label.empty() && label.size() < 18 &&
      std::all_of(label.begin(), label.end(), [](char c) { return c >= '0' && c <= '9'; }) &&
      (label == "0" || label[0] != '0')) {
    return std::stoll(label);
  }
  return label;
}

inline nlohmann::json graph_to_json(const MeasuredGraph& g) {
  nlohmann::json doc;
  doc["vertices"] = nlohmann::json::array();
  for (std::size_t v = 0; v < g.size(); ++v) {
    doc["vertices"].push_back({{"id", label_json(g.label(static_cast<Vertex>(v)))},
                               {"m", to_string(g.measure(static_cast<Vertex>(v)))}});
  }
  doc["edges"] = nlohmann::json::array();
  for (const auto& e : g.edges()) doc["edges"].push_back({label_json(g.label(e.u)), label_json(g.label(e.v))});
  if (g.conductance()) {
    doc["conductance"] = nlohmann::json::array();
    for (std::size_t i = 0; i < g.edges().size(); ++i) {
      const auto e = g.edges()[i];
      doc["conductance"].push_back(
          {label_json(g.label(e.u)), label_json(g.label(e.v)), to_string((*g.conductance())[i])});
    }
  }
  return doc;
}

inline nlohmann::json subset_labels(const MeasuredGraph& g, const VertexSubset& s) {
  auto out = nlohmann::json::array();
  for (Vertex v : s.members()) out.push_back(label_json(g.label(v)));
  return out;
}

}  // namespace mexp
