#pragma once

#include <span>
#include <vector>

#include "mexp/graph.hpp"

namespace mexp {

/// Reversible random walk given by a symmetric positive conductance a on the
/// edges of a graph. The stationary measure is mu(u) = sum_v a(u,v) and the
/// kernel is r(u,v) = a(u,v)/mu(u). The graph's own vertex measure is kept as
/// the auxiliary measure m; it plays no role in the walk itself.
class ReversibleWalk {
 public:
  static ReversibleWalk from_conductance(MeasuredGraph g, std::vector<Rational> a) {
    if (a.size() != g.edges().size()) throw PreconditionError("conductance must be defined on every edge");
    for (const auto& x : a) {
      if (x <= 0) throw PreconditionError("conductance must be positive on every edge");
    }
    ReversibleWalk w;
    w.mu_.assign(g.size(), Rational(0));
    for (std::size_t i = 0; i < a.size(); ++i) {
      const auto e = g.edges()[i];
      w.mu_[e.u] += a[i];
      w.mu_[e.v] += a[i];
    }
    for (std::size_t v = 0; v < g.size(); ++v) {
      if (w.mu_[v] == 0) throw PreconditionError("isolated vertex " + g.label(static_cast<Vertex>(v)) + " has no stationary mass");
    }
    w.a_ = std::move(a);
    w.graph_ = std::move(g);
    return w;
  }

  const MeasuredGraph& graph() const { return graph_; }
  std::size_t size() const { return graph_.size(); }

  /// Conductance per edge, aligned with graph().edges().
  std::span<const Rational> conductance() const { return a_; }
  Rational conductance(Vertex u, Vertex v) const {
    const auto idx = graph_.edge_index(u, v);
    return idx ? a_[*idx] : Rational(0);
  }

  std::span<const Rational> stationary() const { return mu_; }
  const Rational& stationary(Vertex v) const { return mu_.at(v); }
  Rational stationary_total() const { return sum(mu_); }

  Rational kernel(Vertex u, Vertex v) const { return conductance(u, v) / mu_.at(u); }

  /// a(D) for an edge set D.
  Rational area(std::span<const Edge> edges) const {
    Rational s = 0;
    for (const auto& e : edges) s += conductance(e.u, e.v);
    return s;
  }
  Rational total_area() const { return sum(a_); }

  Rational stationary_of(const VertexSubset& s) const {
    Rational out = 0;
    for (Vertex v : s.members()) out += mu_[v];
    return out;
  }

 private:
  MeasuredGraph graph_;
  std::vector<Rational> a_;
  std::vector<Rational> mu_;
};

inline ReversibleWalk from_conductance(const MeasuredGraph& g, std::vector<Rational> a) {
  return ReversibleWalk::from_conductance(g, std::move(a));
}

/// Walk with a(u,v) = m(u) + m(v) on every edge.
inline ReversibleWalk auxiliary_walk(const MeasuredGraph& g) {
  if (!g.full_support()) throw PreconditionError("auxiliary walk requires a measure with full support");
  if (!g.connected()) throw PreconditionError("auxiliary walk requires a connected graph");
  std::vector<Rational> a;
  a.reserve(g.edges().size());
  for (const auto& e : g.edges()) a.push_back(g.measure(e.u) + g.measure(e.v));
  if (g.size() == 1) throw PreconditionError("auxiliary walk requires at least one edge");
  return ReversibleWalk::from_conductance(g, std::move(a));
}

/// The walk described by the graph's own conductance field.
inline ReversibleWalk walk_from_graph(const MeasuredGraph& g) {
  if (!g.conductance()) throw PreconditionError("graph carries no conductance; supply one or use the auxiliary walk");
  return ReversibleWalk::from_conductance(g, *g.conductance());
}

/// mu(u) r(u,v) == mu(v) r(v,u) for all pairs, exactly.
inline bool detailed_balance_holds(const ReversibleWalk& w) {
  for (const auto& e : w.graph().edges()) {
    if (w.stationary(e.u) * w.kernel(e.u, e.v) != w.stationary(e.v) * w.kernel(e.v, e.u)) return false;
  }
  return true;
}

/// Every row of r sums to 1 and r(u,v) > 0 exactly on edges.
inline bool kernel_is_stochastic(const ReversibleWalk& w) {
  const auto& g = w.graph();
  for (std::size_t u = 0; u < g.size(); ++u) {
    Rational row = 0;
    for (std::size_t v = 0; v < g.size(); ++v) {
      const auto r = w.kernel(static_cast<Vertex>(u), static_cast<Vertex>(v));
      if ((r > 0) != g.adjacent(static_cast<Vertex>(u), static_cast<Vertex>(v))) return false;
      row += r;
    }
    if (row != 1) return false;
  }
  return true;
}

/// Distribution of the simple random walk (uniform over neighbours) after k
/// steps from x0.
inline std::vector<Rational> heat_kernel_measure(const MeasuredGraph& g, Vertex x0, int steps) {
  if (steps < 0) throw PreconditionError("heat kernel needs k >= 0");
  if (!g.connected()) throw PreconditionError("heat kernel requires a connected graph");
  if (x0 < 0 || static_cast<std::size_t>(x0) >= g.size()) throw PreconditionError("start vertex out of range");
  std::vector<Rational> dist(g.size(), Rational(0));
  dist[x0] = 1;
  if (g.size() == 1) return dist;
  for (int k = 0; k < steps; ++k) {
    std::vector<Rational> next(g.size(), Rational(0));
    for (std::size_t u = 0; u < g.size(); ++u) {
      if (dist[u] == 0) continue;
      const Rational share = dist[u] / static_cast<long>(g.degree(static_cast<Vertex>(u)));
      for (Vertex v : g.neighbors(static_cast<Vertex>(u))) next[v] += share;
    }
    dist = std::move(next);
  }
  return dist;
}

}  // namespace mexp
