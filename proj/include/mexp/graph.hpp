#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mexp/rational.hpp"

namespace mexp {

using Vertex = int;

/// Hop distance between vertices in different components.
inline constexpr int kInfiniteDistance = std::numeric_limits<int>::max();

/// Membership bitset over the vertex range 0..n-1.
class VertexSubset {
 public:
  VertexSubset() = default;
  explicit VertexSubset(std::size_t n) : n_(n), words_((n + 63) / 64, 0) {}

  static VertexSubset from_mask(std::size_t n, std::uint64_t mask) {
    if (n > 64) throw PreconditionError("from_mask requires n <= 64");
    VertexSubset s(n);
    if (n > 0) s.words_[0] = (n == 64) ? mask : (mask & ((std::uint64_t{1} << n) - 1));
    return s;
  }

  static VertexSubset from_vertices(std::size_t n, std::span<const Vertex> vs) {
    VertexSubset s(n);
    for (Vertex v : vs) s.insert(v);
    return s;
  }

  static VertexSubset from_vertices(std::size_t n, std::initializer_list<Vertex> vs) {
    return from_vertices(n, std::span<const Vertex>(vs.begin(), vs.size()));
  }

  static VertexSubset full(std::size_t n) {
    VertexSubset s(n);
    for (std::size_t v = 0; v < n; ++v) s.insert(static_cast<Vertex>(v));
    return s;
  }

  std::size_t universe() const { return n_; }

  bool contains(Vertex v) const {
    check(v);
    return (words_[v / 64] >> (v % 64)) & 1U;
  }
  void insert(Vertex v) {
    check(v);
    words_[v / 64] |= std::uint64_t{1} << (v % 64);
  }
  void erase(Vertex v) {
    check(v);
    words_[v / 64] &= ~(std::uint64_t{1} << (v % 64));
  }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  bool empty() const { return count() == 0; }

  VertexSubset complement() const {
    VertexSubset s(n_);
    for (std::size_t v = 0; v < n_; ++v) {
      if (!contains(static_cast<Vertex>(v))) s.insert(static_cast<Vertex>(v));
    }
    return s;
  }

  bool intersects(const VertexSubset& other) const {
    for (std::size_t i = 0; i < words_.size() && i < other.words_.size(); ++i) {
      if (words_[i] & other.words_[i]) return true;
    }
    return false;
  }

  bool is_subset_of(const VertexSubset& other) const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
      const auto o = i < other.words_.size() ? other.words_[i] : 0;
      if (words_[i] & ~o) return false;
    }
    return true;
  }

  std::vector<Vertex> members() const {
    std::vector<Vertex> out;
    for (std::size_t v = 0; v < n_; ++v) {
      if (contains(static_cast<Vertex>(v))) out.push_back(static_cast<Vertex>(v));
    }
    return out;
  }

  std::uint64_t to_mask() const {
    if (n_ > 64) throw PreconditionError("to_mask requires n <= 64");
    return words_.empty() ? 0 : words_[0];
  }

  /// Orders subsets as binary numbers with vertex n-1 most significant.
  friend bool operator<(const VertexSubset& a, const VertexSubset& b) {
    for (std::size_t i = a.words_.size(); i-- > 0;) {
      if (a.words_[i] != b.words_[i]) return a.words_[i] < b.words_[i];
    }
    return false;
  }
  friend bool operator==(const VertexSubset&, const VertexSubset&) = default;

 private:
  void check(Vertex v) const {
    if (v < 0 || static_cast<std::size_t>(v) >= n_) {
      throw PreconditionError("vertex " + std::to_string(v) + " outside 0.." + std::to_string(n_));
    }
  }

  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Undirected edge with u < v.
struct Edge {
  Vertex u;
  Vertex v;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Finite simple undirected graph carrying a nonnegative rational measure on
/// its vertices and, optionally, a positive conductance per edge.
class MeasuredGraph {
 public:
  MeasuredGraph() = default;

  /// Validates and builds. Edges may be given in either orientation; loops,
  /// repeated pairs and out-of-range endpoints are rejected.
  static MeasuredGraph build(std::size_t n, std::vector<Edge> edges, std::vector<Rational> measure,
                             std::vector<std::string> labels = {}) {
    if (measure.size() != n) throw InputError("measure has " + std::to_string(measure.size()) + " entries for " + std::to_string(n) + " vertices");
    if (labels.empty()) {
      for (std::size_t v = 0; v < n; ++v) labels.push_back(std::to_string(v));
    }
    if (labels.size() != n) throw InputError("label count does not match vertex count");
    MeasuredGraph g;
    g.n_ = n;
    for (auto& e : edges) {
      if (e.u < 0 || e.v < 0 || static_cast<std::size_t>(e.u) >= n || static_cast<std::size_t>(e.v) >= n) {
        throw InputError("edge references unknown vertex");
      }
      if (e.u == e.v) throw InputError("self-loop at vertex " + labels[e.u]);
      if (e.u > e.v) std::swap(e.u, e.v);
    }
    std::sort(edges.begin(), edges.end());
    for (std::size_t i = 1; i < edges.size(); ++i) {
      if (edges[i] == edges[i - 1]) {
        throw InputError("duplicate edge {" + labels[edges[i].u] + "," + labels[edges[i].v] + "}");
      }
    }
    Rational total = 0;
    for (std::size_t v = 0; v < n; ++v) {
      if (measure[v] < 0) throw InputError("negative measure at vertex " + labels[v]);
      total += measure[v];
    }
    if (total <= 0) throw InputError("total measure must be positive");

    g.edges_ = std::move(edges);
    g.measure_ = std::move(measure);
    g.labels_ = std::move(labels);
    g.total_ = total;
    g.adj_.assign(n, {});
    g.incident_.assign(n, {});
    for (std::size_t i = 0; i < g.edges_.size(); ++i) {
      g.adj_[g.edges_[i].u].push_back(g.edges_[i].v);
      g.adj_[g.edges_[i].v].push_back(g.edges_[i].u);
    }
    for (std::size_t v = 0; v < n; ++v) {
      std::sort(g.adj_[v].begin(), g.adj_[v].end());
      for (Vertex w : g.adj_[v]) g.incident_[v].push_back(static_cast<int>(*g.edge_index(static_cast<Vertex>(v), w)));
    }
    g.component_.assign(n, -1);
    int comp = 0;
    for (std::size_t s = 0; s < n; ++s) {
      if (g.component_[s] >= 0) continue;
      std::deque<Vertex> queue{static_cast<Vertex>(s)};
      g.component_[s] = comp;
      while (!queue.empty()) {
        const Vertex x = queue.front();
        queue.pop_front();
        for (Vertex y : g.adj_[x]) {
          if (g.component_[y] < 0) {
            g.component_[y] = comp;
            queue.push_back(y);
          }
        }
      }
      ++comp;
    }
    g.components_ = comp;
    return g;
  }

  std::size_t size() const { return n_; }
  std::span<const Edge> edges() const { return edges_; }
  std::span<const Vertex> neighbors(Vertex v) const { return adj_.at(v); }
  /// Edge indices incident to v, parallel to neighbors(v).
  std::span<const int> incident_edges(Vertex v) const { return incident_.at(v); }
  std::size_t degree(Vertex v) const { return adj_.at(v).size(); }

  std::optional<std::size_t> edge_index(Vertex u, Vertex v) const {
    if (u > v) std::swap(u, v);
    const Edge key{u, v};
    auto it = std::lower_bound(edges_.begin(), edges_.end(), key);
    if (it == edges_.end() || !(*it == key)) return std::nullopt;
    return static_cast<std::size_t>(it - edges_.begin());
  }
  bool adjacent(Vertex u, Vertex v) const { return u != v && edge_index(u, v).has_value(); }

  std::span<const Rational> measure() const { return measure_; }
  const Rational& measure(Vertex v) const { return measure_.at(v); }
  const Rational& total_measure() const { return total_; }

  std::span<const std::string> labels() const { return labels_; }
  const std::string& label(Vertex v) const { return labels_.at(v); }

  bool connected() const { return components_ <= 1; }
  int component_count() const { return components_; }
  int component_of(Vertex v) const { return component_.at(v); }

  bool full_support() const {
    return std::all_of(measure_.begin(), measure_.end(), [](const Rational& r) { return r > 0; });
  }

  /// Per-edge conductance (aligned with edges()) when the source document carried one.
  const std::optional<std::vector<Rational>>& conductance() const { return conductance_; }

  MeasuredGraph with_measure(std::vector<Rational> measure) const {
    return build(n_, edges_, std::move(measure), labels_).with_conductance_unchecked(conductance_);
  }

  MeasuredGraph with_conductance(std::vector<Rational> a) const {
    if (a.size() != edges_.size()) throw InputError("conductance must be given for every edge");
    for (const auto& x : a) {
      if (x <= 0) throw InputError("conductance must be positive on every edge");
    }
    MeasuredGraph g = *this;
    g.conductance_ = std::move(a);
    return g;
  }

  /// Full subgraph on the vertices of S, with the restricted measure. Vertex
  /// ids are renumbered in increasing order; labels carry over.
  MeasuredGraph induced_subgraph(const VertexSubset& s) const {
    std::vector<int> index(n_, -1);
    std::vector<Rational> m;
    std::vector<std::string> labels;
    for (Vertex v : s.members()) {
      index[v] = static_cast<int>(m.size());
      m.push_back(measure_[v]);
      labels.push_back(labels_[v]);
    }
    std::vector<Edge> es;
    for (const auto& e : edges_) {
      if (index[e.u] >= 0 && index[e.v] >= 0) es.push_back({index[e.u], index[e.v]});
    }
    const std::size_t k = m.size();
    return build(k, std::move(es), std::move(m), std::move(labels));
  }

 private:
  MeasuredGraph with_conductance_unchecked(std::optional<std::vector<Rational>> a) && {
    conductance_ = std::move(a);
    return std::move(*this);
  }

  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<Vertex>> adj_;
  std::vector<std::vector<int>> incident_;
  std::vector<Rational> measure_;
  std::vector<std::string> labels_;
  std::optional<std::vector<Rational>> conductance_;
  Rational total_;
  std::vector<int> component_;
  int components_ = 0;
};

inline Rational measure_of(const MeasuredGraph& g, const VertexSubset& a) {
  Rational s = 0;
  for (Vertex v : a.members()) s += g.measure(v);
  return s;
}

/// BFS distances from every vertex of `sources` (multi-source).
inline std::vector<int> distances_from(const MeasuredGraph& g, const VertexSubset& sources) {
  std::vector<int> dist(g.size(), kInfiniteDistance);
  std::deque<Vertex> queue;
  for (Vertex s : sources.members()) {
    dist[s] = 0;
    queue.push_back(s);
  }
  while (!queue.empty()) {
    const Vertex x = queue.front();
    queue.pop_front();
    for (Vertex y : g.neighbors(x)) {
      if (dist[y] == kInfiniteDistance) {
        dist[y] = dist[x] + 1;
        queue.push_back(y);
      }
    }
  }
  return dist;
}

inline std::vector<int> distances_from(const MeasuredGraph& g, Vertex source) {
  return distances_from(g, VertexSubset::from_vertices(g.size(), {source}));
}

/// Edge-path metric; kInfiniteDistance across components.
inline int hop_distance(const MeasuredGraph& g, Vertex u, Vertex v) {
  if (v < 0 || static_cast<std::size_t>(v) >= g.size()) throw PreconditionError("vertex out of range");
  return distances_from(g, u)[v];
}

inline std::vector<std::vector<int>> all_pairs_distances(const MeasuredGraph& g) {
  std::vector<std::vector<int>> d;
  d.reserve(g.size());
  for (std::size_t v = 0; v < g.size(); ++v) d.push_back(distances_from(g, static_cast<Vertex>(v)));
  return d;
}

/// Largest finite hop distance (0 for a single vertex).
inline int diameter(const MeasuredGraph& g) {
  int best = 0;
  for (const auto& row : all_pairs_distances(g)) {
    for (int x : row) {
      if (x != kInfiniteDistance) best = std::max(best, x);
    }
  }
  return best;
}

/// d(A,B) = min hop distance between the sets.
inline int set_distance(const MeasuredGraph& g, const VertexSubset& a, const VertexSubset& b) {
  const auto dist = distances_from(g, a);
  int best = kInfiniteDistance;
  for (Vertex v : b.members()) best = std::min(best, dist[v]);
  return best;
}

/// Vertices at hop distance exactly 1 from A.
inline VertexSubset vertex_boundary(const MeasuredGraph& g, const VertexSubset& a) {
  VertexSubset out(g.size());
  for (Vertex x : a.members()) {
    for (Vertex y : g.neighbors(x)) {
      if (!a.contains(y)) out.insert(y);
    }
  }
  return out;
}

/// Edges with exactly one endpoint in A, each as (min, max).
inline std::vector<Edge> edge_boundary(const MeasuredGraph& g, const VertexSubset& a) {
  std::vector<Edge> out;
  for (const auto& e : g.edges()) {
    if (a.contains(e.u) != a.contains(e.v)) out.push_back(e);
  }
  return out;
}

/// The R-annulus {x : 0 < d(x,A) <= R}.
inline VertexSubset r_boundary(const MeasuredGraph& g, const VertexSubset& a, int radius) {
  if (radius < 1) throw PreconditionError("r_boundary requires R >= 1");
  const auto dist = distances_from(g, a);
  VertexSubset out(g.size());
  for (std::size_t v = 0; v < g.size(); ++v) {
    if (dist[v] > 0 && dist[v] <= radius) out.insert(static_cast<Vertex>(v));
  }
  return out;
}

struct GraphStats {
  int max_valency = 0;
  /// Largest s with s·m(v) <= m(u) <= m(v)/s on every edge; absent when an
  /// edge has a zero-measure endpoint.
  std::optional<Rational> measure_ratio;
  /// max_v m(v) / m(V).
  Rational ghostliness;
  bool connected = false;
  bool full_support = false;
};

inline GraphStats stats(const MeasuredGraph& g) {
  GraphStats st;
  for (std::size_t v = 0; v < g.size(); ++v) {
    st.max_valency = std::max(st.max_valency, static_cast<int>(g.degree(static_cast<Vertex>(v))));
  }
  Rational s = 1;
  bool defined = true;
  for (const auto& e : g.edges()) {
    const auto& mu = g.measure(e.u);
    const auto& mv = g.measure(e.v);
    if (mu == 0 || mv == 0) {
      defined = false;
      break;
    }
    s = std::min(s, mu < mv ? Rational(mu / mv) : Rational(mv / mu));
  }
  if (defined) st.measure_ratio = s;
  Rational mx = 0;
  for (const auto& m : g.measure()) mx = std::max(mx, m);
  st.ghostliness = mx / g.total_measure();
  st.connected = g.connected();
  st.full_support = g.full_support();
  return st;
}

}  // namespace mexp
