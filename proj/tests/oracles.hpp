#pragma once

// Independent reference computations used by the tests. They share only the
// data model with the library and are deliberately naive.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

#include "mexp/graph.hpp"
#include "mexp/random_walk.hpp"

namespace oracle {

using mexp::Rational;

inline std::vector<std::vector<bool>> adjacency(const mexp::MeasuredGraph& g) {
  std::vector<std::vector<bool>> a(g.size(), std::vector<bool>(g.size(), false));
  for (const auto& e : g.edges()) a[e.u][e.v] = a[e.v][e.u] = true;
  return a;
}

struct Minimum {
  Rational value;
  std::uint64_t mask = 0;
};

/// Scans every mask in increasing order; keeps the first strict minimum, so
/// ties resolve to the smallest mask.
template <class Ratio>
std::optional<Minimum> scan(std::size_t n, const std::vector<Rational>& constraint, Ratio ratio) {
  Rational total = 0;
  for (const auto& x : constraint) total += x;
  std::optional<Minimum> best;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    Rational m = 0;
    for (std::size_t v = 0; v < n; ++v) {
      if (mask >> v & 1) m += constraint[v];
    }
    if (m <= 0 || 2 * m > total) continue;
    const Rational r = ratio(mask);
    if (!best || r < best->value) best = Minimum{r, mask};
  }
  return best;
}

/// min m(∂A)/m(A) over 0 < m(A) <= m(V)/2.
inline std::optional<Minimum> vertex_cheeger(const mexp::MeasuredGraph& g) {
  const auto adj = adjacency(g);
  const std::size_t n = g.size();
  std::vector<Rational> m(g.measure().begin(), g.measure().end());
  return scan(n, m, [&](std::uint64_t mask) {
    Rational in = 0, boundary = 0;
    for (std::size_t v = 0; v < n; ++v) {
      if (mask >> v & 1) {
        in += m[v];
        continue;
      }
      for (std::size_t u = 0; u < n; ++u) {
        if ((mask >> u & 1) && adj[u][v]) {
          boundary += m[v];
          break;
        }
      }
    }
    return boundary / in;
  });
}

/// min a(∂^E A)/mu(A) over A feasible for the constraint measure.
inline std::optional<Minimum> conductance_cheeger(const mexp::ReversibleWalk& w, const std::vector<Rational>& constraint) {
  const auto& g = w.graph();
  const std::size_t n = g.size();
  return scan(n, constraint, [&](std::uint64_t mask) {
    Rational cut = 0, mu = 0;
    for (std::size_t i = 0; i < g.edges().size(); ++i) {
      const auto e = g.edges()[i];
      if ((mask >> e.u & 1) != (mask >> e.v & 1)) cut += w.conductance()[i];
    }
    for (std::size_t v = 0; v < n; ++v) {
      if (mask >> v & 1) mu += w.stationary()[v];
    }
    return cut / mu;
  });
}

inline std::vector<std::vector<int>> floyd_warshall(const mexp::MeasuredGraph& g) {
  const int inf = 1 << 28;
  const std::size_t n = g.size();
  std::vector<std::vector<int>> d(n, std::vector<int>(n, inf));
  for (std::size_t v = 0; v < n; ++v) d[v][v] = 0;
  for (const auto& e : g.edges()) d[e.u][e.v] = d[e.v][e.u] = 1;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
      }
    }
  }
  return d;
}

inline std::size_t component_count(const mexp::MeasuredGraph& g) {
  std::vector<std::size_t> parent(g.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t count = g.size();
  for (const auto& e : g.edges()) {
    const auto a = find(static_cast<std::size_t>(e.u)), b = find(static_cast<std::size_t>(e.v));
    if (a != b) {
      parent[a] = b;
      --count;
    }
  }
  return count;
}

/// Distribution after k steps of the simple walk: point mass times P^k with P
/// the dense rational transition matrix.
inline std::vector<Rational> heat_kernel(const mexp::MeasuredGraph& g, int x0, int k) {
  const std::size_t n = g.size();
  const auto adj = adjacency(g);
  std::vector<std::vector<Rational>> p(n, std::vector<Rational>(n, Rational(0)));
  for (std::size_t u = 0; u < n; ++u) {
    long deg = 0;
    for (std::size_t v = 0; v < n; ++v) deg += adj[u][v] ? 1 : 0;
    for (std::size_t v = 0; v < n; ++v) {
      if (adj[u][v]) p[u][v] = Rational(1, deg);
    }
  }
  std::vector<std::vector<Rational>> power(n, std::vector<Rational>(n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) power[i][i] = 1;
  for (int step = 0; step < k; ++step) {
    std::vector<std::vector<Rational>> next(n, std::vector<Rational>(n, Rational(0)));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t l = 0; l < n; ++l) {
        if (power[i][l] == 0) continue;
        for (std::size_t j = 0; j < n; ++j) next[i][j] += power[i][l] * p[l][j];
      }
    }
    power = std::move(next);
  }
  return power[static_cast<std::size_t>(x0)];
}

/// Spectral gap of the simple walk on the n-cycle.
inline double cycle_walk_gap(int n) { return 1 - std::cos(2 * std::numbers::pi / n); }

}  // namespace oracle
