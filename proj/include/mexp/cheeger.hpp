#pragma once

#include <cstdint>
#include <cstdlib>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "mexp/graph.hpp"
#include "mexp/random_walk.hpp"

namespace mexp {

/// Exhaustive enumeration was requested on a graph larger than the cap.
class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The constraint 0 < m(A) <= m(V)/2 admits no subset.
class NoFeasibleSubset : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class CheegerFlavor { vertex_measured, conductance };

inline const char* flavor_name(CheegerFlavor f) {
  return f == CheegerFlavor::vertex_measured ? "vertex-measured" : "conductance";
}

struct CheegerCertificate {
  Rational value;
  VertexSubset witness;
  CheegerFlavor flavor = CheegerFlavor::vertex_measured;
};

struct EnumerationOptions {
  /// Largest vertex count for exhaustive enumeration.
  std::size_t cap = 22;
  /// 0 = MEXP_THREADS if set, else hardware concurrency.
  unsigned workers = 0;
};

inline unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("MEXP_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

namespace detail {

inline constexpr std::size_t kMaxEnumerable = 40;

inline void check_cap(std::size_t n, const EnumerationOptions& opt) {
  if (n > opt.cap || n > kMaxEnumerable) {
    throw CapExceeded("exact mode infeasible: " + std::to_string(n) + " vertices exceeds enumeration cap " +
                      std::to_string(std::min(opt.cap, kMaxEnumerable)));
  }
}

inline std::vector<std::uint64_t> adjacency_masks(const MeasuredGraph& g) {
  std::vector<std::uint64_t> adj(g.size(), 0);
  for (const auto& e : g.edges()) {
    adj[e.u] |= std::uint64_t{1} << e.v;
    adj[e.v] |= std::uint64_t{1} << e.u;
  }
  return adj;
}

template <class Int>
struct Wide {
  using type = BigInt;
};
template <>
struct Wide<std::int64_t> {
  using type = __int128;
};

/// Best ratio num/den seen so far; ties go to the smaller mask.
template <class Int>
struct RatioBest {
  Int num{};
  Int den{};
  std::uint64_t mask = 0;
  bool found = false;

  void offer(const Int& n, const Int& d, std::uint64_t m) {
    using W = typename Wide<Int>::type;
    if (!found) {
      num = n, den = d, mask = m, found = true;
      return;
    }
    const W lhs = W(n) * W(den);
    const W rhs = W(num) * W(d);
    if (lhs < rhs || (lhs == rhs && m < mask)) num = n, den = d, mask = m;
  }
  void merge(const RatioBest& o) {
    if (o.found) offer(o.num, o.den, o.mask);
  }
};

/// Ratio objective over subsets: vertex boundary weight over subset weight.
template <class Int>
struct VertexBoundaryObjective {
  std::span<const std::uint64_t> adj;
  std::span<const Int> w;
  std::uint64_t full;

  std::pair<Int, Int> operator()(std::uint64_t a) const {
    std::uint64_t nb = 0;
    Int den{};
    for (std::uint64_t x = a; x; x &= x - 1) {
      const int v = std::countr_zero(x);
      nb |= adj[v];
      den += w[v];
    }
    Int num{};
    for (std::uint64_t x = nb & ~a & full; x; x &= x - 1) num += w[std::countr_zero(x)];
    return {num, den};
  }
};

/// Edge boundary conductance over subset stationary mass.
template <class Int>
struct EdgeBoundaryObjective {
  std::span<const Edge> edges;
  std::span<const Int> a;
  std::span<const Int> mu;

  std::pair<Int, Int> operator()(std::uint64_t s) const {
    Int num{};
    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (((s >> edges[i].u) ^ (s >> edges[i].v)) & 1U) num += a[i];
    }
    Int den{};
    for (std::uint64_t x = s; x; x &= x - 1) den += mu[std::countr_zero(x)];
    return {num, den};
  }
};

/// Minimises objective(A) over 0 < c(A), 2 c(A) <= C, where c are the
/// constraint weights. Enumerates subsets containing the last vertex and their
/// complements, split across workers by prefix; the result does not depend on
/// the split.
template <class Int, class Objective>
RatioBest<Int> enumerate_min_ratio(std::size_t n, std::span<const Int> constraint, const Int& total,
                                   const Objective& objective, unsigned workers) {
  const std::uint64_t full = (n == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
  const std::uint64_t pivot = std::uint64_t{1} << (n - 1);
  const std::uint64_t half_range = pivot;  // number of subsets containing the pivot
  auto feasible = [&](const Int& c) { return c > Int{0} && Int(c + c) <= total; };
  auto weight = [&](std::uint64_t a) {
    Int c{};
    for (std::uint64_t x = a; x; x &= x - 1) c += constraint[std::countr_zero(x)];
    return c;
  };
  auto run = [&](std::uint64_t lo, std::uint64_t hi, RatioBest<Int>& best) {
    for (std::uint64_t low = lo; low < hi; ++low) {
      const std::uint64_t a = low | pivot;
      const Int ca = weight(a);
      if (feasible(ca)) {
        auto [num, den] = objective(a);
        best.offer(num, den, a);
      }
      const std::uint64_t b = full & ~a;
      if (b != 0) {
        const Int cb = total - ca;
        if (feasible(cb)) {
          auto [num, den] = objective(b);
          best.offer(num, den, b);
        }
      }
    }
  };

  const unsigned k = static_cast<unsigned>(std::min<std::uint64_t>(workers, std::max<std::uint64_t>(1, half_range >> 10)));
  std::vector<RatioBest<Int>> partial(std::max(1U, k));
  if (k <= 1) {
    run(0, half_range, partial[0]);
  } else {
    std::vector<std::thread> threads;
    const std::uint64_t chunk = (half_range + k - 1) / k;
    for (unsigned t = 0; t < k; ++t) {
      const std::uint64_t lo = std::min<std::uint64_t>(half_range, t * chunk);
      const std::uint64_t hi = std::min<std::uint64_t>(half_range, lo + chunk);
      threads.emplace_back([&, lo, hi, t] { run(lo, hi, partial[t]); });
    }
    for (auto& th : threads) th.join();
  }
  RatioBest<Int> best;
  for (const auto& p : partial) best.merge(p);
  return best;
}

template <class Int>
CheegerCertificate vertex_cheeger_with(const MeasuredGraph& g, const ScaledWeights<Int>& sw, unsigned workers) {
  const auto adj = adjacency_masks(g);
  const std::uint64_t full = (g.size() == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << g.size()) - 1);
  VertexBoundaryObjective<Int> obj{adj, sw.weights, full};
  const auto best = enumerate_min_ratio<Int>(g.size(), sw.weights, sw.total, obj, workers);
  if (!best.found) throw NoFeasibleSubset("no subset satisfies 0 < m(A) <= m(V)/2");
  return {Rational(BigInt(best.num), BigInt(best.den)), VertexSubset::from_mask(g.size(), best.mask),
          CheegerFlavor::vertex_measured};
}

template <class Int>
CheegerCertificate conductance_cheeger_with(const ReversibleWalk& w, const ScaledWeights<Int>& constraint,
                                            const ScaledWeights<Int>& area, unsigned workers) {
  const auto& g = w.graph();
  std::vector<Int> a(area.weights.begin(), area.weights.begin() + static_cast<long>(g.edges().size()));
  std::vector<Int> mu(area.weights.begin() + static_cast<long>(g.edges().size()), area.weights.end());
  EdgeBoundaryObjective<Int> obj{g.edges(), a, mu};
  const auto best = enumerate_min_ratio<Int>(g.size(), constraint.weights, constraint.total, obj, workers);
  if (!best.found) throw NoFeasibleSubset("no subset satisfies 0 < m(A) <= m(V)/2");
  return {Rational(BigInt(best.num), BigInt(best.den)), VertexSubset::from_mask(g.size(), best.mask),
          CheegerFlavor::conductance};
}

}  // namespace detail

/// min { m(∂A)/m(A) : 0 < m(A) <= m(V)/2 } by exhaustive enumeration, with the
/// smallest minimising subset as witness.
inline CheegerCertificate cheeger_vertex(const MeasuredGraph& g, const EnumerationOptions& opt = {}) {
  detail::check_cap(g.size(), opt);
  if (g.size() == 0) throw NoFeasibleSubset("empty graph");
  const unsigned workers = resolve_workers(opt.workers);
  if (auto sw = scale_to_integers<std::int64_t>(g.measure())) return detail::vertex_cheeger_with(g, *sw, workers);
  return detail::vertex_cheeger_with(g, *scale_to_integers<BigInt>(g.measure()), workers);
}

/// min { a(∂^E A)/mu(A) : 0 < m(A) <= m(V)/2 } where m is the constraint
/// measure (per vertex) and a, mu come from the walk.
inline CheegerCertificate cheeger_conductance(const ReversibleWalk& w, std::span<const Rational> constraint,
                                              const EnumerationOptions& opt = {}) {
  const auto& g = w.graph();
  detail::check_cap(g.size(), opt);
  if (constraint.size() != g.size()) throw PreconditionError("constraint measure has wrong length");
  Rational total = 0;
  for (const auto& x : constraint) {
    if (x < 0) throw PreconditionError("constraint measure must be nonnegative");
    total += x;
  }
  if (total <= 0) throw PreconditionError("constraint measure must have positive total");
  const unsigned workers = resolve_workers(opt.workers);
  // Objective numerator and denominator share one scale.
  std::vector<Rational> joint(w.conductance().begin(), w.conductance().end());
  joint.insert(joint.end(), w.stationary().begin(), w.stationary().end());
  auto c64 = scale_to_integers<std::int64_t>(constraint);
  auto a64 = scale_to_integers<std::int64_t>(joint);
  if (c64 && a64) return detail::conductance_cheeger_with(w, *c64, *a64, workers);
  return detail::conductance_cheeger_with(w, *scale_to_integers<BigInt>(constraint),
                                          *scale_to_integers<BigInt>(joint), workers);
}

/// The (mu,a,mu) flavour used by the random-walk Cheeger inequality.
inline CheegerCertificate cheeger_conductance(const ReversibleWalk& w, const EnumerationOptions& opt = {}) {
  return cheeger_conductance(w, w.stationary(), opt);
}

/// Ratio m(∂^V A)/m(A) at a given subset (A must have positive measure).
inline Rational vertex_ratio(const MeasuredGraph& g, const VertexSubset& a) {
  return measure_of(g, vertex_boundary(g, a)) / measure_of(g, a);
}

inline Rational conductance_ratio(const ReversibleWalk& w, const VertexSubset& a) {
  return w.area(edge_boundary(w.graph(), a)) / w.stationary_of(a);
}

struct ProfileEntry {
  Rational alpha;
  int radius = 1;
  /// Absent when no subset has alpha·m(V) <= m(A) <= m(V)/2.
  std::optional<Rational> value;
  std::optional<VertexSubset> witness;
};

/// For each alpha and each R in 1..diameter: min m(∂_R A)/m(A) over
/// alpha·m(V) <= m(A) <= m(V)/2 (with m(A) > 0).
inline std::vector<ProfileEntry> asymptotic_profile(const MeasuredGraph& g, std::span<const Rational> alphas,
                                                    const EnumerationOptions& opt = {}) {
  if (!g.connected()) throw PreconditionError("asymptotic profile requires a connected graph");
  detail::check_cap(g.size(), opt);
  for (const auto& a : alphas) {
    if (a <= 0 || a > Rational(1, 2)) throw PreconditionError("alpha must lie in (0, 1/2]");
  }
  const std::size_t n = g.size();
  const int diam = std::max(1, diameter(g));
  auto sw64 = scale_to_integers<std::int64_t>(g.measure());
  if (!sw64) throw CapExceeded("measure too large for profile enumeration");
  const auto& w = sw64->weights;
  const std::int64_t total = sw64->total;
  const auto adj = detail::adjacency_masks(g);
  const std::uint64_t full = (n == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);

  std::vector<std::pair<std::int64_t, std::int64_t>> alpha_frac;  // alpha = p/q
  for (const auto& a : alphas) {
    alpha_frac.emplace_back(numerator_of(a).convert_to<std::int64_t>(), denominator_of(a).convert_to<std::int64_t>());
  }
  std::vector<detail::RatioBest<std::int64_t>> best(alphas.size() * static_cast<std::size_t>(diam));
  std::vector<std::int64_t> boundary(static_cast<std::size_t>(diam));
  for (std::uint64_t a = 1; a <= full && a != 0; ++a) {
    std::int64_t ma = 0;
    for (std::uint64_t x = a; x; x &= x - 1) ma += w[std::countr_zero(x)];
    if (ma <= 0 || 2 * ma > total) {
      if (a == full) break;
      continue;
    }
    std::uint64_t ball = a;
    for (int r = 0; r < diam; ++r) {
      std::uint64_t grown = ball;
      for (std::uint64_t x = ball; x; x &= x - 1) grown |= adj[std::countr_zero(x)];
      ball = grown & full;
      std::int64_t mb = 0;
      for (std::uint64_t x = ball & ~a; x; x &= x - 1) mb += w[std::countr_zero(x)];
      boundary[static_cast<std::size_t>(r)] = mb;
    }
    for (std::size_t i = 0; i < alpha_frac.size(); ++i) {
      const auto [p, q] = alpha_frac[i];
      if (static_cast<__int128>(p) * total > static_cast<__int128>(q) * ma) continue;
      for (int r = 0; r < diam; ++r) best[i * static_cast<std::size_t>(diam) + static_cast<std::size_t>(r)].offer(boundary[static_cast<std::size_t>(r)], ma, a);
    }
    if (a == full) break;
  }
  std::vector<ProfileEntry> out;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    for (int r = 0; r < diam; ++r) {
      const auto& b = best[i * static_cast<std::size_t>(diam) + static_cast<std::size_t>(r)];
      ProfileEntry e{alphas[i], r + 1, std::nullopt, std::nullopt};
      if (b.found) {
        e.value = Rational(BigInt(b.num), BigInt(b.den));
        e.witness = VertexSubset::from_mask(n, b.mask);
      }
      out.push_back(std::move(e));
    }
  }
  return out;
}

}  // namespace mexp
