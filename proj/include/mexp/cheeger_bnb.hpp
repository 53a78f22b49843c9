#pragma once

// Exact vertex-measured Cheeger constant for graphs too large to enumerate.
//
// For a candidate ratio t = P/Q the question "is there a feasible A with
// m(∂A)/m(A) < t" is  min Q·w(N[A]) - (Q+P)·w(A) < 0  over A with
// 0 < w(A) <= W/2. Without the mass constraint this is a closure problem
// (choose A, pay for its closed neighbourhood) and is solved exactly by a
// minimum cut. The constraint is handled by Lagrangian relaxation
// (penalty b·(2w(A) - W), b >= 0), which gives a valid lower bound; nodes
// whose best bound is >= 0 cannot contain a better subset and are pruned.
// All capacities are integers, so every pruning decision is exact.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "mexp/cheeger.hpp"

namespace mexp {

struct BranchAndBoundOptions {
  std::uint64_t node_limit = 20'000'000;
  /// Lagrange multipliers are searched on the grid b / 2^bits.
  int multiplier_bits = 10;
};

struct BranchAndBoundStats {
  std::uint64_t nodes = 0;
  std::uint64_t min_cuts = 0;
  std::uint64_t incumbent_updates = 0;
};

namespace detail {

/// Dinic max-flow on a small dense-ish network with int64 capacities.
class MaxFlow {
 public:
  static constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;

  void reset(int nodes) {
    head_.assign(static_cast<std::size_t>(nodes), -1);
    to_.clear();
    cap_.clear();
    next_.clear();
  }
  void add_edge(int u, int v, std::int64_t c) {
    push(u, v, c);
    push(v, u, 0);
  }

  std::int64_t run(int s, int t) {
    std::int64_t flow = 0;
    const int n = static_cast<int>(head_.size());
    level_.assign(static_cast<std::size_t>(n), -1);
    iter_.assign(static_cast<std::size_t>(n), -1);
    while (bfs(s, t)) {
      iter_ = head_;
      while (true) {
        const std::int64_t f = dfs(s, t, kInf);
        if (f == 0) break;
        flow += f;
      }
    }
    return flow;
  }

  /// Nodes reachable from s in the residual network after run().
  std::vector<char> source_side(int s) const {
    std::vector<char> seen(head_.size(), 0);
    std::vector<int> stack{s};
    seen[static_cast<std::size_t>(s)] = 1;
    while (!stack.empty()) {
      const int x = stack.back();
      stack.pop_back();
      for (int e = head_[static_cast<std::size_t>(x)]; e >= 0; e = next_[static_cast<std::size_t>(e)]) {
        const int y = to_[static_cast<std::size_t>(e)];
        if (cap_[static_cast<std::size_t>(e)] > 0 && !seen[static_cast<std::size_t>(y)]) {
          seen[static_cast<std::size_t>(y)] = 1;
          stack.push_back(y);
        }
      }
    }
    return seen;
  }

 private:
  void push(int u, int v, std::int64_t c) {
    to_.push_back(v);
    cap_.push_back(c);
    next_.push_back(head_[static_cast<std::size_t>(u)]);
    head_[static_cast<std::size_t>(u)] = static_cast<int>(to_.size()) - 1;
  }
  bool bfs(int s, int t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::vector<int> queue{s};
    level_[static_cast<std::size_t>(s)] = 0;
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      const int x = queue[qi];
      for (int e = head_[static_cast<std::size_t>(x)]; e >= 0; e = next_[static_cast<std::size_t>(e)]) {
        const int y = to_[static_cast<std::size_t>(e)];
        if (cap_[static_cast<std::size_t>(e)] > 0 && level_[static_cast<std::size_t>(y)] < 0) {
          level_[static_cast<std::size_t>(y)] = level_[static_cast<std::size_t>(x)] + 1;
          queue.push_back(y);
        }
      }
    }
    return level_[static_cast<std::size_t>(t)] >= 0;
  }
  std::int64_t dfs(int x, int t, std::int64_t pushed) {
    if (x == t) return pushed;
    for (int& e = iter_[static_cast<std::size_t>(x)]; e >= 0; e = next_[static_cast<std::size_t>(e)]) {
      const int y = to_[static_cast<std::size_t>(e)];
      if (cap_[static_cast<std::size_t>(e)] > 0 && level_[static_cast<std::size_t>(y)] == level_[static_cast<std::size_t>(x)] + 1) {
        const std::int64_t f = dfs(y, t, std::min(pushed, cap_[static_cast<std::size_t>(e)]));
        if (f > 0) {
          cap_[static_cast<std::size_t>(e)] -= f;
          cap_[static_cast<std::size_t>(e ^ 1)] += f;
          return f;
        }
      }
    }
    return 0;
  }

  std::vector<int> head_, to_, next_, level_, iter_;
  std::vector<std::int64_t> cap_;
};

class CheegerBranchAndBound {
 public:
  CheegerBranchAndBound(const MeasuredGraph& g, const std::vector<std::int64_t>& w, std::int64_t total,
                        const BranchAndBoundOptions& opt)
      : n_(static_cast<int>(g.size())), w_(w), total_(total), opt_(opt) {
    adj_ = adjacency_masks(g);
    closed_.resize(adj_.size());
    for (int v = 0; v < n_; ++v) closed_[static_cast<std::size_t>(v)] = adj_[static_cast<std::size_t>(v)] | bit(v);
    full_ = (n_ == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << n_) - 1);
    scale_ = std::int64_t{1} << opt_.multiplier_bits;
  }

  /// Returns the minimising mask; value is best_num_/best_den_.
  std::uint64_t solve(BranchAndBoundStats& stats) {
    stats_ = &stats;
    seed_incumbent(g_order());
    const auto order = g_order();
    std::uint64_t excluded = 0;
    for (int v : order) {
      const std::uint64_t in = bit(v);
      if (2 * mass(in) <= total_) branch(in, excluded);
      excluded |= in;
    }
    return best_mask_;
  }

  std::int64_t best_num() const { return best_num_; }
  std::int64_t best_den() const { return best_den_; }

 private:
  static std::uint64_t bit(int v) { return std::uint64_t{1} << v; }

  std::int64_t mass(std::uint64_t a) const {
    std::int64_t s = 0;
    for (std::uint64_t x = a; x; x &= x - 1) s += w_[static_cast<std::size_t>(std::countr_zero(x))];
    return s;
  }
  std::uint64_t neighbourhood(std::uint64_t a) const {
    std::uint64_t nb = 0;
    for (std::uint64_t x = a; x; x &= x - 1) nb |= closed_[static_cast<std::size_t>(std::countr_zero(x))];
    return nb & full_;
  }
  bool feasible(std::uint64_t a) const {
    const std::int64_t m = mass(a);
    return m > 0 && 2 * m <= total_;
  }

  void offer(std::uint64_t a) {
    if (!feasible(a)) return;
    const std::int64_t den = mass(a);
    const std::int64_t num = mass(neighbourhood(a) & ~a);
    const __int128 lhs = static_cast<__int128>(num) * best_den_;
    const __int128 rhs = static_cast<__int128>(best_num_) * den;
    if (!have_best_ || lhs < rhs || (lhs == rhs && a < best_mask_)) {
      const std::int64_t gcd = std::gcd(num, den);
      best_num_ = num / gcd;
      best_den_ = den / gcd;
      best_mask_ = a;
      have_best_ = true;
      ++stats_->incumbent_updates;
    }
  }

  std::vector<int> g_order() const {
    std::vector<int> order(static_cast<std::size_t>(n_));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return w_[static_cast<std::size_t>(a)] > w_[static_cast<std::size_t>(b)]; });
    return order;
  }

  /// Singletons, BFS-ordered prefixes from every vertex, then single-vertex
  /// local improvement of the best.
  void seed_incumbent(const std::vector<int>& order) {
    for (int v : order) offer(bit(v));
    for (int s = 0; s < n_; ++s) {
      std::uint64_t a = 0;
      std::vector<int> queue{s};
      std::uint64_t seen = bit(s);
      for (std::size_t qi = 0; qi < queue.size(); ++qi) {
        const int x = queue[qi];
        a |= bit(x);
        if (2 * mass(a) > total_) break;
        offer(a);
        for (std::uint64_t y = adj_[static_cast<std::size_t>(x)] & ~seen; y; y &= y - 1) {
          const int z = std::countr_zero(y);
          seen |= bit(z);
          queue.push_back(z);
        }
      }
    }
    bool improved = have_best_;
    while (improved) {
      improved = false;
      const std::uint64_t base = best_mask_;
      for (int v = 0; v < n_; ++v) {
        const std::uint64_t before = best_mask_;
        offer(base ^ bit(v));
        if (best_mask_ != before) improved = true;
      }
    }
  }

  struct CutResult {
    __int128 bound;  // scaled Lagrangian value
    std::uint64_t set;
  };

  /// min over forced_in ⊆ A, A ∩ forced_out = ∅ of
  ///   D·Q·w(N[A]) - (D(Q+P) - 2b)·w(A) - b·W.
  CutResult lagrangian(std::uint64_t forced_in, std::uint64_t forced_out, std::int64_t b) {
    ++stats_->min_cuts;
    const int s = 0, t = 1;
    auto xnode = [](int u) { return 2 + u; };
    auto ynode = [&](int v) { return 2 + n_ + v; };
    flow_.reset(2 + 2 * n_);
    const std::int64_t gain_coeff = scale_ * (best_den_ + best_num_) - 2 * b;
    const std::int64_t cost_coeff = scale_ * best_den_;
    __int128 constant = 0;
    std::int64_t positive = 0;
    std::uint64_t needed = 0;
    for (int u = 0; u < n_; ++u) {
      const std::uint64_t ub = bit(u);
      if (forced_out & ub) continue;
      const std::int64_t gain = gain_coeff * w_[static_cast<std::size_t>(u)];
      if (forced_in & ub) {
        flow_.add_edge(s, xnode(u), MaxFlow::kInf);
        constant += gain;
      } else if (gain > 0) {
        flow_.add_edge(s, xnode(u), gain);
        positive += gain;
      } else if (gain < 0) {
        flow_.add_edge(xnode(u), t, -gain);
      }
      for (std::uint64_t y = closed_[static_cast<std::size_t>(u)]; y; y &= y - 1) {
        flow_.add_edge(xnode(u), ynode(std::countr_zero(y)), MaxFlow::kInf);
      }
      needed |= closed_[static_cast<std::size_t>(u)];
    }
    for (std::uint64_t y = needed & full_; y; y &= y - 1) {
      const int v = std::countr_zero(y);
      const std::int64_t c = cost_coeff * w_[static_cast<std::size_t>(v)];
      if (c > 0) flow_.add_edge(ynode(v), t, c);
    }
    const std::int64_t cut = flow_.run(s, t);
    const __int128 max_profit = constant + positive - cut;
    const auto side = flow_.source_side(s);
    std::uint64_t set = 0;
    for (int u = 0; u < n_; ++u) {
      if (side[static_cast<std::size_t>(xnode(u))]) set |= bit(u);
    }
    return {-max_profit - static_cast<__int128>(b) * total_, set};
  }

  /// Searches the multiplier. Returns true when the node is proven unable to
  /// beat the incumbent; otherwise reports the sets bracketing the crossover.
  bool bound_prunes(std::uint64_t in, std::uint64_t out, std::uint64_t& heavy, std::uint64_t& light) {
    while (true) {
      const std::int64_t num = best_num_, den = best_den_;
      std::int64_t lo = 0;
      std::int64_t hi = (scale_ * (den + num)) / 2 + 1;
      heavy = light = in;
      bool changed = false;
      while (lo <= hi) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        const auto r = lagrangian(in, out, mid);
        offer(r.set);
        if (best_num_ != num || best_den_ != den) {
          changed = true;
          break;
        }
        if (r.bound >= 0) return true;
        if (2 * mass(r.set) > total_) {
          heavy = r.set;
          lo = mid + 1;
        } else {
          light = r.set;
          hi = mid - 1;
        }
      }
      if (!changed) return false;
    }
  }

  void branch(std::uint64_t in, std::uint64_t out) {
    if (++stats_->nodes > opt_.node_limit) {
      throw CapExceeded("branch and bound exceeded its node limit of " + std::to_string(opt_.node_limit));
    }
    if (2 * mass(in) > total_) return;
    const std::uint64_t free = full_ & ~in & ~out;
    if (free == 0) {
      offer(in);
      return;
    }
    std::uint64_t heavy = 0, light = 0;
    if (bound_prunes(in, out, heavy, light)) return;

    auto heaviest = [&](std::uint64_t candidates) {
      int pick = -1;
      for (std::uint64_t x = candidates & free; x; x &= x - 1) {
        const int v = std::countr_zero(x);
        if (pick < 0 || w_[static_cast<std::size_t>(v)] > w_[static_cast<std::size_t>(pick)]) pick = v;
      }
      return pick;
    };
    int v = heaviest(heavy & ~light);
    if (v < 0) v = heaviest(heavy);
    if (v < 0) v = heaviest(neighbourhood(in));
    if (v < 0) v = heaviest(free);
    const std::uint64_t vb = bit(v);
    branch(in, out | vb);
    branch(in | vb, out);
  }

  int n_;
  std::vector<std::int64_t> w_;
  std::int64_t total_;
  BranchAndBoundOptions opt_;
  std::vector<std::uint64_t> adj_, closed_;
  std::uint64_t full_ = 0;
  std::int64_t scale_ = 1;
  MaxFlow flow_;
  BranchAndBoundStats* stats_ = nullptr;
  bool have_best_ = false;
  std::int64_t best_num_ = 0, best_den_ = 1;
  std::uint64_t best_mask_ = 0;
};

}  // namespace detail

/// Exact vertex-measured Cheeger constant by branch and bound; intended for
/// graphs beyond the enumeration cap (n <= 64). The value is exact; the
/// witness is a minimiser but not necessarily the smallest one.
inline CheegerCertificate cheeger_vertex_branch_and_bound(const MeasuredGraph& g, const BranchAndBoundOptions& opt = {},
                                                          BranchAndBoundStats* stats_out = nullptr) {
  if (g.size() == 0 || g.size() > 64) throw CapExceeded("branch and bound supports 1..64 vertices");
  auto sw = scale_to_integers<std::int64_t>(g.measure());
  // Capacities reach 2^bits · W² · n; keep them well inside int64.
  if (!sw || sw->total > (std::int64_t{1} << 20)) {
    throw CapExceeded("measure too fine-grained for integer branch and bound");
  }
  BranchAndBoundStats stats;
  detail::CheegerBranchAndBound solver(g, sw->weights, sw->total, opt);
  const std::uint64_t mask = solver.solve(stats);
  if (stats_out) *stats_out = stats;
  if (mask == 0) throw NoFeasibleSubset("no subset satisfies 0 < m(A) <= m(V)/2");
  return {Rational(solver.best_num(), solver.best_den()), VertexSubset::from_mask(g.size(), mask),
          CheegerFlavor::vertex_measured};
}

/// Enumeration when within the cap, branch and bound otherwise.
inline CheegerCertificate cheeger_vertex_exact(const MeasuredGraph& g, const EnumerationOptions& enum_opt = {},
                                               const BranchAndBoundOptions& bnb_opt = {}) {
  if (g.size() <= enum_opt.cap && g.size() <= detail::kMaxEnumerable) return cheeger_vertex(g, enum_opt);
  return cheeger_vertex_branch_and_bound(g, bnb_opt);
}

}  // namespace mexp
