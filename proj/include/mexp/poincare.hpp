#pragma once

// Lp-Poincaré energies. Both sides of every inequality sum over ordered
// pairs: an edge {u,v} contributes through (u,v) and (v,u).

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>
#include <vector>

#include "mexp/cheeger.hpp"
#include "mexp/random.hpp"
#include "mexp/spectral.hpp"

namespace mexp {

/// Vector-valued function on vertices: f[v] is the coordinate vector of v.
using PointMap = std::vector<std::vector<double>>;

inline PointMap as_point_map(std::span<const double> f) {
  PointMap out;
  out.reserve(f.size());
  for (double x : f) out.push_back({x});
  return out;
}

/// ||x - y||_p^p.
inline double lp_distance_pow(std::span<const double> x, std::span<const double> y, double p) {
  if (x.size() != y.size()) throw PreconditionError("points have different dimensions");
  double s = 0;
  for (std::size_t k = 0; k < x.size(); ++k) s += std::pow(std::abs(x[k] - y[k]), p);
  return s;
}

/// Sum over edges (each once) of ||f(u)-f(v)||^p a(u,v).
inline double edge_energy_unordered(const MeasuredGraph& g, std::span<const double> a, const PointMap& f, double p) {
  double s = 0;
  for (std::size_t i = 0; i < g.edges().size(); ++i) {
    const auto e = g.edges()[i];
    s += lp_distance_pow(f[e.u], f[e.v], p) * a[i];
  }
  return s;
}

/// Sum over ordered adjacent pairs (u,v) of ||f(u)-f(v)||^p a(u,v).
inline double edge_energy(const MeasuredGraph& g, std::span<const double> a, const PointMap& f, double p) {
  double s = 0;
  for (std::size_t u = 0; u < g.size(); ++u) {
    for (Vertex v : g.neighbors(static_cast<Vertex>(u))) {
      s += lp_distance_pow(f[u], f[v], p) * a[*g.edge_index(static_cast<Vertex>(u), v)];
    }
  }
  return s;
}

/// Sum over unordered pairs u < v of ||f(u)-f(v)||^p w(u)w(v)/w(V).
inline double pair_energy_unordered(std::span<const double> w, const PointMap& f, double p) {
  double total = 0;
  for (double x : w) total += x;
  double s = 0;
  for (std::size_t u = 0; u < w.size(); ++u) {
    for (std::size_t v = u + 1; v < w.size(); ++v) s += lp_distance_pow(f[u], f[v], p) * w[u] * w[v];
  }
  return s / total;
}

/// Sum over ordered pairs (u,v) of ||f(u)-f(v)||^p w(u)w(v)/w(V).
inline double pair_energy(std::span<const double> w, const PointMap& f, double p) {
  double total = 0;
  for (double x : w) total += x;
  double s = 0;
  for (std::size_t u = 0; u < w.size(); ++u) {
    for (std::size_t v = 0; v < w.size(); ++v) s += lp_distance_pow(f[u], f[v], p) * w[u] * w[v];
  }
  return s / total;
}

/// Sum over v of ||f(v)||_2^2 w(v).
inline double weighted_norm_squared(std::span<const double> w, const PointMap& f) {
  double s = 0;
  for (std::size_t v = 0; v < w.size(); ++v) {
    for (double x : f[v]) s += x * x * w[v];
  }
  return s;
}

inline std::vector<double> to_doubles(std::span<const Rational> xs) {
  std::vector<double> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(to_double(x));
  return out;
}

/// Edge energy over pair form, in the walk's conductance and stationary
/// measure.
inline double lp_energy_ratio(const ReversibleWalk& w, const PointMap& f, double p) {
  if (p < 1) throw PreconditionError("p must be at least 1");
  if (f.size() != w.size()) throw PreconditionError("function has wrong length");
  const auto a = to_doubles(w.conductance());
  const auto mu = to_doubles(w.stationary());
  const double den = pair_energy(mu, f, p);
  if (!(den > 0)) throw PreconditionError("Poincaré ratio of a constant function");
  return edge_energy(w.graph(), a, f, p) / den;
}

inline double lp_energy_ratio(const ReversibleWalk& w, std::span<const double> f, double p) {
  return lp_energy_ratio(w, as_point_map(f), p);
}

struct MeasuredLpCheck {
  double lhs = 0;   // sum over ordered adjacent pairs of |df|^p (m(u)+m(v))
  double pair = 0;  // sum over ordered pairs of |df|^p m(u)m(v)/m(V)
  double ratio = 0;
};

inline MeasuredLpCheck measured_lp_check(const MeasuredGraph& g, const PointMap& f, double p) {
  if (!g.full_support()) throw PreconditionError("measured Poincaré check requires full support");
  if (f.size() != g.size()) throw PreconditionError("function has wrong length");
  std::vector<double> a;
  for (const auto& e : g.edges()) a.push_back(to_double(g.measure(e.u) + g.measure(e.v)));
  const auto m = to_doubles(g.measure());
  MeasuredLpCheck out;
  out.lhs = edge_energy(g, a, f, p);
  out.pair = pair_energy(m, f, p);
  if (!(out.pair > 0)) throw PreconditionError("Poincaré ratio of a constant function");
  out.ratio = out.lhs / out.pair;
  return out;
}

inline MeasuredLpCheck measured_lp_check(const MeasuredGraph& g, std::span<const double> f, double p) {
  return measured_lp_check(g, as_point_map(f), p);
}

/// Poincaré constant for a walk with Cheeger constant c:
/// c^2/2 for p < 2, (4c^2/(p^2 2^{1+2/p}))^{p/2} / 2^{p+1} for p >= 2.
inline double cp_formula(double c, double p) {
  if (!(c > 0)) throw PreconditionError("cp_formula requires c > 0");
  if (p < 1) throw PreconditionError("p must be at least 1");
  if (p < 2) return c * c / 2;
  const double base = 4 * c * c / (p * p * std::pow(2.0, 1 + 2 / p));
  return std::pow(base, p / 2) / std::pow(2.0, p + 1);
}

/// Constant for the measured inequality with weights m(u)+m(v) and pair form
/// in m, for valency <= K, measure ratio >= s and vertex Cheeger constant c.
/// Goes through the auxiliary walk: its (mu,a,m)-Cheeger constant is at least
/// cs/K, and mu(u)mu(v)/mu(V) >= s(1+s)/K · m(u)m(v)/m(V).
inline double measured_cp(double c, double s, double k, double p) {
  if (!(s > 0 && s <= 1)) throw PreconditionError("measure ratio must lie in (0, 1]");
  if (!(k >= 1)) throw PreconditionError("valency bound must be at least 1");
  return cp_formula(c * s / k, p) * s * (1 + s) / k;
}

/// rho1^p K(1+s)/(s cp) for a given Poincaré constant cp.
inline double kappa_from_poincare_constant(double k, double s, double cp, double p, double rho1) {
  if (!(cp > 0)) throw PreconditionError("Poincaré constant must be positive");
  if (rho1 < 0) throw PreconditionError("rho_+(1) must be nonnegative");
  return std::pow(rho1, p) * k * (1 + s) / (s * cp);
}

/// rho1^p K(1+s)/(s cp_formula(c,p)).
inline double kappa_constant(int k, double s, double c, double p, double rho1) {
  if (k < 1) throw PreconditionError("valency bound must be at least 1");
  if (!(s > 0 && s <= 1)) throw PreconditionError("measure ratio must lie in (0, 1]");
  return kappa_from_poincare_constant(k, s, cp_formula(c, p), p, rho1);
}

struct PoincareOptions {
  int restarts = 64;
  std::uint64_t seed = 0;
  int max_iterations = 4000;
  double smoothing = 1e-9;
  double gradient_tolerance = 1e-8;
  unsigned workers = 0;
};

struct PoincareEstimate {
  double p = 2;
  double estimate = std::numeric_limits<double>::infinity();
  std::vector<double> minimizer;
  int restarts = 0;
  int best_restart = -1;
  bool converged = false;
};

namespace detail {

class LpObjective {
 public:
  LpObjective(const MeasuredGraph& g, std::vector<double> a, std::vector<double> mass, double p, double eps)
      : n_(g.size()), a_(std::move(a)), mass_(std::move(mass)), p_(p), eps_(p < 2 ? eps : 0.0) {
    for (const auto& e : g.edges()) edges_.push_back(e);
    for (double x : mass_) total_ += x;
  }

  std::size_t size() const { return n_; }

  /// |x|^p, smoothed to (x^2+eps^2)^{p/2} when requested.
  double phi(double x, bool smooth) const {
    if (smooth && eps_ > 0) return std::pow(x * x + eps_ * eps_, p_ / 2);
    return std::pow(std::abs(x), p_);
  }
  double dphi(double x) const {
    if (eps_ > 0) return p_ * x * std::pow(x * x + eps_ * eps_, p_ / 2 - 1);
    if (x == 0) return 0;
    return p_ * std::pow(std::abs(x), p_ - 1) * (x > 0 ? 1 : -1);
  }

  /// Ratio; fills the gradient when grad is non-null (always smoothed).
  double evaluate(std::span<const double> f, bool smooth, std::vector<double>* grad) const {
    double e = 0, q = 0;
    std::vector<double> ge, gq;
    if (grad) {
      ge.assign(n_, 0.0);
      gq.assign(n_, 0.0);
    }
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      const auto [u, v] = edges_[i];
      const double d = f[u] - f[v];
      const double w = 2 * a_[i];
      e += w * phi(d, smooth);
      if (grad) {
        const double g = w * dphi(d);
        ge[u] += g;
        ge[v] -= g;
      }
    }
    for (std::size_t u = 0; u < n_; ++u) {
      for (std::size_t v = u + 1; v < n_; ++v) {
        const double d = f[u] - f[v];
        const double w = 2 * mass_[u] * mass_[v] / total_;
        q += w * phi(d, smooth);
        if (grad) {
          const double g = w * dphi(d);
          gq[u] += g;
          gq[v] -= g;
        }
      }
    }
    const double r = e / q;
    if (grad) {
      grad->assign(n_, 0.0);
      for (std::size_t u = 0; u < n_; ++u) (*grad)[u] = (ge[u] - r * gq[u]) / q;
    }
    return r;
  }

 private:
  std::size_t n_;
  std::vector<Edge> edges_;
  std::vector<double> a_;
  std::vector<double> mass_;
  double total_ = 0;
  double p_;
  double eps_;
};

/// Removes the mean and normalises to unit Euclidean norm; false if f is
/// numerically constant.
inline bool normalise(std::vector<double>& f) {
  double mean = 0;
  for (double x : f) mean += x;
  mean /= static_cast<double>(f.size());
  double norm = 0;
  for (double& x : f) {
    x -= mean;
    norm += x * x;
  }
  norm = std::sqrt(norm);
  if (!(norm > 1e-12)) return false;
  for (double& x : f) x /= norm;
  return true;
}

struct RestartResult {
  double ratio = std::numeric_limits<double>::infinity();
  std::vector<double> f;
  bool converged = false;
};

inline RestartResult descend(const LpObjective& obj, std::uint64_t seed, const PoincareOptions& opt) {
  Rng rng(seed);
  const std::size_t n = obj.size();
  std::vector<double> f(n);
  do {
    for (double& x : f) x = rng.normal();
  } while (!normalise(f));
  std::vector<double> g, trial(n);
  double step = 1.0;
  bool converged = false;
  double r = obj.evaluate(f, true, &g);
  for (int it = 0; it < opt.max_iterations; ++it) {
    // Tangent direction: orthogonal to constants and to f.
    double mean = 0, along = 0;
    for (double x : g) mean += x;
    mean /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      g[i] -= mean;
      along += g[i] * f[i];
    }
    double gnorm2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      g[i] -= along * f[i];
      gnorm2 += g[i] * g[i];
    }
    if (std::sqrt(gnorm2) < opt.gradient_tolerance) {
      converged = true;
      break;
    }
    bool accepted = false;
    double t = step;
    while (t > 1e-18) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = f[i] - t * g[i];
      if (normalise(trial)) {
        const double rt = obj.evaluate(trial, true, nullptr);
        if (rt <= r - 1e-4 * t * gnorm2) {
          accepted = true;
          break;
        }
      }
      t /= 2;
    }
    if (!accepted) break;
    f = trial;
    step = 2 * t;
    r = obj.evaluate(f, true, &g);
  }
  return {obj.evaluate(f, false, nullptr), f, converged};
}

}  // namespace detail

/// Multi-start projected gradient descent on the Lp energy ratio of a walk.
/// The estimate is the unsmoothed ratio at the best point found, hence an
/// upper bound on the optimal constant.
inline PoincareEstimate optimal_lp_constant(const ReversibleWalk& w, double p, const PoincareOptions& opt = {}) {
  if (p < 1) throw PreconditionError("p must be at least 1");
  if (!w.graph().connected()) throw PreconditionError("Poincaré constant requires a connected graph");
  if (w.size() < 2) throw PreconditionError("Poincaré constant needs at least two vertices");
  if (opt.restarts < 1) throw PreconditionError("need at least one restart");
  const detail::LpObjective obj(w.graph(), to_doubles(w.conductance()), to_doubles(w.stationary()), p, opt.smoothing);
  std::vector<detail::RestartResult> results(static_cast<std::size_t>(opt.restarts));
  const unsigned workers = std::max(1u, std::min<unsigned>(resolve_workers(opt.workers), static_cast<unsigned>(opt.restarts)));
  auto run = [&](unsigned id) {
    for (int k = static_cast<int>(id); k < opt.restarts; k += static_cast<int>(workers)) {
      results[static_cast<std::size_t>(k)] = detail::descend(obj, derive_seed(opt.seed, static_cast<std::uint64_t>(k)), opt);
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(run, i);
    for (auto& t : pool) t.join();
  }
  PoincareEstimate out;
  out.p = p;
  out.restarts = opt.restarts;
  for (int k = 0; k < opt.restarts; ++k) {
    const auto& r = results[static_cast<std::size_t>(k)];
    if (r.ratio < out.estimate) {
      out.estimate = r.ratio;
      out.minimizer = r.f;
      out.best_restart = k;
      out.converged = r.converged;
    }
  }
  return out;
}

}  // namespace mexp
