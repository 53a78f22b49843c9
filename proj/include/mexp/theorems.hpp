#pragma once

#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "mexp/cheeger.hpp"
#include "mexp/poincare.hpp"
#include "mexp/spectral.hpp"

namespace mexp {

/// Absolute slack granted to a floating-point side: lhs <= rhs + tolerance.
inline constexpr double kTheoremTolerance = 1e-8;

/// One inequality lhs <= rhs.
struct Comparison {
  std::string relation;
  double lhs = 0;
  double rhs = 0;
  /// Present when the side is an exact rational.
  std::optional<Rational> lhs_exact;
  std::optional<Rational> rhs_exact;
  double slack = 0;  // rhs - lhs
  bool holds = false;
};

struct InequalityReport {
  std::string name;
  std::vector<Comparison> comparisons;
  /// Inputs used, as text ("p/q" for rationals, 17 significant digits for
  /// doubles), in a fixed order.
  std::vector<std::pair<std::string, std::string>> inputs;
  bool holds = true;

  void add(Comparison c) {
    holds = holds && c.holds;
    comparisons.push_back(std::move(c));
  }
};

inline std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline Comparison compare_exact(std::string relation, const Rational& lhs, const Rational& rhs) {
  Comparison c;
  c.relation = std::move(relation);
  c.lhs_exact = lhs;
  c.rhs_exact = rhs;
  c.lhs = to_double(lhs);
  c.rhs = to_double(rhs);
  c.slack = to_double(rhs - lhs);
  c.holds = lhs <= rhs;
  return c;
}

/// At least one side is floating point.
inline Comparison compare_float(std::string relation, double lhs, double rhs, std::optional<Rational> lhs_exact,
                                std::optional<Rational> rhs_exact, double tolerance = kTheoremTolerance) {
  Comparison c;
  c.relation = std::move(relation);
  c.lhs = lhs;
  c.rhs = rhs;
  c.lhs_exact = std::move(lhs_exact);
  c.rhs_exact = std::move(rhs_exact);
  c.slack = rhs - lhs;
  c.holds = lhs <= rhs + tolerance;
  return c;
}

struct TheoremOptions {
  EnumerationOptions enumeration;
  SpectrumOptions spectrum;
  double tolerance = kTheoremTolerance;
};

namespace detail {

inline double require_gap(const SelfAdjointOperator& op, const SpectrumOptions& opt) {
  const auto gap = spectral_gap(op, opt);
  if (!gap) throw PreconditionError("operator has no positive eigenvalue");
  return *gap;
}

struct MeasuredInputs {
  int k = 0;
  Rational s;
  Rational c;
  double lambda = 0;
};

inline MeasuredInputs measured_inputs(const MeasuredGraph& g, const TheoremOptions& opt) {
  if (!g.connected()) throw PreconditionError("graph must be connected");
  if (!g.full_support()) throw PreconditionError("measure must have full support");
  const auto st = stats(g);
  return {st.max_valency, *st.measure_ratio, cheeger_vertex(g, opt.enumeration).value,
          require_gap(lambda_operator(g), opt.spectrum)};
}

}  // namespace detail

/// c^2/2 <= lambda <= 2c for the (mu,a,mu)-Cheeger constant c and the gap of
/// the walk Laplacian.
inline InequalityReport verify_cheeger_sandwich(const ReversibleWalk& w, const TheoremOptions& opt = {}) {
  if (!w.graph().connected()) throw PreconditionError("graph must be connected");
  const Rational c = cheeger_conductance(w, opt.enumeration).value;
  const double lambda = detail::require_gap(delta_operator(w), opt.spectrum);
  InequalityReport r{"cheeger-sandwich", {}, {}, true};
  r.inputs = {{"n", std::to_string(w.size())}, {"c", to_string(c)}, {"lambda", format_double(lambda)}};
  const Rational lower = c * c / 2;
  const Rational upper = 2 * c;
  r.add(compare_float("c^2/2 <= lambda", to_double(lower), lambda, lower, std::nullopt, opt.tolerance));
  r.add(compare_float("lambda <= 2c", lambda, to_double(upper), std::nullopt, upper, opt.tolerance));
  return r;
}

/// c^2/2 <= lambda for the (mu,a,m)-Cheeger constant with an auxiliary
/// measure m of full support.
inline InequalityReport verify_cheeger_lower_bound(const ReversibleWalk& w, std::span<const Rational> m,
                                                   const TheoremOptions& opt = {}) {
  if (!w.graph().connected()) throw PreconditionError("graph must be connected");
  for (const auto& x : m) {
    if (x <= 0) throw PreconditionError("auxiliary measure must have full support");
  }
  const Rational c = cheeger_conductance(w, m, opt.enumeration).value;
  const double lambda = detail::require_gap(delta_operator(w), opt.spectrum);
  InequalityReport r{"cheeger-lower-bound", {}, {}, true};
  r.inputs = {{"n", std::to_string(w.size())}, {"c", to_string(c)}, {"lambda", format_double(lambda)}};
  const Rational lower = c * c / 2;
  r.add(compare_float("c^2/2 <= lambda", to_double(lower), lambda, lower, std::nullopt, opt.tolerance));
  return r;
}

/// c^2 s^3 (1+s)/(2K^3) <= lambda <= 2(1+s)Kc/s with c the vertex Cheeger
/// constant and lambda the gap of Lambda.
inline InequalityReport verify_measured_sandwich(const MeasuredGraph& g, const TheoremOptions& opt = {}) {
  const auto in = detail::measured_inputs(g, opt);
  const Rational k = in.k;
  const Rational& s = in.s;
  const Rational& c = in.c;
  InequalityReport r{"measured-sandwich", {}, {}, true};
  r.inputs = {{"n", std::to_string(g.size())}, {"K", std::to_string(in.k)}, {"s", to_string(s)},
              {"c", to_string(c)}, {"lambda", format_double(in.lambda)}};
  const Rational lower = c * c * s * s * s * (1 + s) / (2 * k * k * k);
  const Rational upper = 2 * (1 + s) * k * c / s;
  r.add(compare_float("c^2 s^3 (1+s)/(2K^3) <= lambda", to_double(lower), in.lambda, lower, std::nullopt, opt.tolerance));
  r.add(compare_float("lambda <= 2(1+s)Kc/s", in.lambda, to_double(upper), std::nullopt, upper, opt.tolerance));
  return r;
}

/// s(1+s)/K lambda' <= lambda <= K^2(1+s)/s^2 lambda' with lambda the gap of
/// Lambda and lambda' the gap of the auxiliary walk.
inline InequalityReport verify_gap_controls(const MeasuredGraph& g, const TheoremOptions& opt = {}) {
  if (!g.connected()) throw PreconditionError("graph must be connected");
  if (!g.full_support()) throw PreconditionError("measure must have full support");
  const auto st = stats(g);
  const Rational k = st.max_valency;
  const Rational s = *st.measure_ratio;
  const double lambda = detail::require_gap(lambda_operator(g), opt.spectrum);
  const double lambda_walk = detail::require_gap(delta_operator(auxiliary_walk(g)), opt.spectrum);
  InequalityReport r{"gap-controls", {}, {}, true};
  r.inputs = {{"n", std::to_string(g.size())}, {"K", std::to_string(st.max_valency)}, {"s", to_string(s)},
              {"lambda", format_double(lambda)}, {"lambda_prime", format_double(lambda_walk)}};
  const double lo = to_double(s * (1 + s) / k) * lambda_walk;
  const double hi = to_double(k * k * (1 + s) / (s * s)) * lambda_walk;
  r.add(compare_float("s(1+s)/K lambda' <= lambda", lo, lambda, std::nullopt, std::nullopt, opt.tolerance));
  r.add(compare_float("lambda <= K^2(1+s)/s^2 lambda'", lambda, hi, std::nullopt, std::nullopt, opt.tolerance));
  return r;
}

/// lambda rho^2 <= (1/mu(A) + 1/mu(B)) (a(E) - a(E_A) - a(E_B)) with
/// rho = d(A,B).
inline InequalityReport distance_gap_bound(const ReversibleWalk& w, const VertexSubset& a, const VertexSubset& b,
                                           const TheoremOptions& opt = {}) {
  const auto& g = w.graph();
  if (!g.connected()) throw PreconditionError("graph must be connected");
  if (a.universe() != g.size() || b.universe() != g.size()) throw PreconditionError("subset has wrong universe");
  if (a.empty() || b.empty()) throw PreconditionError("A and B must be nonempty");
  if (a.intersects(b)) throw PreconditionError("A and B must be disjoint");
  const int rho = set_distance(g, a, b);
  const double lambda = detail::require_gap(delta_operator(w), opt.spectrum);
  Rational inner = 0;
  for (std::size_t i = 0; i < g.edges().size(); ++i) {
    const auto e = g.edges()[i];
    const bool in_a = a.contains(e.u) && a.contains(e.v);
    const bool in_b = b.contains(e.u) && b.contains(e.v);
    if (!in_a && !in_b) inner += w.conductance()[i];
  }
  const Rational rhs = (1 / w.stationary_of(a) + 1 / w.stationary_of(b)) * inner;
  InequalityReport r{"distance-bound", {}, {}, true};
  r.inputs = {{"n", std::to_string(g.size())}, {"rho", std::to_string(rho)}, {"lambda", format_double(lambda)},
              {"mu(A)", to_string(w.stationary_of(a))}, {"mu(B)", to_string(w.stationary_of(b))}};
  r.add(compare_float("lambda rho^2 <= (1/mu(A)+1/mu(B))(a(E)-a(E_A)-a(E_B))",
                      lambda * static_cast<double>(rho) * rho, to_double(rhs), std::nullopt, rhs, opt.tolerance));
  return r;
}

/// c >= s lambda/(2(1+s)K) for the vertex Cheeger constant and Lambda gap.
inline InequalityReport verify_poincare_to_cheeger_measured(const MeasuredGraph& g, const TheoremOptions& opt = {}) {
  const auto in = detail::measured_inputs(g, opt);
  const Rational factor = in.s / (2 * (1 + in.s) * in.k);
  InequalityReport r{"poincare-to-cheeger", {}, {}, true};
  r.inputs = {{"n", std::to_string(g.size())}, {"K", std::to_string(in.k)}, {"s", to_string(in.s)},
              {"c", to_string(in.c)}, {"lambda", format_double(in.lambda)}};
  r.add(compare_float("s lambda/(2(1+s)K) <= c", to_double(factor) * in.lambda, to_double(in.c), std::nullopt, in.c,
                      opt.tolerance));
  return r;
}

/// Exact level-set decomposition of sum |f(u)^2 - f(v)^2| a(u,v).
inline InequalityReport verify_coarea(const ReversibleWalk& w, std::span<const Rational> f) {
  const auto res = coarea_check(w, f);
  InequalityReport r{"coarea", {}, {}, true};
  r.inputs = {{"n", std::to_string(w.size())}, {"B_f", to_string(res.direct)}, {"level_sum", to_string(res.level_sum)}};
  r.add(compare_exact("B_f <= level sum", res.direct, res.level_sum));
  r.add(compare_exact("level sum <= B_f", res.level_sum, res.direct));
  return r;
}

/// cp_formula(c, p) <= energy ratio at each supplied function, with c the
/// (mu,a,mu)-Cheeger constant.
inline InequalityReport verify_lp_poincare(const ReversibleWalk& w, std::span<const PointMap> functions, double p,
                                           const TheoremOptions& opt = {}) {
  if (!w.graph().connected()) throw PreconditionError("graph must be connected");
  const Rational c = cheeger_conductance(w, opt.enumeration).value;
  const double cp = cp_formula(to_double(c), p);
  InequalityReport r{"lp-poincare", {}, {}, true};
  r.inputs = {{"n", std::to_string(w.size())}, {"c", to_string(c)}, {"p", format_double(p)}, {"c_p", format_double(cp)},
              {"functions", std::to_string(functions.size())}};
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& f : functions) worst = std::min(worst, lp_energy_ratio(w, f, p));
  if (!functions.empty()) r.add(compare_float("c_p <= min energy ratio", cp, worst, std::nullopt, std::nullopt, opt.tolerance));
  return r;
}

/// cp_formula(c, p) <= numerically optimised energy ratio (an upper bound on
/// the optimal constant, so this is a necessary condition).
inline InequalityReport verify_lp_poincare_optimised(const ReversibleWalk& w, double p, const PoincareOptions& popt,
                                                     const TheoremOptions& opt = {}) {
  if (!w.graph().connected()) throw PreconditionError("graph must be connected");
  const Rational c = cheeger_conductance(w, opt.enumeration).value;
  const double cp = cp_formula(to_double(c), p);
  const auto est = optimal_lp_constant(w, p, popt);
  InequalityReport r{"lp-poincare", {}, {}, true};
  r.inputs = {{"n", std::to_string(w.size())},     {"c", to_string(c)},
              {"p", format_double(p)},             {"c_p", format_double(cp)},
              {"estimate", format_double(est.estimate)}, {"restarts", std::to_string(est.restarts)},
              {"seed", std::to_string(popt.seed)}};
  r.add(compare_float("c_p <= optimised energy ratio", cp, est.estimate, std::nullopt, std::nullopt, opt.tolerance));
  return r;
}

}  // namespace mexp
