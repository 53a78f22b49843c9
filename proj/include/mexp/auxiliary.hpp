#pragma once

#include "mexp/cheeger.hpp"
#include "mexp/random_walk.hpp"

namespace mexp {

/// Exact check of the four properties of the auxiliary walk of a measured
/// graph with full support.
struct AuxiliaryConditions {
  bool conductance_formula = false;  // a(u,v) = m(u) + m(v) on edges
  bool kernel_support = false;       // r(u,v) > 0 iff u ~ v
  bool stationary_bounds = false;    // s/(K(1+s)) mu <= m <= mu/(1+s)
  bool cheeger_bound = false;        // (mu,a,m)-Cheeger >= c s / K
  int valency = 0;
  Rational ratio;
  Rational vertex_cheeger;
  Rational walk_cheeger;
  Rational cheeger_floor;

  bool all() const { return conductance_formula && kernel_support && stationary_bounds && cheeger_bound; }
};

inline AuxiliaryConditions auxiliary_conditions(const MeasuredGraph& g, const ReversibleWalk& walk,
                                                const EnumerationOptions& opt = {}) {
  if (walk.graph().size() != g.size()) throw PreconditionError("walk lives on a different graph");
  const auto st = stats(g);
  if (!st.measure_ratio) throw PreconditionError("measure ratio undefined: some edge has a zero-measure endpoint");
  AuxiliaryConditions out;
  out.valency = st.max_valency;
  out.ratio = *st.measure_ratio;

  out.conductance_formula = walk.conductance().size() == g.edges().size();
  for (std::size_t i = 0; out.conductance_formula && i < g.edges().size(); ++i) {
    const auto e = g.edges()[i];
    if (walk.conductance()[i] != g.measure(e.u) + g.measure(e.v)) out.conductance_formula = false;
  }
  out.kernel_support = kernel_is_stochastic(walk);

  const Rational k = out.valency;
  const Rational& s = out.ratio;
  out.stationary_bounds = true;
  for (std::size_t v = 0; v < g.size(); ++v) {
    const auto& m = g.measure(static_cast<Vertex>(v));
    const auto& mu = walk.stationary(static_cast<Vertex>(v));
    if (s * mu > k * (1 + s) * m || (1 + s) * m > mu) out.stationary_bounds = false;
  }

  out.vertex_cheeger = cheeger_vertex(g, opt).value;
  out.walk_cheeger = cheeger_conductance(walk, g.measure(), opt).value;
  out.cheeger_floor = k > 0 ? Rational(out.vertex_cheeger * s / k) : Rational(0);
  out.cheeger_bound = out.walk_cheeger >= out.cheeger_floor;
  return out;
}

}  // namespace mexp
