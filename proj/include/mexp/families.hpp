#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mexp/cheeger_bnb.hpp"
#include "mexp/poincare.hpp"
#include "mexp/random.hpp"
#include "mexp/spectral.hpp"

namespace mexp {

// ---------------------------------------------------------------- generators

enum class GraphKind { cycle, path, complete, hypercube, star, random_regular, random_connected, random_graph };

struct GraphSpec {
  GraphKind kind = GraphKind::cycle;
  int n = 0;            // vertices (hypercube: dimension)
  int k = 0;            // degree for random_regular
  double density = 0;   // extra-edge probability for random_connected / random_graph
  std::uint64_t seed = 0;
};

enum class MeasureKind { counting, probability, rationals, heat_kernel, explicit_values };

struct MeasureSpec {
  MeasureKind kind = MeasureKind::counting;
  std::uint64_t seed = 0;
  int max_term = 12;       // rationals: numerator and denominator drawn from 1..max_term
  Vertex start = 0;        // heat_kernel
  int steps = 0;           // heat_kernel
  std::vector<Rational> values = {};
};

namespace detail {

inline std::vector<std::string> index_labels(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(std::to_string(i));
  return out;
}

inline MeasuredGraph counting_graph(std::size_t n, std::vector<Edge> edges) {
  for (auto& e : edges) {
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  return MeasuredGraph::build(n, std::move(edges), std::vector<Rational>(n, Rational(1)), index_labels(n));
}

inline std::vector<Edge> configuration_model(int n, int k, Rng& rng) {
  std::vector<int> stubs;
  for (int v = 0; v < n; ++v) {
    for (int j = 0; j < k; ++j) stubs.push_back(v);
  }
  rng.shuffle(stubs.begin(), stubs.end());
  std::set<std::pair<int, int>> seen;
  std::vector<Edge> edges;
  for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
    const int u = std::min(stubs[i], stubs[i + 1]);
    const int v = std::max(stubs[i], stubs[i + 1]);
    if (u == v || !seen.insert({u, v}).second) return {};
    edges.push_back({u, v});
  }
  return edges;
}

}  // namespace detail

inline Rational random_positive_rational(Rng& rng, int max_term = 12) {
  return Rational(rng.uniform_int(1, max_term), rng.uniform_int(1, max_term));
}

/// Uniform-attachment random spanning tree plus each remaining pair with
/// probability `density`.
inline std::vector<Edge> random_connected_edges(int n, double density, Rng& rng) {
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order.begin(), order.end());
  std::set<std::pair<int, int>> edges;
  for (int i = 1; i < n; ++i) {
    const int j = static_cast<int>(rng.uniform_int(0, i - 1));
    const int u = order[static_cast<std::size_t>(i)], v = order[static_cast<std::size_t>(j)];
    edges.insert({std::min(u, v), std::max(u, v)});
  }
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      if (!edges.count({u, v}) && rng.bernoulli(density)) edges.insert({u, v});
    }
  }
  std::vector<Edge> out;
  for (const auto& [u, v] : edges) out.push_back({u, v});
  return out;
}

/// The named graph with counting measure.
inline MeasuredGraph generate_graph(const GraphSpec& spec) {
  const int n = spec.n;
  std::vector<Edge> edges;
  switch (spec.kind) {
    case GraphKind::cycle:
      if (n < 3) throw PreconditionError("cycle needs n >= 3");
      for (int i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n});
      return detail::counting_graph(static_cast<std::size_t>(n), edges);
    case GraphKind::path:
      if (n < 1) throw PreconditionError("path needs n >= 1");
      for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
      return detail::counting_graph(static_cast<std::size_t>(n), edges);
    case GraphKind::complete:
      if (n < 1) throw PreconditionError("complete graph needs n >= 1");
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) edges.push_back({i, j});
      }
      return detail::counting_graph(static_cast<std::size_t>(n), edges);
    case GraphKind::star:
      if (n < 1) throw PreconditionError("star needs at least one leaf");
      for (int i = 1; i <= n; ++i) edges.push_back({0, i});
      return detail::counting_graph(static_cast<std::size_t>(n + 1), edges);
    case GraphKind::hypercube: {
      if (n < 0 || n > 16) throw PreconditionError("hypercube dimension must lie in 0..16");
      const int size = 1 << n;
      for (int v = 0; v < size; ++v) {
        for (int b = 0; b < n; ++b) {
          const int w = v ^ (1 << b);
          if (v < w) edges.push_back({v, w});
        }
      }
      return detail::counting_graph(static_cast<std::size_t>(size), edges);
    }
    case GraphKind::random_regular: {
      if (n < 1 || spec.k < 1 || spec.k >= n) throw PreconditionError("random_regular needs 1 <= k < n");
      if ((n * spec.k) % 2 != 0) throw PreconditionError("random_regular needs n*k even");
      Rng rng(spec.seed);
      for (int attempt = 0; attempt < 100000; ++attempt) {
        auto es = detail::configuration_model(n, spec.k, rng);
        if (es.empty()) continue;
        auto g = detail::counting_graph(static_cast<std::size_t>(n), es);
        if (g.connected()) return g;
      }
      throw PreconditionError("random_regular: rejection cap exceeded");
    }
    case GraphKind::random_connected: {
      if (n < 1) throw PreconditionError("random_connected needs n >= 1");
      Rng rng(spec.seed);
      return detail::counting_graph(static_cast<std::size_t>(n), random_connected_edges(n, spec.density, rng));
    }
    case GraphKind::random_graph: {
      if (n < 1) throw PreconditionError("random_graph needs n >= 1");
      Rng rng(spec.seed);
      for (int u = 0; u < n; ++u) {
        for (int v = u + 1; v < n; ++v) {
          if (rng.bernoulli(spec.density)) edges.push_back({u, v});
        }
      }
      return detail::counting_graph(static_cast<std::size_t>(n), edges);
    }
  }
  throw PreconditionError("unknown graph kind");
}

inline std::vector<Rational> make_measure(const MeasuredGraph& g, const MeasureSpec& spec) {
  const std::size_t n = g.size();
  switch (spec.kind) {
    case MeasureKind::counting:
      return std::vector<Rational>(n, Rational(1));
    case MeasureKind::probability:
      return std::vector<Rational>(n, Rational(1, static_cast<long>(n)));
    case MeasureKind::rationals: {
      Rng rng(spec.seed);
      std::vector<Rational> m;
      for (std::size_t v = 0; v < n; ++v) m.push_back(random_positive_rational(rng, spec.max_term));
      return m;
    }
    case MeasureKind::heat_kernel:
      return heat_kernel_measure(g, spec.start, spec.steps);
    case MeasureKind::explicit_values:
      if (spec.values.size() != n) throw PreconditionError("explicit measure has wrong length");
      return spec.values;
  }
  throw PreconditionError("unknown measure kind");
}

inline MeasuredGraph generate(const GraphSpec& graph, const MeasureSpec& measure) {
  const auto g = generate_graph(graph);
  return g.with_measure(make_measure(g, measure));
}

/// Positive rational conductance on every edge.
inline std::vector<Rational> random_conductance(const MeasuredGraph& g, Rng& rng, int max_term = 12) {
  std::vector<Rational> a;
  for (std::size_t i = 0; i < g.edges().size(); ++i) a.push_back(random_positive_rational(rng, max_term));
  return a;
}

// ------------------------------------------------------------- constructions

/// G x {0..n} (path factor), measure m(v,i) = 2^{-i} mu(v). Vertex (v,i) has
/// index i*|V| + v and label "<label>:<i>".
inline MeasuredGraph product_segment(const MeasuredGraph& g, int levels) {
  if (levels < 0) throw PreconditionError("segment length must be nonnegative");
  if (g.total_measure() != 1) throw PreconditionError("product segment needs a probability measure");
  const std::size_t n = g.size();
  const std::size_t total = n * static_cast<std::size_t>(levels + 1);
  std::vector<Edge> edges;
  std::vector<Rational> m;
  std::vector<std::string> labels;
  Rational scale = 1;
  for (int i = 0; i <= levels; ++i) {
    const auto base = static_cast<Vertex>(static_cast<std::size_t>(i) * n);
    for (const auto& e : g.edges()) edges.push_back({base + e.u, base + e.v});
    if (i < levels) {
      for (std::size_t v = 0; v < n; ++v) {
        edges.push_back({base + static_cast<Vertex>(v), base + static_cast<Vertex>(n + v)});
      }
    }
    for (std::size_t v = 0; v < n; ++v) {
      m.push_back(scale * g.measure(static_cast<Vertex>(v)));
      labels.push_back(levels == 0 ? g.label(static_cast<Vertex>(v))
                                   : g.label(static_cast<Vertex>(v)) + ":" + std::to_string(i));
    }
    scale /= 2;
  }
  return MeasuredGraph::build(total, std::move(edges), std::move(m), std::move(labels));
}

/// Full-support probability measure: (1 - mu(A)/n) mu on supp(mu), and
/// mass mu(A)/n spread uniformly off the support.
inline std::vector<Rational> full_support_perturbation(const MeasuredGraph& g, const VertexSubset& a, int n) {
  if (n < 1) throw PreconditionError("perturbation index must be positive");
  if (g.total_measure() != 1) throw PreconditionError("perturbation needs a probability measure");
  if (g.full_support()) throw PreconditionError("measure already has full support");
  if (a.universe() != g.size()) throw PreconditionError("subset has wrong universe");
  for (Vertex v : a.members()) {
    if (g.measure(v) == 0) throw PreconditionError("A must lie inside the support");
  }
  const Rational ma = measure_of(g, a);
  if (ma <= 0 || ma > Rational(1, 2)) throw PreconditionError("A must satisfy 0 < mu(A) <= 1/2");
  long outside = 0;
  for (const auto& x : g.measure()) {
    if (x == 0) ++outside;
  }
  const Rational keep = 1 - ma / n;
  const Rational spread = ma / n / outside;
  std::vector<Rational> out;
  for (const auto& x : g.measure()) out.push_back(x > 0 ? Rational(keep * x) : spread);
  return out;
}

struct PerturbationBound {
  Rational perturbed_ratio;  // mu'(∂A)/mu'(A)
  Rational bound;            // 2 mu(∂A)/mu(A) + 1/(n - mu(A))
  bool holds = false;
};

inline PerturbationBound perturbation_bound(const MeasuredGraph& g, const VertexSubset& a, int n) {
  const auto perturbed = g.with_measure(full_support_perturbation(g, a, n));
  PerturbationBound out;
  out.perturbed_ratio = vertex_ratio(perturbed, a);
  out.bound = 2 * vertex_ratio(g, a) + 1 / (n - measure_of(g, a));
  out.holds = out.perturbed_ratio <= out.bound;
  return out;
}

// ----------------------------------------------------------------- families

struct GraphFamily {
  std::vector<MeasuredGraph> members;
  std::string provenance;
};

struct FamilyRow {
  std::size_t index = 0;
  std::size_t vertices = 0;
  std::optional<Rational> cheeger;
  std::optional<VertexSubset> witness;
  std::optional<double> gap;  // Lambda gap, when connected with full support
  int valency = 0;
  std::optional<Rational> ratio;
  Rational ghostliness;
  bool connected = false;
  bool full_support = false;
  std::string note;
};

enum class Trend { consistent, inconsistent, undetermined };

inline const char* trend_name(Trend t) {
  switch (t) {
    case Trend::consistent: return "consistent";
    case Trend::inconsistent: return "inconsistent";
    case Trend::undetermined: return "undetermined";
  }
  return "undetermined";
}

struct FamilyReport {
  std::vector<FamilyRow> rows;
  int valency_bound = 0;
  std::optional<Rational> ratio_bound;  // inf s_n; absent if some s_n is undefined
  Trend ghostly = Trend::undetermined;
  std::optional<Rational> min_cheeger;
  Rational threshold;
  /// min c_n >= threshold; absent when some member could not be computed.
  std::optional<bool> expander;
  bool partial = false;
};

/// Finite-prefix reading of gamma_n -> 0: the second half of the sequence is
/// nonincreasing and the last value is below the first.
inline Trend ghostly_trend(std::span<const Rational> gammas) {
  if (gammas.size() < 2) return Trend::undetermined;
  for (std::size_t i = gammas.size() / 2; i + 1 < gammas.size(); ++i) {
    if (gammas[i + 1] > gammas[i]) return Trend::inconsistent;
  }
  return gammas.back() < gammas.front() ? Trend::consistent : Trend::inconsistent;
}

struct FamilyOptions {
  EnumerationOptions enumeration;
  /// Use branch and bound for members above the enumeration cap.
  bool exact_beyond_cap = false;
  BranchAndBoundOptions branch_and_bound;
};

inline FamilyReport family_report(const GraphFamily& family, const Rational& threshold, const FamilyOptions& opt = {}) {
  if (family.members.empty()) throw PreconditionError("family must be nonempty");
  if (threshold <= 0) throw PreconditionError("threshold must be positive");
  FamilyReport rep;
  rep.threshold = threshold;
  bool ratio_defined = true;
  std::vector<Rational> gammas;
  for (std::size_t i = 0; i < family.members.size(); ++i) {
    const auto& g = family.members[i];
    const auto st = stats(g);
    FamilyRow row;
    row.index = i;
    row.vertices = g.size();
    row.valency = st.max_valency;
    row.ratio = st.measure_ratio;
    row.ghostliness = st.ghostliness;
    row.connected = st.connected;
    row.full_support = st.full_support;
    try {
      const auto cert = opt.exact_beyond_cap ? cheeger_vertex_exact(g, opt.enumeration, opt.branch_and_bound)
                                             : cheeger_vertex(g, opt.enumeration);
      row.cheeger = cert.value;
      row.witness = cert.witness;
    } catch (const CapExceeded& e) {
      row.note = e.what();
      rep.partial = true;
    } catch (const NoFeasibleSubset& e) {
      row.note = e.what();
      rep.partial = true;
    }
    if (st.connected && st.full_support && g.size() > 1) row.gap = spectral_gap(lambda_operator(g));
    rep.valency_bound = std::max(rep.valency_bound, row.valency);
    if (!row.ratio) {
      ratio_defined = false;
    } else if (!rep.ratio_bound || *row.ratio < *rep.ratio_bound) {
      rep.ratio_bound = row.ratio;
    }
    if (row.cheeger && (!rep.min_cheeger || *row.cheeger < *rep.min_cheeger)) rep.min_cheeger = row.cheeger;
    gammas.push_back(row.ghostliness);
    rep.rows.push_back(std::move(row));
  }
  if (!ratio_defined) rep.ratio_bound.reset();
  rep.ghostly = ghostly_trend(gammas);
  if (!rep.partial) rep.expander = *rep.min_cheeger >= threshold;
  return rep;
}

// ------------------------------------------------- generalised certificate

/// Nondecreasing control function given at integer distances 0..L and
/// extended by its last value.
class RhoFunction {
 public:
  RhoFunction() = default;
  explicit RhoFunction(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw InputError("rho table must be nonempty");
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!(values_[i] >= 0) || !std::isfinite(values_[i])) throw InputError("rho values must be finite and nonnegative");
      if (i > 0 && values_[i] < values_[i - 1]) throw InputError("rho table must be nondecreasing");
    }
  }
  /// rho(d) = slope * d for d = 0..max_distance.
  static RhoFunction linear(double slope, int max_distance) {
    std::vector<double> v;
    for (int d = 0; d <= max_distance; ++d) v.push_back(slope * d);
    return RhoFunction(std::move(v));
  }

  double operator()(int d) const {
    if (d < 0) throw PreconditionError("negative distance");
    return static_cast<std::size_t>(d) < values_.size() ? values_[static_cast<std::size_t>(d)] : values_.back();
  }
  std::span<const double> values() const { return values_; }

 private:
  std::vector<double> values_;
};

struct PairMass {
  Vertex x = 0;
  Vertex y = 0;
  Rational mass;
};

struct RejectedMap {
  std::size_t map_index = 0;
  Vertex x = 0;
  Vertex y = 0;
  int distance = 0;
  double norm = 0;
  double bound = 0;
};

struct CertificateMember {
  std::size_t index = 0;
  std::size_t vertices = 0;
  Rational gamma;
  double cutoff = 0;  // r_n
  bool skipped = false;
  std::string note;
  Rational cheeger;
  bool cheeger_exact = false;
  std::vector<PairMass> pair_measure;  // nu_n, ordered pairs with positive mass
  Rational off_diagonal_mass;         // mu_n((X x X) minus Delta_n)
  bool symmetric = false;
  bool probability = false;
  bool support_off_diagonal = false;
  bool mass_at_least_eighth = false;
  std::size_t accepted_maps = 0;
  std::vector<RejectedMap> rejected;
  double max_energy = 0;         // max over accepted maps of sum ||df||^p nu
  double max_pair_energy = 0;    // max over accepted maps of sum ||df||^p m m
  bool energy_bound = true;      // every accepted map has energy <= 8 kappa
  bool pair_energy_bound = true; // and pair energy <= kappa
};

struct GeneralisedCertificate {
  double p = 1;
  int valency = 0;
  Rational ratio;
  Rational cheeger;        // lower bound on inf c_n used for kappa
  double poincare_constant = 0;
  double kappa = 0;
  std::vector<CertificateMember> members;
  bool holds = true;
};

struct CertificateOptions {
  EnumerationOptions enumeration;
  std::uint64_t seed = 0;
  int landmark_maps = 4;
  int landmarks_per_map = 3;
  int greedy_maps = 8;
  double lipschitz_slack = 1e-12;
};

/// Test maps that respect ||f(x)-f(y)||_p <= rho(d(x,y)) by construction:
/// scaled landmark-distance embeddings and greedy random extensions.
inline std::vector<PointMap> default_test_maps(const MeasuredGraph& g, const std::vector<std::vector<int>>& dist,
                                               const RhoFunction& rho, double p, const CertificateOptions& opt,
                                               std::uint64_t seed) {
  const std::size_t n = g.size();
  int diam = 0;
  for (const auto& row : dist) {
    for (int d : row) diam = std::max(diam, d);
  }
  double slope = std::numeric_limits<double>::infinity();
  for (int d = 1; d <= std::max(1, diam); ++d) slope = std::min(slope, rho(d) / d);
  Rng rng(seed);
  std::vector<PointMap> maps;
  for (int k = 0; k < opt.landmark_maps; ++k) {
    const int count = std::max(1, opt.landmarks_per_map);
    const double scale = slope / std::pow(static_cast<double>(count), 1.0 / p);
    std::vector<Vertex> marks;
    for (int j = 0; j < count; ++j) marks.push_back(static_cast<Vertex>(rng.uniform_int(0, static_cast<std::int64_t>(n) - 1)));
    PointMap f(n);
    for (std::size_t x = 0; x < n; ++x) {
      for (Vertex l : marks) f[x].push_back(scale * dist[x][static_cast<std::size_t>(l)]);
    }
    maps.push_back(std::move(f));
  }
  for (int k = 0; k < opt.greedy_maps; ++k) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order.begin(), order.end());
    std::vector<double> value(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
      const std::size_t x = order[i];
      double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < i; ++j) {
        const std::size_t y = order[j];
        const double r = rho(dist[x][y]);
        lo = std::max(lo, value[y] - r);
        hi = std::min(hi, value[y] + r);
      }
      value[x] = lo <= hi ? lo + rng.uniform() * (hi - lo) : (lo + hi) / 2;
    }
    maps.push_back(as_point_map(value));
  }
  return maps;
}

/// Builds the pair measures nu_n and checks the energy bound for every test
/// map. `test_maps[i]`, when nonempty, replaces the default maps of member i.
inline GeneralisedCertificate generalised_certificate(const GraphFamily& family, double p, const RhoFunction& rho,
                                                      const std::vector<std::vector<PointMap>>& test_maps = {},
                                                      const CertificateOptions& opt = {}) {
  if (family.members.empty()) throw PreconditionError("family must be nonempty");
  if (p < 1) throw PreconditionError("p must be at least 1");
  GeneralisedCertificate cert;
  cert.p = p;

  // Family constants: valency bound, measure ratio and a Cheeger lower bound.
  std::optional<Rational> s_min;
  std::vector<Rational> member_cheeger;
  std::vector<bool> member_exact;
  for (const auto& g : family.members) {
    if (!g.connected()) throw PreconditionError("certificate members must be connected");
    if (!g.full_support()) throw PreconditionError("certificate members must have full support");
    const auto st = stats(g);
    cert.valency = std::max(cert.valency, st.max_valency);
    if (!s_min || *st.measure_ratio < *s_min) s_min = st.measure_ratio;
    try {
      member_cheeger.push_back(cheeger_vertex(g, opt.enumeration).value);
      member_exact.push_back(true);
    } catch (const CapExceeded&) {
      // c >= s lambda / (2(1+s)K) from the gap of Lambda.
      const Rational s = *st.measure_ratio;
      const double lambda = spectral_gap(lambda_operator(g)).value_or(0.0);
      const double bound = to_double(s / (2 * (1 + s) * st.max_valency)) * lambda;
      // Round down to a rational so the bound stays below the true value.
      member_cheeger.push_back(Rational(static_cast<long long>(std::floor(bound * 1e12)), 1000000000000LL));
      member_exact.push_back(false);
    }
  }
  if (cert.valency < 2) throw PreconditionError("certificate needs valency bound K >= 2");
  cert.ratio = *s_min;
  cert.cheeger = *std::min_element(member_cheeger.begin(), member_cheeger.end());
  if (cert.cheeger <= 0) throw PreconditionError("family Cheeger lower bound is not positive");
  const double s = to_double(cert.ratio);
  cert.poincare_constant = measured_cp(to_double(cert.cheeger), s, cert.valency, p);
  cert.kappa = kappa_from_poincare_constant(cert.valency, s, cert.poincare_constant, p, rho(1));
  const double bound = 8 * cert.kappa;

  for (std::size_t i = 0; i < family.members.size(); ++i) {
    const auto& g0 = family.members[i];
    std::vector<Rational> normalised;
    for (const auto& x : g0.measure()) normalised.push_back(x / g0.total_measure());
    const auto g = g0.with_measure(normalised);
    const std::size_t n = g.size();
    CertificateMember mem;
    mem.index = i;
    mem.vertices = n;
    mem.cheeger = member_cheeger[i];
    mem.cheeger_exact = member_exact[i];
    mem.gamma = *std::max_element(normalised.begin(), normalised.end());
    const Rational reach = 1 / (8 * mem.gamma);  // d <= r_n  iff  K^d <= reach
    mem.cutoff = std::log(to_double(reach)) / std::log(static_cast<double>(cert.valency));
    if (reach <= 1) {
      mem.skipped = true;
      mem.note = "r_n <= 0: member is not ghostly enough";
      cert.members.push_back(std::move(mem));
      continue;
    }
    const auto dist = all_pairs_distances(g);
    auto near = [&](int d) {
      Rational power = 1;
      for (int j = 0; j < d; ++j) {
        power *= cert.valency;
        if (power > reach) return false;
      }
      return true;
    };
    std::vector<std::vector<Rational>> nu(n, std::vector<Rational>(n, Rational(0)));
    for (std::size_t x = 0; x < n; ++x) {
      for (std::size_t y = 0; y < n; ++y) {
        if (!near(dist[x][y])) mem.off_diagonal_mass += normalised[x] * normalised[y];
      }
    }
    mem.mass_at_least_eighth = mem.off_diagonal_mass >= Rational(1, 8);
    Rational total = 0;
    for (std::size_t x = 0; x < n; ++x) {
      for (std::size_t y = 0; y < n; ++y) {
        if (!near(dist[x][y])) {
          nu[x][y] = normalised[x] * normalised[y] / mem.off_diagonal_mass;
          total += nu[x][y];
          mem.pair_measure.push_back({static_cast<Vertex>(x), static_cast<Vertex>(y), nu[x][y]});
        }
      }
    }
    mem.probability = total == 1;
    mem.symmetric = true;
    mem.support_off_diagonal = true;
    for (std::size_t x = 0; x < n; ++x) {
      for (std::size_t y = 0; y < n; ++y) {
        if (nu[x][y] != nu[y][x]) mem.symmetric = false;
        if (nu[x][y] != 0 && static_cast<double>(dist[x][y]) <= mem.cutoff * (1 - 1e-12)) {
          mem.support_off_diagonal = false;
        }
      }
    }

    const auto maps = (i < test_maps.size() && !test_maps[i].empty())
                          ? test_maps[i]
                          : default_test_maps(g, dist, rho, p, opt, derive_seed(opt.seed, i));
    std::vector<double> nu_d(n * n), mm(n * n);
    for (std::size_t x = 0; x < n; ++x) {
      for (std::size_t y = 0; y < n; ++y) {
        nu_d[x * n + y] = to_double(nu[x][y]);
        mm[x * n + y] = to_double(normalised[x] * normalised[y]);
      }
    }
    for (std::size_t k = 0; k < maps.size(); ++k) {
      const auto& f = maps[k];
      if (f.size() != n) throw PreconditionError("test map has wrong length");
      std::optional<RejectedMap> violation;
      for (std::size_t x = 0; x < n && !violation; ++x) {
        for (std::size_t y = x + 1; y < n; ++y) {
          const double norm = std::pow(lp_distance_pow(f[x], f[y], p), 1 / p);
          const double limit = rho(dist[x][y]);
          if (norm > limit * (1 + opt.lipschitz_slack)) {
            violation = RejectedMap{k, static_cast<Vertex>(x), static_cast<Vertex>(y), dist[x][y], norm, limit};
            break;
          }
        }
      }
      if (violation) {
        mem.rejected.push_back(*violation);
        continue;
      }
      ++mem.accepted_maps;
      double energy = 0, pair = 0;
      for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < n; ++y) {
          if (x == y) continue;
          const double d = lp_distance_pow(f[x], f[y], p);
          energy += d * nu_d[x * n + y];
          pair += d * mm[x * n + y];
        }
      }
      mem.max_energy = std::max(mem.max_energy, energy);
      mem.max_pair_energy = std::max(mem.max_pair_energy, pair);
      if (energy > bound) mem.energy_bound = false;
      if (pair > cert.kappa) mem.pair_energy_bound = false;
    }
    const bool ok = mem.symmetric && mem.probability && mem.support_off_diagonal && mem.mass_at_least_eighth &&
                    mem.energy_bound && mem.pair_energy_bound;
    cert.holds = cert.holds && ok;
    cert.members.push_back(std::move(mem));
  }
  return cert;
}

}  // namespace mexp
