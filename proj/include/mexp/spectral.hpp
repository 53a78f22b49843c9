#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "mexp/random_walk.hpp"

namespace mexp {

class EigenSolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense row-major square matrix.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t n) : n_(n), a_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

  std::vector<double> apply(std::span<const double> x) const {
    std::vector<double> y(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
      double s = 0;
      for (std::size_t j = 0; j < n_; ++j) s += a_[i * n_ + j] * x[j];
      y[i] = s;
    }
    return y;
  }

  double frobenius() const {
    double s = 0;
    for (double x : a_) s += x * x;
    return std::sqrt(s);
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> a_;
};

enum class OperatorKind { delta, lambda };

inline const char* operator_name(OperatorKind k) { return k == OperatorKind::delta ? "delta" : "lambda"; }

/// The pencil (L, D): L is the conductance Laplacian of a quadratic form,
/// D a positive diagonal mass. Eigenpairs solve L f = lambda D f.
struct SelfAdjointOperator {
  OperatorKind kind = OperatorKind::delta;
  Matrix stiffness;
  std::vector<double> mass;
  /// Connected components of the underlying graph, for reporting.
  std::size_t components = 1;

  std::size_t size() const { return mass.size(); }
};

struct SpectralResult {
  std::vector<double> eigenvalues;  // ascending
  /// eigenvectors[k] pairs with eigenvalues[k], in the original coordinates,
  /// normalised to unit mass norm.
  std::vector<std::vector<double>> eigenvectors;
  std::optional<double> gap;
  std::size_t zero_multiplicity = 0;
  int sweeps = 0;
};

namespace detail {

inline SelfAdjointOperator laplacian_pencil(const MeasuredGraph& g, std::span<const Rational> a,
                                            std::vector<double> mass, OperatorKind kind) {
  SelfAdjointOperator op;
  op.kind = kind;
  op.stiffness = Matrix(g.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto e = g.edges()[i];
    const double w = to_double(a[i]);
    op.stiffness(e.u, e.v) = -w;
    op.stiffness(e.v, e.u) = -w;
  }
  // Diagonal from the stored off-diagonals so constants are annihilated to
  // rounding.
  for (std::size_t u = 0; u < g.size(); ++u) {
    double s = 0;
    for (std::size_t v = 0; v < g.size(); ++v) {
      if (v != u) s -= op.stiffness(u, v);
    }
    op.stiffness(u, u) = s;
  }
  op.mass = std::move(mass);
  op.components = g.component_count();
  return op;
}

}  // namespace detail

/// Random-walk Laplacian on l2(V; mu): stiffness L_a, mass mu.
inline SelfAdjointOperator delta_operator(const ReversibleWalk& w) {
  std::vector<double> mass;
  for (const auto& x : w.stationary()) mass.push_back(to_double(x));
  return detail::laplacian_pencil(w.graph(), w.conductance(), std::move(mass), OperatorKind::delta);
}

/// Lambda on l2(V; m): stiffness of a(u,v) = m(u)+m(v), mass m.
inline SelfAdjointOperator lambda_operator(const MeasuredGraph& g) {
  if (!g.full_support()) throw PreconditionError("lambda operator requires a measure with full support");
  if (!g.connected()) throw PreconditionError("lambda operator requires a connected graph");
  std::vector<Rational> a;
  for (const auto& e : g.edges()) a.push_back(g.measure(e.u) + g.measure(e.v));
  std::vector<double> mass;
  for (const auto& x : g.measure()) mass.push_back(to_double(x));
  return detail::laplacian_pencil(g, a, std::move(mass), OperatorKind::lambda);
}

struct JacobiOptions {
  double off_threshold = 1e-12;
  int max_sweeps = 100;
};

/// Cyclic Jacobi diagonalisation of a symmetric matrix. Returns eigenvalues
/// (unsorted) and the orthogonal matrix of eigenvectors as columns.
inline std::pair<std::vector<double>, Matrix> jacobi_eigen(Matrix m, const JacobiOptions& opt, int& sweeps_used) {
  const std::size_t n = m.size();
  Matrix v(n);
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;
  const double scale = std::max(1.0, m.frobenius());
  auto off = [&] {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) s += 2 * m(i, j) * m(i, j);
    }
    return std::sqrt(s);
  };
  sweeps_used = 0;
  while (off() > opt.off_threshold * scale) {
    if (sweeps_used == opt.max_sweeps) {
      throw EigenSolverError("Jacobi did not converge after " + std::to_string(opt.max_sweeps) +
                             " sweeps; off-diagonal norm " + std::to_string(off()));
    }
    ++sweeps_used;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = m(p, q);
        if (apq == 0.0) continue;
        const double theta = (m(q, q) - m(p, p)) / (2 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1 / std::sqrt(t * t + 1);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double mkp = m(k, p), mkq = m(k, q);
          m(k, p) = c * mkp - s * mkq;
          m(k, q) = s * mkp + c * mkq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double mpk = m(p, k), mqk = m(q, k);
          m(p, k) = c * mpk - s * mqk;
          m(q, k) = s * mpk + c * mqk;
        }
        m(p, q) = m(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = m(i, i);
  return {values, v};
}

struct SpectrumOptions {
  double zero_tolerance = 1e-9;
  JacobiOptions jacobi;
};

/// All eigenvalues of the pencil via D^{-1/2} L D^{-1/2}.
inline SpectralResult spectrum(const SelfAdjointOperator& op, const SpectrumOptions& opt = {}) {
  const std::size_t n = op.size();
  std::vector<double> inv_sqrt(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(op.mass[i] > 0)) throw PreconditionError("mass must be strictly positive");
    inv_sqrt[i] = 1 / std::sqrt(op.mass[i]);
  }
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m(i, j) = op.stiffness(i, j) * inv_sqrt[i] * inv_sqrt[j];
  }
  // Exact symmetry before rotating.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) m(j, i) = m(i, j);
  }
  SpectralResult out;
  auto [values, vecs] = jacobi_eigen(std::move(m), opt.jacobi, out.sweeps);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  for (std::size_t k : order) {
    out.eigenvalues.push_back(values[k]);
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = vecs(i, k) * inv_sqrt[i];
    out.eigenvectors.push_back(std::move(f));
  }
  for (double x : out.eigenvalues) {
    if (x < opt.zero_tolerance) {
      ++out.zero_multiplicity;
    } else if (!out.gap) {
      out.gap = x;
    }
  }
  return out;
}

inline double quadratic_form(const SelfAdjointOperator& op, std::span<const double> f) {
  const auto lf = op.stiffness.apply(f);
  return std::inner_product(f.begin(), f.end(), lf.begin(), 0.0);
}

inline double mass_norm_squared(const SelfAdjointOperator& op, std::span<const double> f) {
  double s = 0;
  for (std::size_t i = 0; i < f.size(); ++i) s += op.mass[i] * f[i] * f[i];
  return s;
}

/// f^T L f / f^T D f.
inline double rayleigh(const SelfAdjointOperator& op, std::span<const double> f) {
  if (f.size() != op.size()) throw PreconditionError("vector has wrong length");
  const double den = mass_norm_squared(op, f);
  if (!(den > 0)) throw PreconditionError("rayleigh quotient of a zero vector");
  return quadratic_form(op, f) / den;
}

/// ||L f - lambda D f||.
inline double eigen_residual(const SelfAdjointOperator& op, double lambda, std::span<const double> f) {
  const auto lf = op.stiffness.apply(f);
  double s = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double r = lf[i] - lambda * op.mass[i] * f[i];
    s += r * r;
  }
  return std::sqrt(s);
}

inline std::optional<double> spectral_gap(const SelfAdjointOperator& op, const SpectrumOptions& opt = {}) {
  return spectrum(op, opt).gap;
}

struct CoareaResult {
  Rational direct;      // sum over edges of |f(u)^2 - f(v)^2| a(u,v)
  Rational level_sum;   // sum over levels of a(∂L_i) (b_i^2 - b_{i-1}^2)
  bool equal = false;
};

/// Both sides of the level-set decomposition of the squared-difference
/// energy, with L_i = {f >= b_i} over the distinct positive values b_i of f
/// and b_0 = 0.
inline CoareaResult coarea_check(const ReversibleWalk& w, std::span<const Rational> f) {
  const auto& g = w.graph();
  if (f.size() != g.size()) throw PreconditionError("function has wrong length");
  for (const auto& x : f) {
    if (x < 0) throw PreconditionError("co-area decomposition needs a nonnegative function");
  }
  CoareaResult out;
  for (std::size_t i = 0; i < g.edges().size(); ++i) {
    const auto e = g.edges()[i];
    Rational d = f[e.u] * f[e.u] - f[e.v] * f[e.v];
    if (d < 0) d = -d;
    out.direct += d * w.conductance()[i];
  }
  std::vector<Rational> levels;
  for (const auto& x : f) {
    if (x > 0) levels.push_back(x);
  }
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  Rational prev = 0;
  for (const auto& b : levels) {
    Rational cut = 0;
    for (std::size_t i = 0; i < g.edges().size(); ++i) {
      const auto e = g.edges()[i];
      if ((f[e.u] >= b) != (f[e.v] >= b)) cut += w.conductance()[i];
    }
    out.level_sum += cut * (b * b - prev * prev);
    prev = b;
  }
  out.equal = out.direct == out.level_sum;
  return out;
}

}  // namespace mexp
