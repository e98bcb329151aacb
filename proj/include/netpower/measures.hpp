#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "netpower/balancing.hpp"
#include "netpower/conjugate_gradient.hpp"
#include "netpower/error.hpp"
#include "netpower/graph.hpp"
#include "netpower/linear_operator.hpp"
#include "netpower/structure.hpp"

namespace netpower {

struct MeasureVector {
  std::string name;
  Vector values;
  std::vector<std::pair<std::string, double>> params;
  bool converged = true;
  std::size_t iterations = 0;
  std::uint64_t matvecs = 0;
  std::string note;
};

namespace detail {

inline double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

inline void scale_to_max_one(Vector& v) {
  double top = 0.0;
  for (double x : v) top = std::max(top, std::abs(x));
  if (top > 0.0) {
    for (double& x : v) x /= top;
  }
}

}  // namespace detail

// Power method x_{k+1} = A' x_k / ||A' x_k||_2 from x_0 = e, stopped on
// ||x_{k+1} - x_k||_inf <= tol. Output is scaled to max component 1.
//
// On bipartite graphs -r is also an eigenvalue and the iterates settle into a
// two-cycle. For an unperturbed bipartite graph that case is detected
// (||x_{k+1} - x_{k-1}|| <= tol) and reported unconverged; the values returned are then the mean of the two cycle states,
// which cancels the -r component and recovers the Perron vector.
inline MeasureVector eigenvector_centrality(LinearOperator& op, double tol = 1e-8,
                                            std::size_t max_iter = 100'000) {
  if (!(tol > 0.0)) throw Error(ErrorKind::invalid_argument, "tol must be positive");
  const auto start = op.matvecs();
  const std::size_t n = op.size();
  MeasureVector out;
  out.name = "centrality";
  out.params = {{"tol", tol}};
  if (op.perturbation() != Perturbation::none) out.params.emplace_back("alpha", op.alpha());

  Vector earlier(n, 0.0), x(n, 1.0 / std::sqrt(static_cast<double>(n))), next(n);
  out.converged = false;
  bool cycling = false;
  const bool may_cycle = op.perturbation() == Perturbation::none && is_bipartite(op.graph());
  std::size_t k = 0;
  while (k < max_iter) {
    op.apply(x, next);
    ++k;
    const double norm = detail::norm2(next);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      out.note = "graph has no edges";
      x.assign(n, 0.0);
      break;
    }
    for (double& v : next) v /= norm;
    if (detail::max_abs_diff(next, x) <= tol) {
      x = next;
      out.converged = true;
      break;
    }
    if (may_cycle && k > 1 && detail::max_abs_diff(next, earlier) <= tol) {
      for (std::size_t i = 0; i < n; ++i) x[i] = 0.5 * (x[i] + next[i]);
      cycling = true;
      break;
    }
    earlier = std::move(x);
    x = next;
  }
  if (cycling) out.note = "iterates oscillate (bipartite graph); returned the two-cycle mean";
  else if (!out.converged && out.note.empty()) out.note = "maximum iterations reached";
  detail::scale_to_max_one(x);
  out.values = std::move(x);
  out.iterations = k;
  out.matvecs = op.matvecs() - start;
  return out;
}

struct SpectralRadius {
  double value = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
};

// Power-iteration estimate of max |lambda_i|: ||A' x|| / ||x|| is the square
// root of the Rayleigh quotient of A'^2, which also converges when -r is an
// eigenvalue. Stops on a relative change below rel_tol.
inline SpectralRadius spectral_radius(LinearOperator& op, double rel_tol = 1e-10,
                                      std::size_t max_iter = 100'000) {
  const std::size_t n = op.size();
  SpectralRadius out;
  Vector x(n, 1.0 / std::sqrt(static_cast<double>(n))), y(n);
  double estimate = 0.0;
  while (out.iterations < max_iter) {
    op.apply(x, y);
    ++out.iterations;
    const double norm = detail::norm2(y);
    if (norm == 0.0) {
      out.value = 0.0;
      out.converged = true;
      return out;
    }
    if (std::abs(norm - estimate) <= rel_tol * norm) {
      out.value = norm;
      out.converged = true;
      return out;
    }
    estimate = norm;
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / norm;
  }
  out.value = estimate;
  return out;
}

// x = alpha (I - beta A)^-1 A e, solved by CG (I - beta A is positive
// definite for |beta| < 1/r). Negative beta gives the power variant.
inline MeasureVector bonacich(const Graph& g, double alpha, double beta, double tol = 1e-12) {
  LinearOperator op(g);
  const double r = spectral_radius(op).value;
  if (r > 0.0 && !(std::abs(beta) * r < 1.0)) {
    throw Error(ErrorKind::invalid_argument, "bonacich requires |beta| < 1/r (r = " +
                                                 std::to_string(r) + ")");
  }
  MeasureVector out;
  out.name = "bonacich";
  out.params = {{"alpha", alpha}, {"beta", beta}, {"spectral_radius", r}};
  const std::size_t n = g.size();
  Vector x = degrees(g);
  for (double& v : x) v *= alpha;
  if (beta == 0.0) {
    out.values = std::move(x);
    return out;
  }
  // Start from the beta = 0 solution alpha*d; its residual is alpha*beta*A*d.
  Vector r0 = op.apply(x);
  for (double& v : r0) v *= beta;
  auto apply = [&](std::span<const double> p, std::span<double> res) {
    op.apply(p, res);
    for (std::size_t i = 0; i < n; ++i) res[i] = p[i] - beta * res[i];
  };
  auto cg = conjugate_gradient(apply, std::move(x), std::move(r0), tol, 10 * n + 1000);
  if (cg.breakdown) throw Error(ErrorKind::solver_breakdown, "CG breakdown in bonacich solve");
  out.converged = cg.reached_tolerance;
  out.iterations = cg.iterations;
  out.values = std::move(cg.x);
  out.matvecs = op.matvecs();
  return out;
}

// Both sides of the Newton/Bonacich identity: the first Newton iterate from
// x_0 = e / gamma, and bonacich(2 gamma, -gamma^2).
inline std::pair<Vector, Vector> bonacich_newton_identity_check(const Graph& g, double gamma) {
  if (!(gamma > 0.0)) throw Error(ErrorKind::invalid_argument, "gamma must be positive");
  LinearOperator op(g);
  const double r = spectral_radius(op).value;
  if (!(gamma * gamma * r < 1.0)) {
    throw Error(ErrorKind::invalid_argument, "identity check requires gamma^2 < 1/r");
  }
  const Vector x0(g.size(), 1.0 / gamma);
  auto newton = newton_step(op, x0, 1e-14, 10 * g.size() + 1000);
  auto bona = bonacich(g, 2.0 * gamma, -gamma * gamma, 1e-14);
  return {std::move(newton), std::move(bona.values)};
}

// x_i = sum_j A(i,j) / d_j, evaluated as A (A e)^-1 with the reciprocals taken
// first, so the result is bitwise the second Sinkhorn-Knopp iterate.
// Isolated nodes get 0.
inline MeasureVector shapley_power(const Graph& g) {
  const Vector d = degrees(g);
  MeasureVector out;
  out.name = "shapley";
  Vector inv(d.size());
  for (std::size_t j = 0; j < d.size(); ++j) inv[j] = 1.0 / d[j];
  out.values.assign(g.size(), 0.0);
  for (Index i = 0; i < g.size(); ++i) {
    double acc = 0.0;
    for (const auto& nb : g.neighbors(i)) acc += nb.weight * inv[nb.index];
    out.values[i] = acc + 0.0;
  }
  if (std::find(d.begin(), d.end(), 0.0) != d.end()) out.note = "isolated nodes scored 0";
  return out;
}

inline MeasureVector degree_centrality(const Graph& g) {
  MeasureVector out;
  out.name = "degree";
  out.values = degrees(g);
  return out;
}

// How a negative surplus s = 1 - L(i,j) - L(j,i) is settled on an edge.
//  split:   R(i,j) = L(i,j) + s/2 for every sign of s, which keeps
//           R(i,j) + R(j,i) = 1 on every edge at every step.
//  literal: R(i,j) = 1 - L(j,i) when s < 0; the two revenues on that edge then
//           sum to 1 + s < 1.
enum class NashSurplusRule { split, literal };

// Revenue state of the bargaining dynamics, one entry per directed arc i -> j
// in the graph's row order.
struct NashState {
  std::vector<std::pair<Index, Index>> arcs;
  std::vector<std::size_t> mirror;  // position of j -> i
  Vector revenue;                   // R(i,j)
  Vector alternative;               // L(i,j)
  std::size_t t = 0;
};

struct NashResult {
  MeasureVector measure;
  NashState state;
};

// Synchronous network Nash bargaining dynamics on the unweighted simple graph:
//   L(i,j) = max_{k in N(i) \ j} R(i,k)   (0 with no alternative)
//   s(i,j) = 1 - L(i,j) - L(j,i)
//   R(i,j) = L(i,j) + s/2  (negative surplus per NashSurplusRule)
// from R = 1/2, until max |R_t - R_{t-1}| <= tol. x_i = max_j R(i,j).
inline NashResult nash_dynamics(const Graph& g, double tol = 1e-9, std::size_t max_iter = 100'000,
                                NashSurplusRule rule = NashSurplusRule::split,
                                const std::function<void(const NashState&)>& observer = {}) {
  if (g.has_loops()) throw Error(ErrorKind::invalid_argument, "nash power is undefined on loops");
  if (!(tol > 0.0)) throw Error(ErrorKind::invalid_argument, "tol must be positive");
  const Index n = g.size();
  NashResult result;
  auto& st = result.state;
  std::vector<std::size_t> row_start(n + 1, 0);
  for (Index i = 0; i < n; ++i) {
    row_start[i + 1] = row_start[i] + g.degree_count(i);
    for (const auto& nb : g.neighbors(i)) st.arcs.emplace_back(i, nb.index);
  }
  const std::size_t m = st.arcs.size();
  st.mirror.resize(m);
  for (std::size_t a = 0; a < m; ++a) {
    const auto [i, j] = st.arcs[a];
    const auto row = g.neighbors(j);
    const auto it = std::lower_bound(row.begin(), row.end(), i,
                                     [](const Neighbor& nb, Index c) { return nb.index < c; });
    st.mirror[a] = row_start[j] + static_cast<std::size_t>(it - row.begin());
  }
  st.revenue.assign(m, 0.5);
  st.alternative.assign(m, 0.0);

  Vector next(m);
  bool converged = false;
  while (st.t < max_iter) {
    for (Index i = 0; i < n; ++i) {
      double best = 0.0, second = 0.0;
      std::size_t best_arc = row_start[i + 1];
      for (std::size_t a = row_start[i]; a < row_start[i + 1]; ++a) {
        const double v = st.revenue[a];
        if (best_arc == row_start[i + 1] || v > best) {
          second = best;
          best = v;
          best_arc = a;
        } else if (v > second) {
          second = v;
        }
      }
      for (std::size_t a = row_start[i]; a < row_start[i + 1]; ++a) {
        st.alternative[a] = (a == best_arc) ? second : best;
      }
    }
    double change = 0.0;
    for (std::size_t a = 0; a < m; ++a) {
      const double mine = st.alternative[a];
      const double theirs = st.alternative[st.mirror[a]];
      const double surplus = 1.0 - mine - theirs;
      double r = 0.0;
      if (surplus >= 0.0 || rule == NashSurplusRule::split) {
        r = (1.0 + mine - theirs) / 2.0;  // L(i,j) + s/2, computed symmetrically
      } else {
        r = 1.0 - theirs;
      }
      next[a] = r;
      change = std::max(change, std::abs(r - st.revenue[a]));
    }
    std::swap(st.revenue, next);
    ++st.t;
    if (observer) observer(st);
    if (change <= tol) {
      converged = true;
      break;
    }
  }

  auto& mv = result.measure;
  mv.name = "nash";
  mv.params = {{"tol", tol}};
  mv.converged = converged;
  mv.iterations = st.t;
  mv.values.assign(n, 0.0);
  for (std::size_t a = 0; a < m; ++a) {
    mv.values[st.arcs[a].first] = std::max(mv.values[st.arcs[a].first], st.revenue[a]);
  }
  if (!converged) mv.note = "maximum iterations reached";
  else if (!g.is_unweighted()) mv.note = "edge weights ignored";
  return result;
}

inline MeasureVector nash_power(const Graph& g, double tol = 1e-9, std::size_t max_iter = 100'000,
                                NashSurplusRule rule = NashSurplusRule::split) {
  return nash_dynamics(g, tol, max_iter, rule).measure;
}

}  // namespace netpower
