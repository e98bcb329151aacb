#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "netpower/conjugate_gradient.hpp"
#include "netpower/error.hpp"
#include "netpower/graph.hpp"
#include "netpower/linear_operator.hpp"
#include "netpower/structure.hpp"

// Solvers for the power equation x = A' x^-1, where A' is the effective matrix
// of a LinearOperator. x solves it exactly when D = diag(x)^-1 balances A',
// i.e. D A' D is doubly stochastic.

namespace netpower {

enum class Method { sinkhorn_knopp, newton };

inline constexpr std::string_view to_string(Method m) noexcept {
  return m == Method::newton ? "newton" : "sk";
}

inline Method parse_method(std::string_view s) {
  if (s == "sk" || s == "sinkhorn_knopp") return Method::sinkhorn_knopp;
  if (s == "newton" || s == "nm") return Method::newton;
  throw Error(ErrorKind::invalid_argument, "unknown method '" + std::string(s) + "'");
}

// geometric_mean keeps the natural scale produced by the even/odd
// recombination (sqrt(2) on a triangle); first_component rescales the output
// so that x[0] == 1.
enum class Normalization { geometric_mean, first_component };

struct SolverConfig {
  Method method = Method::sinkhorn_knopp;
  double tol = 1e-8;
  std::optional<std::size_t> max_outer;  // 50'000 for SK, 200 for Newton
  // Newton forcing term on the CG residual: the inner solve stops at relative
  // reduction clamp(residual, inner_reduction, inner_reduction_max), loose far
  // from the solution and inner_reduction close to it. Equal bounds give a
  // fixed forcing term.
  double inner_reduction = 1e-2;
  double inner_reduction_max = 1e-1;
  std::size_t max_inner = 200;
  Normalization normalization = Normalization::geometric_mean;
  std::optional<Vector> initial;  // x_0; all ones when absent
  bool strict = false;            // compute_power refuses unsolvable inputs

  std::size_t outer_limit() const {
    if (max_outer) return *max_outer;
    return method == Method::newton ? 200 : 50'000;
  }

  void validate() const {
    if (!(tol > 0.0)) throw Error(ErrorKind::invalid_argument, "tol must be positive");
    if (max_outer && *max_outer < 1) {
      throw Error(ErrorKind::invalid_argument, "max_outer must be at least 1");
    }
    if (!(inner_reduction > 0.0 && inner_reduction <= inner_reduction_max && inner_reduction_max < 1.0)) {
      throw Error(ErrorKind::invalid_argument,
                  "inner reduction bounds must satisfy 0 < min <= max < 1");
    }
  }
};

struct BalanceResult {
  Vector power;
  double residual = 0.0;
  std::size_t outer_iterations = 0;
  std::uint64_t matvecs = 0;
  bool converged = false;
  Method method = Method::sinkhorn_knopp;
  std::string warning;
};

namespace detail {

inline Vector reciprocal(std::span<const double> x) {
  Vector r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = 1.0 / x[i];
  return r;
}

inline void require_finite_positive(std::span<const double> x, const char* what) {
  for (double v : x) {
    if (!std::isfinite(v) || !(v > 0.0)) {
      throw Error(ErrorKind::divergence, std::string(what) +
                                             ": iterate left the positive finite range "
                                             "(no balancing exists without perturbation?)");
    }
  }
}

// max_i |(A' x^-1)_i / x_i - 1| given y = A' x^-1.
inline double balance_residual_from(std::span<const double> x, std::span<const double> y) {
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(y[i] / x[i] - 1.0));
  return worst;
}

inline Vector initial_vector(const LinearOperator& op, const SolverConfig& cfg) {
  if (!cfg.initial) return Vector(op.size(), 1.0);
  if (cfg.initial->size() != op.size()) {
    throw Error(ErrorKind::length_mismatch, "initial vector length does not match graph");
  }
  for (double v : *cfg.initial) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorKind::invalid_argument, "initial vector must be strictly positive");
    }
  }
  return *cfg.initial;
}

inline void normalize(Vector& x, Normalization mode) {
  if (mode == Normalization::first_component && !x.empty()) {
    const double s = x[0];
    for (double& v : x) v /= s;
  }
}

// Newton inner system, symmetrized:
//   (I + D A' D) u = rhs,  D = diag(x)^-1,
// solved by CG from u = e. The Jacobian system J_f(x) y = b with
// J_f = I + A' D^2 maps onto it through y = diag(x) u and rhs = D b.
// initial_residual must be rhs - (I + D A' D) e; callers obtain it without an
// extra product.
inline CgResult solve_jacobian(LinearOperator& op, std::span<const double> xr,
                               Vector initial_residual, double reduction,
                               std::size_t max_iterations) {
  const std::size_t n = xr.size();
  Vector scaled(n);
  auto apply = [&](std::span<const double> p, std::span<double> out) {
    for (std::size_t i = 0; i < n; ++i) scaled[i] = xr[i] * p[i];
    op.apply(scaled, out);
    for (std::size_t i = 0; i < n; ++i) out[i] = p[i] + xr[i] * out[i];
  };
  return conjugate_gradient(apply, Vector(n, 1.0), std::move(initial_residual), reduction,
                            max_iterations);
}

}  // namespace detail

// max_i |(D_{x^-1} A' D_{x^-1} e)_i - 1|. Costs one counted product.
inline double balance_residual(LinearOperator& op, std::span<const double> x) {
  if (x.size() != op.size()) {
    throw Error(ErrorKind::length_mismatch, "vector length does not match operator size");
  }
  for (double v : x) {
    if (!(v > 0.0)) throw Error(ErrorKind::invalid_argument, "x must be strictly positive");
  }
  const auto y = op.apply(detail::reciprocal(x));
  return detail::balance_residual_from(x, y);
}

// Raw iterate x_steps of x_{k+1} = A' x_k^-1 from x_0 = e. x_1 is the degree
// vector; x_2 sums the reciprocal degrees of the neighbors.
inline Vector sinkhorn_iterate(LinearOperator& op, std::size_t steps) {
  Vector x(op.size(), 1.0);
  for (std::size_t k = 0; k < steps; ++k) x = op.apply(detail::reciprocal(x));
  return x;
}

// x_{k+1} = A' x_k^-1 from x_0. For a totally supported matrix the even and
// odd subsequences converge to limits c and r that differ by a constant
// factor; the returned power is their component-wise geometric mean.
//
// The per-step stopping test is the column-sum error of the row-balanced
// matrix D_{x_{k+1}^-1} A' D_{x_k^-1}, namely |x_{k+2}/x_k - 1|, which needs
// no extra product. Once it passes, the recombined vector is checked against
// the true residual (one counted product) before accepting.
inline BalanceResult sinkhorn_knopp(LinearOperator& op, const SolverConfig& cfg) {
  cfg.validate();
  const auto start = op.matvecs();
  const std::size_t limit = cfg.outer_limit();
  BalanceResult result;
  result.method = Method::sinkhorn_knopp;

  Vector prev = detail::initial_vector(op, cfg);
  Vector cur = op.apply(detail::reciprocal(prev));
  detail::require_finite_positive(cur, "sinkhorn-knopp");
  std::size_t k = 1;
  Vector candidate(op.size());

  auto recombine = [&](const Vector& a, const Vector& b) {
    for (std::size_t i = 0; i < a.size(); ++i) candidate[i] = std::sqrt(a[i] * b[i]);
  };

  while (k < limit) {
    Vector next = op.apply(detail::reciprocal(cur));
    ++k;
    detail::require_finite_positive(next, "sinkhorn-knopp");
    const double step_error = detail::balance_residual_from(prev, next);
    prev = std::move(cur);
    cur = std::move(next);
    if (step_error <= cfg.tol) {
      recombine(prev, cur);
      const double residual = balance_residual(op, candidate);
      if (residual <= cfg.tol) {
        result.converged = true;
        result.residual = residual;
        break;
      }
    }
  }
  if (!result.converged) {
    recombine(prev, cur);
    result.residual = balance_residual(op, candidate);
    result.converged = result.residual <= cfg.tol;
  }
  result.outer_iterations = k;
  result.power = std::move(candidate);
  detail::normalize(result.power, cfg.normalization);
  result.matvecs = op.matvecs() - start;
  return result;
}

// One Newton step for f(x) = x - A' x^-1 without safeguards:
//   y = 2 J_f(x)^-1 A' x^-1,  J_f(x) = I + A' D_{(x^2)^-1},
// with the inner system solved by CG to the given relative residual.
inline Vector newton_step(LinearOperator& op, std::span<const double> x, double inner_tol,
                          std::size_t max_inner) {
  if (x.size() != op.size()) {
    throw Error(ErrorKind::length_mismatch, "vector length does not match operator size");
  }
  const Vector xr = detail::reciprocal(x);
  const Vector ax = op.apply(xr);
  Vector r0(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r0[i] = xr[i] * ax[i] - 1.0;
  auto solve = detail::solve_jacobian(op, xr, std::move(r0), inner_tol, max_inner);
  if (solve.breakdown) throw Error(ErrorKind::solver_breakdown, "CG breakdown in Newton step");
  Vector y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] * solve.x[i];
  return y;
}

// Inexact Newton (inner-outer) iteration. Each outer step costs one counted
// product for A' x^-1 and one per CG iteration. The CG start u = e turns the
// initial inner residual into the balance residual of x, so convergence is
// tested for free at the top of each outer step.
//
// Safeguards: a candidate with a non-positive entry is pulled back towards x
// by halving the step; a CG breakdown (non-positive curvature, which happens
// while D A' D still has eigenvalues below -1) is replaced by a symmetric
// Sinkhorn-Knopp sweep x <- sqrt(x * A' x^-1).
inline BalanceResult newton_balance(LinearOperator& op, const SolverConfig& cfg) {
  cfg.validate();
  const auto start = op.matvecs();
  const std::size_t limit = cfg.outer_limit();
  const std::size_t n = op.size();
  BalanceResult result;
  result.method = Method::newton;

  Vector x = detail::initial_vector(op, cfg);
  Vector xr(n), ax(n), r0(n), candidate(n);
  std::size_t outer = 0;
  for (;;) {
    for (std::size_t i = 0; i < n; ++i) xr[i] = 1.0 / x[i];
    op.apply(xr, ax);
    detail::require_finite_positive(ax, "newton");
    for (std::size_t i = 0; i < n; ++i) r0[i] = xr[i] * ax[i] - 1.0;
    double residual = 0.0;
    for (double v : r0) residual = std::max(residual, std::abs(v));
    result.residual = residual;
    if (residual <= cfg.tol) {
      result.converged = true;
      break;
    }
    if (outer == limit) break;
    ++outer;

    const double forcing = std::clamp(residual, cfg.inner_reduction, cfg.inner_reduction_max);
    auto solve = detail::solve_jacobian(op, xr, r0, forcing, cfg.max_inner);
    bool accepted = false;
    if (!solve.breakdown) {
      for (double t = 1.0; t > 1e-12 && !accepted; t *= 0.5) {
        accepted = true;
        for (std::size_t i = 0; i < n; ++i) {
          candidate[i] = x[i] * (1.0 + t * (solve.x[i] - 1.0));
          if (!(candidate[i] > 0.0) || !std::isfinite(candidate[i])) {
            accepted = false;
            break;
          }
        }
      }
    }
    if (!accepted) {
      for (std::size_t i = 0; i < n; ++i) candidate[i] = std::sqrt(x[i] * ax[i]);
    }
    std::swap(x, candidate);
    detail::require_finite_positive(x, "newton");
  }
  result.outer_iterations = outer;
  result.power = std::move(x);
  detail::normalize(result.power, cfg.normalization);
  result.matvecs = op.matvecs() - start;
  return result;
}

inline BalanceResult solve(LinearOperator& op, const SolverConfig& cfg) {
  return cfg.method == Method::newton ? newton_balance(op, cfg) : sinkhorn_knopp(op, cfg);
}

inline constexpr std::string_view kNoExactSolution =
    "no exact solution exists; perturbation required";

// Builds the operator, checks existence when unperturbed, and runs the solver.
inline BalanceResult compute_power(const Graph& g, Perturbation kind, std::optional<double> alpha,
                                   const SolverConfig& cfg) {
  auto op = make_operator(g, kind, alpha);
  std::string warning;
  if (kind == Perturbation::none && !has_total_support(g).totally_supported) {
    if (cfg.strict) throw Error(ErrorKind::structural, std::string(kNoExactSolution));
    warning = kNoExactSolution;
  }
  auto result = solve(op, cfg);
  result.warning = std::move(warning);
  return result;
}

}  // namespace netpower
