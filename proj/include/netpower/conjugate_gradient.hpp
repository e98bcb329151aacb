#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>

#include "netpower/graph.hpp"

namespace netpower {

struct CgResult {
  Vector x;
  std::size_t iterations = 0;
  bool breakdown = false;
  bool reached_tolerance = false;
};

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace detail

// Unpreconditioned CG for a symmetric operator, continuing from x with its
// residual r = b - M x already known. apply(p, out) writes M p. Stops when
// ||r||_2 <= reduction * ||r_0||_2; non-positive curvature is reported as a
// breakdown with the iterate reached so far.
template <typename Apply>
CgResult conjugate_gradient(Apply&& apply, Vector x, Vector r, double reduction,
                            std::size_t max_iterations) {
  const std::size_t n = x.size();
  CgResult out;
  double rs = detail::dot(r, r);
  const double target = reduction * reduction * rs;
  if (rs == 0.0) {
    out.x = std::move(x);
    out.reached_tolerance = true;
    return out;
  }
  Vector p = r, mp(n);
  while (out.iterations < max_iterations) {
    apply(std::span<const double>(p), std::span<double>(mp));
    ++out.iterations;
    const double curvature = detail::dot(p, mp);
    if (!(curvature > 0.0) || !std::isfinite(curvature)) {
      out.breakdown = true;
      break;
    }
    const double step = rs / curvature;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += step * p[i];
      r[i] -= step * mp[i];
    }
    const double rs_next = detail::dot(r, r);
    if (rs_next <= target) {
      out.reached_tolerance = true;
      break;
    }
    const double beta = rs_next / rs;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    rs = rs_next;
  }
  out.x = std::move(x);
  return out;
}

}  // namespace netpower
