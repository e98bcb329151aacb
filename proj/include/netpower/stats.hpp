#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "netpower/error.hpp"
#include "netpower/graph.hpp"
#include "netpower/measures.hpp"

namespace netpower {

inline double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorKind::length_mismatch, "pearson: length mismatch");
  const std::size_t n = x.size();
  if (n < 3) throw Error(ErrorKind::invalid_argument, "pearson: need at least 3 observations");
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw Error(ErrorKind::invalid_argument, "pearson: zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

enum class KendallVariant { a, b };

namespace detail {

// -1, 0 or 1; values within rel_tol of each other (relative to the larger
// magnitude) compare equal.
inline int compare_with_tolerance(double a, double b, double rel_tol) {
  const double scale = std::max(std::abs(a), std::abs(b));
  if (std::abs(a - b) <= rel_tol * scale) return 0;
  return a < b ? -1 : 1;
}

// Rounds to the number of significant digits implied by rel_tol, giving a
// tie-tolerant key that is still a strict weak ordering.
inline double snap(double v, double rel_tol) {
  if (v == 0.0 || !std::isfinite(v)) return v;
  const int digits = std::clamp(static_cast<int>(std::ceil(-std::log10(rel_tol))), 1, 17);
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*e", digits - 1, v);
  return std::strtod(buf, nullptr);
}

}  // namespace detail

// tau_a = (concordant - discordant) / (n(n-1)/2), ties counted in neither.
// tau_b divides by sqrt((n0 - ties_x)(n0 - ties_y)) instead; it is NaN when
// either input is constant. O(n^2).
inline double kendall_tau(std::span<const double> x, std::span<const double> y,
                          KendallVariant variant = KendallVariant::b, double tie_tol = 0.0) {
  if (x.size() != y.size()) throw Error(ErrorKind::length_mismatch, "kendall: length mismatch");
  const std::size_t n = x.size();
  if (n < 2) throw Error(ErrorKind::invalid_argument, "kendall: need at least 2 observations");
  long long concordant = 0, discordant = 0, ties_x = 0, ties_y = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const int sx = detail::compare_with_tolerance(x[i], x[j], tie_tol);
      const int sy = detail::compare_with_tolerance(y[i], y[j], tie_tol);
      if (sx == 0) ++ties_x;
      if (sy == 0) ++ties_y;
      if (sx == 0 || sy == 0) continue;
      if (sx == sy) ++concordant;
      else ++discordant;
    }
  }
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  const double diff = static_cast<double>(concordant - discordant);
  if (variant == KendallVariant::a) return diff / pairs;
  const double denom = std::sqrt((pairs - static_cast<double>(ties_x)) *
                                 (pairs - static_cast<double>(ties_y)));
  if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return std::clamp(diff / denom, -1.0, 1.0);
}

// Pearson correlation of x and y with the linear effect of z removed.
inline double partial_correlation(std::span<const double> x, std::span<const double> y,
                                  std::span<const double> z) {
  if (x.size() != y.size() || x.size() != z.size()) {
    throw Error(ErrorKind::length_mismatch, "partial correlation: length mismatch");
  }
  if (x.size() < 4) {
    throw Error(ErrorKind::invalid_argument, "partial correlation: need at least 4 observations");
  }
  const double rxy = pearson(x, y), rxz = pearson(x, z), ryz = pearson(y, z);
  const double denom = (1.0 - rxz * rxz) * (1.0 - ryz * ryz);
  if (!(denom > 1e-24)) {
    throw Error(ErrorKind::invalid_argument, "partial correlation: control is collinear");
  }
  return std::clamp((rxy - rxz * ryz) / std::sqrt(denom), -1.0, 1.0);
}

enum class CorrelationMethod { pearson, kendall, partial_pearson_given_degree };

inline constexpr std::string_view to_string(CorrelationMethod m) noexcept {
  switch (m) {
    case CorrelationMethod::pearson: return "pearson";
    case CorrelationMethod::kendall: return "kendall";
    case CorrelationMethod::partial_pearson_given_degree: return "partial_pearson_given_degree";
  }
  return "pearson";
}

struct CorrelationMatrix {
  std::vector<std::string> names;
  std::vector<std::vector<double>> coefficients;  // NaN where undefined
  CorrelationMethod method = CorrelationMethod::kendall;
};

// Pairwise coefficients over the given measures. The diagonal is 1; an
// undefined off-diagonal entry (constant input, collinear control) is NaN.
// For the partial method, control must hold the degree vector.
inline CorrelationMatrix correlation_matrix(const std::vector<MeasureVector>& measures,
                                            CorrelationMethod method,
                                            std::span<const double> control = {},
                                            double tie_tol = 0.0) {
  CorrelationMatrix out;
  out.method = method;
  const std::size_t k = measures.size();
  for (const auto& m : measures) out.names.push_back(m.name);
  out.coefficients.assign(k, std::vector<double>(k, 1.0));
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      double value = std::numeric_limits<double>::quiet_NaN();
      try {
        const auto& x = measures[a].values;
        const auto& y = measures[b].values;
        switch (method) {
          case CorrelationMethod::pearson: value = pearson(x, y); break;
          case CorrelationMethod::kendall:
            value = kendall_tau(x, y, KendallVariant::b, tie_tol);
            break;
          case CorrelationMethod::partial_pearson_given_degree:
            value = partial_correlation(x, y, control);
            break;
        }
      } catch (const Error&) {
      }
      out.coefficients[a][b] = out.coefficients[b][a] = value;
    }
  }
  return out;
}

struct RankEntry {
  std::string label;
  double value = 0.0;
};

struct RankColumn {
  std::string name;
  std::vector<RankEntry> top;
};

// Top-k labels per measure, by descending value; ties (within tie_tol,
// relative) are ordered by label.
inline std::vector<RankColumn> rank_table(const std::vector<std::string>& labels,
                                          const std::vector<MeasureVector>& measures,
                                          std::size_t k, double tie_tol = 0.0) {
  if (k > labels.size()) throw Error(ErrorKind::invalid_argument, "top-k exceeds node count");
  std::vector<RankColumn> table;
  for (const auto& m : measures) {
    if (m.values.size() != labels.size()) {
      throw Error(ErrorKind::length_mismatch, "measure '" + m.name + "' has wrong length");
    }
    Vector key = m.values;
    if (tie_tol > 0.0) {
      for (double& v : key) v = detail::snap(v, tie_tol);
    }
    std::vector<Index> order(labels.size());
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
      if (key[a] != key[b]) return key[a] > key[b];
      return labels[a] < labels[b];
    });
    RankColumn col{m.name, {}};
    for (std::size_t r = 0; r < k; ++r) col.top.push_back({labels[order[r]], m.values[order[r]]});
    table.push_back(std::move(col));
  }
  return table;
}

}  // namespace netpower
