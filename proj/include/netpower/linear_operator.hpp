#pragma once

#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "netpower/error.hpp"
#include "netpower/graph.hpp"

namespace netpower {

enum class Perturbation { none, diagonal, full };

inline constexpr std::string_view to_string(Perturbation p) noexcept {
  switch (p) {
    case Perturbation::none: return "none";
    case Perturbation::diagonal: return "diag";
    case Perturbation::full: return "full";
  }
  return "none";
}

inline Perturbation parse_perturbation(std::string_view s) {
  if (s == "none") return Perturbation::none;
  if (s == "diag" || s == "diagonal") return Perturbation::diagonal;
  if (s == "full") return Perturbation::full;
  throw Error(ErrorKind::invalid_argument, "unknown perturbation '" + std::string(s) + "'");
}

// Matrix-vector view of A, A + alpha*I or A + alpha*E over a Graph, counting
// every product. The full perturbation is applied as a rank-one update and is
// never densified. The graph must outlive the operator.
//
// Not thread-safe: the counter is plain mutable state, so confine each
// instance to one thread at a time.
class LinearOperator {
 public:
  LinearOperator(const Graph& graph, Perturbation kind, double alpha)
      : graph_(&graph), kind_(kind), alpha_(kind == Perturbation::none ? 0.0 : alpha) {
    if (kind != Perturbation::none && !(alpha > 0.0)) {
      throw Error(ErrorKind::invalid_argument, "damping alpha must be positive");
    }
  }

  explicit LinearOperator(const Graph& graph) : LinearOperator(graph, Perturbation::none, 0.0) {}

  // The operator refers to the graph; it must not outlive it.
  LinearOperator(Graph&&, Perturbation, double) = delete;
  explicit LinearOperator(Graph&&) = delete;

  const Graph& graph() const noexcept { return *graph_; }
  Index size() const noexcept { return graph_->size(); }
  Perturbation perturbation() const noexcept { return kind_; }
  double alpha() const noexcept { return alpha_; }

  void apply(std::span<const double> v, std::span<double> out) {
    const Index n = size();
    if (v.size() != n || out.size() != n) {
      throw Error(ErrorKind::length_mismatch,
                  "vector length " + std::to_string(v.size()) + " does not match operator size " +
                      std::to_string(n));
    }
    double shift = 0.0;
    if (kind_ == Perturbation::full) shift = alpha_ * std::accumulate(v.begin(), v.end(), 0.0);
    for (Index i = 0; i < n; ++i) {
      double acc = 0.0;
      for (const auto& nb : graph_->neighbors(i)) acc += nb.weight * v[nb.index];
      if (kind_ == Perturbation::diagonal) acc += alpha_ * v[i];
      out[i] = acc + shift;
    }
    ++matvecs_;
  }

  Vector apply(std::span<const double> v) {
    Vector out(size());
    apply(v, out);
    return out;
  }

  std::uint64_t matvecs() const noexcept { return matvecs_; }
  void reset_counter() noexcept { matvecs_ = 0; }

 private:
  const Graph* graph_;
  Perturbation kind_;
  double alpha_;
  std::uint64_t matvecs_ = 0;
};

inline LinearOperator make_operator(const Graph& g, Perturbation kind,
                                    std::optional<double> alpha = std::nullopt) {
  if (kind == Perturbation::none) {
    if (alpha) throw Error(ErrorKind::invalid_argument, "alpha given without a perturbation");
    return LinearOperator(g);
  }
  if (!alpha) throw Error(ErrorKind::invalid_argument, "perturbation requires alpha");
  return LinearOperator(g, kind, *alpha);
}

// Builds the effective matrix of an operator as an explicit graph: loops for a
// diagonal perturbation, every pair for a full one. Dense in the full case;
// meant for structural checks on small graphs.
inline Graph materialize(const Graph& g, Perturbation kind, double alpha) {
  if (kind == Perturbation::none) return g;
  if (!(alpha > 0.0)) throw Error(ErrorKind::invalid_argument, "damping alpha must be positive");
  const Index n = g.size();
  std::vector<Edge> edges;
  if (kind == Perturbation::diagonal) {
    edges = g.edges();
    std::vector<bool> has_loop(n, false);
    for (auto& e : edges) {
      if (e.u == e.v) {
        e.weight += alpha;
        has_loop[e.u] = true;
      }
    }
    for (Index i = 0; i < n; ++i) {
      if (!has_loop[i]) edges.push_back({i, i, alpha});
    }
  } else {
    for (Index i = 0; i < n; ++i) {
      for (Index j = i; j < n; ++j) edges.push_back({i, j, g.weight(i, j) + alpha});
    }
  }
  return Graph(g.labels(), std::move(edges));
}

}  // namespace netpower
