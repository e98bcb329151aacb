#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "netpower/error.hpp"
#include "netpower/graph.hpp"
#include "netpower/structure.hpp"

namespace netpower::generators {

// "A", "B", ... for small graphs, "v0", "v1", ... otherwise.
inline std::vector<std::string> default_labels(Index n) {
  std::vector<std::string> labels;
  labels.reserve(n);
  for (Index i = 0; i < n; ++i) {
    labels.push_back(n <= 26 ? std::string(1, static_cast<char>('A' + i)) : "v" + std::to_string(i));
  }
  return labels;
}

inline Graph path(Index n) {
  std::vector<Edge> edges;
  for (Index i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, 1.0});
  return Graph(default_labels(n), std::move(edges));
}

inline Graph cycle(Index n) {
  std::vector<Edge> edges;
  for (Index i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n, 1.0});
  return Graph(default_labels(n), std::move(edges));
}

inline Graph complete(Index n) {
  std::vector<Edge> edges;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) edges.push_back({i, j, 1.0});
  }
  return Graph(default_labels(n), std::move(edges));
}

// Center is node 0.
inline Graph star(Index leaves) {
  std::vector<Edge> edges;
  for (Index i = 1; i <= leaves; ++i) edges.push_back({0, i, 1.0});
  return Graph(default_labels(leaves + 1), std::move(edges));
}

inline Graph disjoint_union(const Graph& a, const Graph& b) {
  const Index n = a.size() + b.size();
  std::vector<Edge> edges = a.edges();
  for (const auto& e : b.edges()) edges.push_back({e.u + a.size(), e.v + a.size(), e.weight});
  return Graph(default_labels(n), std::move(edges));
}

// Portable uniform draw in [0, bound) from a 64-bit engine, so seeded graphs
// do not depend on the standard library's distribution implementation.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t draw;
  do {
    draw = rng();
  } while (draw >= limit);
  return draw % bound;
}

// G(n, m) without loops, redrawn from the same stream until connected.
inline Graph random_connected(Index n, std::size_t m, std::uint64_t seed) {
  if (n < 2) throw Error(ErrorKind::invalid_argument, "random graph needs n >= 2");
  const std::size_t max_edges = n * (n - 1) / 2;
  if (m < n - 1 || m > max_edges) {
    throw Error(ErrorKind::invalid_argument, "edge count must lie in [n-1, n(n-1)/2]");
  }
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < 10'000; ++attempt) {
    std::set<std::pair<Index, Index>> chosen;
    while (chosen.size() < m) {
      const Index u = uniform_below(rng, n);
      const Index v = uniform_below(rng, n);
      if (u == v) continue;
      chosen.emplace(std::min(u, v), std::max(u, v));
    }
    std::vector<Edge> edges;
    edges.reserve(m);
    for (const auto& [u, v] : chosen) edges.push_back({u, v, 1.0});
    Graph g(default_labels(n), std::move(edges));
    if (is_irreducible(g)) return g;
  }
  throw Error(ErrorKind::invalid_argument, "could not draw a connected graph; raise m");
}

}  // namespace netpower::generators
