#pragma once

#include <algorithm>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>
#include <utility>
#include <vector>

#include "netpower/error.hpp"
#include "netpower/graph.hpp"

// Combinatorial feasibility of x = A x^-1 for a symmetric non-negative A.
//
// A positive diagonal of A is a permutation s with A(i, s(i)) > 0 for all i,
// i.e. a perfect matching between rows and columns of the bipartite row/column
// graph. A has total support when every positive entry lies on some positive
// diagonal; that is exactly the class where the power equation is solvable.

namespace netpower {

struct StructureReport {
  bool connected = false;
  bool bipartite = false;
  bool has_support = false;
  bool has_total_support = false;
  bool fully_indecomposable = false;
  std::optional<std::vector<Index>> witness;
  std::vector<std::pair<Index, Index>> violating_edges;
};

struct SupportResult {
  bool supported = false;
  std::optional<std::vector<Index>> witness;
};

struct TotalSupportResult {
  bool totally_supported = false;
  std::vector<std::pair<Index, Index>> violating_edges;
};

// Two-colorability, per component. A loop is an odd cycle.
inline bool is_bipartite(const Graph& g) {
  const Index n = g.size();
  std::vector<int> color(n, -1);
  std::vector<Index> stack;
  for (Index s = 0; s < n; ++s) {
    if (color[s] != -1) continue;
    color[s] = 0;
    stack.push_back(s);
    while (!stack.empty()) {
      const Index u = stack.back();
      stack.pop_back();
      for (const auto& nb : g.neighbors(u)) {
        if (color[nb.index] == -1) {
          color[nb.index] = 1 - color[u];
          stack.push_back(nb.index);
        } else if (color[nb.index] == color[u]) {
          return false;
        }
      }
    }
  }
  return true;
}

// Irreducibility of a symmetric matrix is connectedness of its graph.
inline bool is_irreducible(const Graph& g) {
  const Index n = g.size();
  if (n == 0) return false;
  std::vector<bool> seen(n, false);
  std::vector<Index> stack{0};
  seen[0] = true;
  Index reached = 1;
  while (!stack.empty()) {
    const Index u = stack.back();
    stack.pop_back();
    for (const auto& nb : g.neighbors(u)) {
      if (!seen[nb.index]) {
        seen[nb.index] = true;
        ++reached;
        stack.push_back(nb.index);
      }
    }
  }
  return reached == n;
}

namespace detail {

inline constexpr Index kUnmatched = std::numeric_limits<Index>::max();

// Hopcroft-Karp on the row/column graph of A: row i may take column j iff
// A(i,j) > 0. Returns row -> column assignment (kUnmatched where free).
inline std::vector<Index> max_row_column_matching(const Graph& g) {
  const Index n = g.size();
  constexpr Index kInf = std::numeric_limits<Index>::max();
  std::vector<Index> row_match(n, kUnmatched), col_match(n, kUnmatched);
  std::vector<Index> level(n);
  std::vector<std::size_t> cursor(n);

  // Cheap greedy start.
  for (Index r = 0; r < n; ++r) {
    for (const auto& nb : g.neighbors(r)) {
      if (col_match[nb.index] == kUnmatched) {
        row_match[r] = nb.index;
        col_match[nb.index] = r;
        break;
      }
    }
  }

  auto bfs = [&]() {
    std::queue<Index> q;
    bool found = false;
    for (Index r = 0; r < n; ++r) {
      if (row_match[r] == kUnmatched) {
        level[r] = 0;
        q.push(r);
      } else {
        level[r] = kInf;
      }
    }
    while (!q.empty()) {
      const Index r = q.front();
      q.pop();
      for (const auto& nb : g.neighbors(r)) {
        const Index next = col_match[nb.index];
        if (next == kUnmatched) {
          found = true;
        } else if (level[next] == kInf) {
          level[next] = level[r] + 1;
          q.push(next);
        }
      }
    }
    return found;
  };

  // Iterative layered DFS from a free row; flips the path on success.
  auto dfs = [&](Index root) {
    std::vector<Index> path{root};
    while (!path.empty()) {
      const Index r = path.back();
      const auto row = g.neighbors(r);
      bool advanced = false;
      while (cursor[r] < row.size()) {
        const Index c = row[cursor[r]].index;
        const Index next = col_match[c];
        if (next == kUnmatched) {
          // Augment along path: each row on the path takes the column that
          // its cursor currently points at.
          for (auto it = path.rbegin(); it != path.rend(); ++it) {
            const Index pr = *it;
            const Index pc = g.neighbors(pr)[cursor[pr]].index;
            row_match[pr] = pc;
            col_match[pc] = pr;
          }
          return true;
        }
        if (level[next] == level[r] + 1) {
          path.push_back(next);
          advanced = true;
          break;
        }
        ++cursor[r];
      }
      if (!advanced) {
        level[r] = kInf;
        path.pop_back();
        if (!path.empty()) ++cursor[path.back()];
      }
    }
    return false;
  };

  while (bfs()) {
    std::fill(cursor.begin(), cursor.end(), 0);
    for (Index r = 0; r < n; ++r) {
      if (row_match[r] == kUnmatched) dfs(r);
    }
  }
  return row_match;
}

// Tarjan's strongly connected components, iterative. successors(u, f) must
// call f(v) for each arc u -> v.
template <typename Successors>
std::vector<Index> strongly_connected_components(Index n, Successors&& successors_of) {
  std::vector<std::vector<Index>> adj(n);
  for (Index u = 0; u < n; ++u) successors_of(u, [&](Index v) { adj[u].push_back(v); });

  constexpr Index kNone = std::numeric_limits<Index>::max();
  std::vector<Index> index(n, kNone), low(n, 0), comp(n, kNone);
  std::vector<bool> on_stack(n, false);
  std::vector<Index> stack;
  std::vector<std::pair<Index, std::size_t>> call;
  Index next_index = 0, next_comp = 0;

  for (Index s = 0; s < n; ++s) {
    if (index[s] != kNone) continue;
    call.emplace_back(s, 0);
    index[s] = low[s] = next_index++;
    stack.push_back(s);
    on_stack[s] = true;
    while (!call.empty()) {
      auto& [u, pos] = call.back();
      if (pos < adj[u].size()) {
        const Index v = adj[u][pos++];
        if (index[v] == kNone) {
          index[v] = low[v] = next_index++;
          stack.push_back(v);
          on_stack[v] = true;
          call.emplace_back(v, 0);
        } else if (on_stack[v]) {
          low[u] = std::min(low[u], index[v]);
        }
        continue;
      }
      if (low[u] == index[u]) {
        Index w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = next_comp;
        } while (w != u);
        ++next_comp;
      }
      const Index done = u;
      call.pop_back();
      if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
    }
  }
  return comp;
}

}  // namespace detail

inline SupportResult has_support(const Graph& g) {
  auto matching = detail::max_row_column_matching(g);
  const bool perfect = g.size() > 0 &&
                       std::none_of(matching.begin(), matching.end(),
                                    [](Index c) { return c == detail::kUnmatched; });
  if (!perfect) return {false, std::nullopt};
  return {true, std::move(matching)};
}

// An entry (r, c) lies on a positive diagonal iff it is in the perfect matching
// M or both r and the row matched to c sit in one strongly connected component
// of the digraph r -> M^-1(c) over the unmatched entries (an M-alternating
// cycle through it exists).
inline TotalSupportResult has_total_support(const Graph& g) {
  TotalSupportResult result;
  const auto support = has_support(g);
  if (!support.supported) {
    for (const auto& e : g.edges()) result.violating_edges.emplace_back(e.u, e.v);
    result.totally_supported = false;
    return result;
  }
  const auto& row_match = *support.witness;
  const Index n = g.size();
  std::vector<Index> col_match(n);
  for (Index r = 0; r < n; ++r) col_match[row_match[r]] = r;

  const auto comp = detail::strongly_connected_components(n, [&](Index r, auto&& emit) {
    for (const auto& nb : g.neighbors(r)) {
      if (nb.index != row_match[r]) emit(col_match[nb.index]);
    }
  });

  for (const auto& e : g.edges()) {
    const bool admissible = row_match[e.u] == e.v || comp[e.u] == comp[col_match[e.v]];
    if (!admissible) result.violating_edges.emplace_back(e.u, e.v);
  }
  result.totally_supported = !g.edges().empty() && result.violating_edges.empty();
  return result;
}

// For symmetric non-negative matrices: never for bipartite graphs, otherwise
// total support together with irreducibility.
inline bool is_fully_indecomposable(const Graph& g) {
  if (g.size() == 0 || is_bipartite(g)) return false;
  return is_irreducible(g) && has_total_support(g).totally_supported;
}

enum class SupportMode { support, total };

// Exhaustive oracle over all n! permutations.
inline bool brute_force_support(const Graph& g, SupportMode mode) {
  const Index n = g.size();
  if (n > 9) throw Error(ErrorKind::invalid_argument, "brute-force oracle limited to n <= 9");
  if (n == 0) return false;
  std::vector<Index> perm(n);
  std::iota(perm.begin(), perm.end(), Index{0});
  std::vector<std::vector<bool>> covered(n, std::vector<bool>(n, false));
  bool any = false;
  do {
    bool positive = true;
    for (Index i = 0; i < n && positive; ++i) positive = g.weight(i, perm[i]) > 0.0;
    if (!positive) continue;
    if (mode == SupportMode::support) return true;
    any = true;
    for (Index i = 0; i < n; ++i) covered[i][perm[i]] = true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  if (mode == SupportMode::support || !any) return false;
  for (Index i = 0; i < n; ++i) {
    for (const auto& nb : g.neighbors(i)) {
      if (!covered[i][nb.index]) return false;
    }
  }
  return true;
}

inline StructureReport analyze_structure(const Graph& g) {
  StructureReport report;
  report.connected = is_irreducible(g);
  report.bipartite = is_bipartite(g);
  auto support = has_support(g);
  report.has_support = support.supported;
  report.witness = std::move(support.witness);
  auto total = has_total_support(g);
  report.has_total_support = total.totally_supported;
  report.violating_edges = std::move(total.violating_edges);
  report.fully_indecomposable =
      !report.bipartite && report.connected && report.has_total_support;
  return report;
}

}  // namespace netpower
