#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "netpower/error.hpp"

namespace netpower {

using Index = std::size_t;
using Vector = std::vector<double>;

// Undirected weighted edge, stored with u <= v. u == v is a loop.
struct Edge {
  Index u = 0;
  Index v = 0;
  double weight = 1.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Neighbor {
  Index index = 0;
  double weight = 0.0;
};

// Immutable sparse symmetric non-negative adjacency structure.
//
// Each unordered pair is stored once in edges(); the row view (neighbors())
// holds both directions so that row i lists every j with A(i,j) > 0, sorted by
// j. A loop appears once in its own row with its weight as A(i,i).
class Graph {
 public:
  Graph() = default;

  Graph(std::vector<std::string> labels, std::vector<Edge> edges)
      : labels_(std::move(labels)), edges_(std::move(edges)) {
    const Index n = labels_.size();
    {
      std::unordered_map<std::string_view, Index> seen;
      seen.reserve(n);
      for (Index i = 0; i < n; ++i) {
        if (!seen.emplace(labels_[i], i).second) {
          throw Error(ErrorKind::invalid_argument,
                      "duplicate node label '" + labels_[i] + "'");
        }
      }
    }
    for (auto& e : edges_) {
      if (e.u >= n || e.v >= n) {
        throw Error(ErrorKind::invalid_argument, "edge endpoint out of range");
      }
      if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
        throw Error(ErrorKind::invalid_argument,
                    "edge weights must be positive and finite");
      }
      if (e.u > e.v) std::swap(e.u, e.v);
    }
    std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
      return a.u != b.u ? a.u < b.u : a.v < b.v;
    });
    for (std::size_t k = 1; k < edges_.size(); ++k) {
      if (edges_[k].u == edges_[k - 1].u && edges_[k].v == edges_[k - 1].v) {
        throw Error(ErrorKind::duplicate_edge,
                    "duplicate edge (" + labels_[edges_[k].u] + ", " +
                        labels_[edges_[k].v] + ")");
      }
    }
    build_rows();
  }

  Index size() const noexcept { return labels_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::string& label(Index i) const { return labels_.at(i); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  // Number of stored (structurally nonzero) entries of A, counting both
  // directions of each off-diagonal edge.
  std::size_t nnz() const noexcept { return row_index_.size(); }

  std::span<const Neighbor> neighbors(Index i) const {
    return {row_index_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
  }

  std::size_t degree_count(Index i) const { return row_ptr_[i + 1] - row_ptr_[i]; }

  double weight(Index i, Index j) const {
    const auto row = neighbors(i);
    const auto it = std::lower_bound(
        row.begin(), row.end(), j,
        [](const Neighbor& nb, Index col) { return nb.index < col; });
    return (it != row.end() && it->index == j) ? it->weight : 0.0;
  }

  bool has_loops() const noexcept {
    return std::any_of(edges_.begin(), edges_.end(),
                       [](const Edge& e) { return e.u == e.v; });
  }

  bool is_unweighted() const noexcept {
    return std::all_of(edges_.begin(), edges_.end(),
                       [](const Edge& e) { return e.weight == 1.0; });
  }

 private:
  void build_rows() {
    const Index n = labels_.size();
    row_ptr_.assign(n + 1, 0);
    for (const auto& e : edges_) {
      ++row_ptr_[e.u + 1];
      if (e.u != e.v) ++row_ptr_[e.v + 1];
    }
    for (Index i = 0; i < n; ++i) row_ptr_[i + 1] += row_ptr_[i];
    row_index_.resize(row_ptr_[n]);
    std::vector<std::size_t> fill(row_ptr_.begin(), row_ptr_.end() - 1);
    for (const auto& e : edges_) {
      row_index_[fill[e.u]++] = {e.v, e.weight};
      if (e.u != e.v) row_index_[fill[e.v]++] = {e.u, e.weight};
    }
    for (Index i = 0; i < n; ++i) {
      std::sort(row_index_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]),
                row_index_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]),
                [](const Neighbor& a, const Neighbor& b) { return a.index < b.index; });
    }
  }

  std::vector<std::string> labels_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<Neighbor> row_index_;
};

// Weighted degree d_i = sum_j A(i,j). A loop of weight w adds w (not 2w).
inline Vector degrees(const Graph& g) {
  Vector d(g.size(), 0.0);
  for (Index i = 0; i < g.size(); ++i) {
    for (const auto& nb : g.neighbors(i)) d[i] += nb.weight;
  }
  return d;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\f\v");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\f\v");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    pos = s.find_first_not_of(" \t\r\f\v", pos);
    if (pos == std::string_view::npos) break;
    auto end = s.find_first_of(" \t\r\f\v", pos);
    if (end == std::string_view::npos) end = s.size();
    out.push_back(s.substr(pos, end - pos));
    pos = end;
  }
  return out;
}

}  // namespace detail

// Parses "u v [w]" lines. '#' starts a comment; LF and CRLF are accepted.
// Nodes are indexed in order of first appearance.
inline Graph load_edge_list(std::istream& in) {
  std::vector<std::string> labels;
  std::unordered_map<std::string, Index> index_of;
  std::vector<Edge> edges;
  auto intern = [&](std::string_view token) {
    auto [it, inserted] = index_of.try_emplace(std::string(token), labels.size());
    if (inserted) labels.emplace_back(token);
    return it->second;
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    view = detail::trim(view);
    if (view.empty()) continue;
    const auto tokens = detail::split_ws(view);
    const auto where = "line " + std::to_string(line_no) + ": ";
    if (tokens.size() < 2 || tokens.size() > 3) {
      throw Error(ErrorKind::parse, where + "expected 'u v [w]'");
    }
    double w = 1.0;
    if (tokens.size() == 3) {
      const auto tok = tokens[2];
      const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), w);
      if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(w)) {
        throw Error(ErrorKind::parse, where + "unparseable weight '" + std::string(tok) + "'");
      }
      if (!(w > 0.0)) {
        throw Error(ErrorKind::parse, where + "weight must be positive");
      }
    }
    const Index u = intern(tokens[0]);
    const Index v = intern(tokens[1]);
    edges.push_back({std::min(u, v), std::max(u, v), w});
  }
  if (labels.empty()) throw Error(ErrorKind::empty_input, "edge list contains no edges");
  return Graph(std::move(labels), std::move(edges));
}

inline Graph load_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open '" + path + "'");
  return load_edge_list(in);
}

// Writes the canonical edge set; weights use round-trip precision.
inline void write_edge_list(std::ostream& out, const Graph& g) {
  char buf[32];
  for (const auto& e : g.edges()) {
    std::snprintf(buf, sizeof buf, "%.17g", e.weight);
    out << g.label(e.u) << ' ' << g.label(e.v) << ' ' << buf << '\n';
  }
}

}  // namespace netpower
