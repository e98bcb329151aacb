#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "netpower/balancing.hpp"
#include "netpower/graph.hpp"
#include "netpower/measures.hpp"
#include "netpower/stats.hpp"
#include "netpower/structure.hpp"

// Serialization of results. All reals are emitted with 12 significant digits
// so that reports are byte-stable across runs.

namespace netpower::report {

using Json = nlohmann::ordered_json;

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// JSON has no NaN; undefined values become null.
inline Json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return std::strtod(format_number(v).c_str(), nullptr);
}

inline Json labelled_values(const Graph& g, const Vector& values) {
  Json arr = Json::array();
  for (Index i = 0; i < g.size(); ++i) {
    arr.push_back({{"label", g.label(i)}, {"value", number(values[i])}});
  }
  return arr;
}

inline Json to_json(const StructureReport& r, const Graph& g) {
  Json j;
  j["connected"] = r.connected;
  j["irreducible"] = r.connected;
  j["bipartite"] = r.bipartite;
  j["has_support"] = r.has_support;
  j["has_total_support"] = r.has_total_support;
  j["fully_indecomposable"] = r.fully_indecomposable;
  Json witness = nullptr;
  if (r.witness) {
    witness = Json::array();
    for (Index i = 0; i < r.witness->size(); ++i) {
      witness.push_back({g.label(i), g.label((*r.witness)[i])});
    }
  }
  j["witness"] = witness;
  Json bad = Json::array();
  for (const auto& [u, v] : r.violating_edges) bad.push_back({g.label(u), g.label(v)});
  j["violating_edges"] = bad;
  return j;
}

inline Json to_json(const BalanceResult& r, const Graph& g) {
  Json j;
  j["method"] = std::string(to_string(r.method));
  j["converged"] = r.converged;
  j["residual"] = number(r.residual);
  j["outer_iterations"] = r.outer_iterations;
  j["matvecs"] = r.matvecs;
  j["power"] = labelled_values(g, r.power);
  if (!r.warning.empty()) j["warning"] = r.warning;
  return j;
}

inline Json to_json(const MeasureVector& m, const Graph& g) {
  Json j;
  j["name"] = m.name;
  Json params = Json::object();
  for (const auto& [k, v] : m.params) params[k] = number(v);
  j["params"] = params;
  j["converged"] = m.converged;
  if (!m.note.empty()) j["note"] = m.note;
  j["values"] = labelled_values(g, m.values);
  return j;
}

inline Json to_json(const CorrelationMatrix& c) {
  Json j;
  j["method"] = std::string(to_string(c.method));
  j["names"] = c.names;
  Json rows = Json::array();
  for (const auto& row : c.coefficients) {
    Json r = Json::array();
    for (double v : row) r.push_back(number(v));
    rows.push_back(r);
  }
  j["coefficients"] = rows;
  return j;
}

inline void write_csv(std::ostream& out, const MeasureVector& m, const Graph& g) {
  out << "label,value\n";
  for (Index i = 0; i < g.size(); ++i) out << g.label(i) << ',' << format_number(m.values[i]) << '\n';
}

// Header row is the method followed by the measure names.
inline void write_csv(std::ostream& out, const CorrelationMatrix& c) {
  out << to_string(c.method);
  for (const auto& name : c.names) out << ',' << name;
  out << '\n';
  for (std::size_t a = 0; a < c.names.size(); ++a) {
    out << c.names[a];
    for (double v : c.coefficients[a]) out << ',' << format_number(v);
    out << '\n';
  }
}

}  // namespace netpower::report
