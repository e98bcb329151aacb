#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <future>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "netpower/netpower.hpp"
#include "netpower/report.hpp"

// Command-line front end. run() is the whole program; main() only forwards
// argv, which keeps every command testable in-process.

namespace netpower::cli {

enum class Format { json, csv, text };

struct RunConfig {
  std::string command;
  std::vector<std::string> inputs;
  std::vector<std::uint64_t> generate;  // N M SEED when given
  std::size_t count = 1;
  std::optional<Format> format;
  std::optional<std::string> perturb;
  std::optional<double> alpha;
  std::string method = "sk";
  double tol = 1e-8;
  std::optional<std::size_t> max_iter;
  double bonacich_alpha = 1.0;
  double beta_fraction = -0.85;  // beta = beta_fraction / r
  std::optional<std::size_t> top;
  bool force = false;
};

// Relative tolerance under which two scores count as tied when ranking.
inline constexpr double kTieTolerance = 1e-9;
inline constexpr double kDiagonalDefault = 0.15;
inline constexpr double kFullDefault = 0.01;

struct Source {
  std::string name;
  Graph graph;
};

inline std::vector<Source> load_sources(const RunConfig& cfg) {
  std::vector<Source> sources;
  for (const auto& path : cfg.inputs) sources.push_back({path, load_edge_list_file(path)});
  if (!cfg.generate.empty()) {
    const auto n = static_cast<Index>(cfg.generate[0]);
    const auto m = static_cast<std::size_t>(cfg.generate[1]);
    for (std::size_t k = 0; k < cfg.count; ++k) {
      const std::uint64_t seed = cfg.generate[2] + k;
      sources.push_back({"generate(n=" + std::to_string(n) + ";m=" + std::to_string(m) +
                             ";seed=" + std::to_string(seed) + ")",
                         generators::random_connected(n, m, seed)});
    }
  }
  if (sources.empty()) throw Error(ErrorKind::invalid_argument, "no input: use --input or --generate");
  return sources;
}

inline Source single_source(const RunConfig& cfg) {
  auto sources = load_sources(cfg);
  if (sources.size() != 1) {
    throw Error(ErrorKind::invalid_argument, "'" + cfg.command + "' takes exactly one graph");
  }
  return std::move(sources.front());
}

inline SolverConfig solver_config(const RunConfig& cfg) {
  SolverConfig s;
  s.method = parse_method(cfg.method);
  s.tol = cfg.tol;
  s.max_outer = cfg.max_iter;
  s.strict = !cfg.force;
  return s;
}

inline std::pair<Perturbation, std::optional<double>> perturbation_of(const RunConfig& cfg,
                                                                      Perturbation fallback) {
  const Perturbation kind = cfg.perturb ? parse_perturbation(*cfg.perturb) : fallback;
  if (kind == Perturbation::none) {
    if (cfg.alpha) throw Error(ErrorKind::invalid_argument, "--alpha requires --perturb diag|full");
    return {kind, std::nullopt};
  }
  const double alpha = cfg.alpha.value_or(kind == Perturbation::full ? kFullDefault : kDiagonalDefault);
  return {kind, alpha};
}

inline BalanceResult checked_power(const Graph& g, Perturbation kind, std::optional<double> alpha,
                                   const SolverConfig& s) {
  try {
    return compute_power(g, kind, alpha, s);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::structural) throw;
    throw Error(ErrorKind::structural,
                std::string(e.what()) + " (use --perturb diag|full, or --force to try anyway)");
  }
}

inline std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

inline void print_table(std::ostream& out, const std::vector<std::string>& header,
                        const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = header[c].size();
    for (const auto& r : rows) width[c] = std::max(width[c], r[c].size());
  }
  auto line = [&](const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      s += c + 1 == cells.size() ? cells[c] : pad(cells[c], width[c] + 2);
    }
    out << s << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
}

inline void print_csv(std::ostream& out, const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) out << (c ? "," : "") << cells[c];
    out << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
}

inline void emit_rows(std::ostream& out, Format fmt, const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
  if (fmt == Format::csv) print_csv(out, header, rows);
  else print_table(out, header, rows);
}

// --- analyze -----------------------------------------------------------------

inline void run_analyze(const RunConfig& cfg, std::ostream& out) {
  const auto src = single_source(cfg);
  const auto& g = src.graph;
  const auto rep = analyze_structure(g);
  const Format fmt = cfg.format.value_or(Format::text);
  if (fmt == Format::json) {
    auto j = report::to_json(rep, g);
    out << j.dump(2) << '\n';
    return;
  }
  auto yes = [](bool b) { return std::string(b ? "true" : "false"); };
  std::string witness = "-";
  if (rep.witness) {
    witness.clear();
    for (Index i = 0; i < g.size(); ++i) {
      witness += (i ? " " : "") + g.label(i) + "->" + g.label((*rep.witness)[i]);
    }
  }
  std::string bad;
  for (const auto& [u, v] : rep.violating_edges) {
    bad += (bad.empty() ? "" : " ") + g.label(u) + "-" + g.label(v);
  }
  if (bad.empty()) bad = "-";
  const std::vector<std::vector<std::string>> rows = {
      {"connected", yes(rep.connected)},
      {"irreducible", yes(rep.connected)},
      {"bipartite", yes(rep.bipartite)},
      {"has_support", yes(rep.has_support)},
      {"has_total_support", yes(rep.has_total_support)},
      {"fully_indecomposable", yes(rep.fully_indecomposable)},
      {"witness", witness},
      {"violating_edges", bad},
  };
  emit_rows(out, fmt, {"property", "value"}, rows);
}

// --- power -------------------------------------------------------------------

inline void run_power(const RunConfig& cfg, std::ostream& out) {
  const auto src = single_source(cfg);
  const auto& g = src.graph;
  const auto [kind, alpha] = perturbation_of(cfg, Perturbation::none);
  const auto result = checked_power(g, kind, alpha, solver_config(cfg));
  const Format fmt = cfg.format.value_or(Format::text);

  MeasureVector mv{"power", result.power, {}, result.converged, result.outer_iterations,
                   result.matvecs, result.warning};
  std::vector<RankEntry> ranked;
  if (cfg.top) ranked = rank_table(g.labels(), {mv}, *cfg.top, kTieTolerance).front().top;

  if (fmt == Format::json) {
    auto j = report::to_json(result, g);
    j["perturbation"] = std::string(to_string(kind));
    j["alpha"] = alpha ? report::number(*alpha) : report::Json(nullptr);
    if (cfg.top) {
      report::Json top = report::Json::array();
      for (const auto& e : ranked) top.push_back({{"label", e.label}, {"value", report::number(e.value)}});
      j["top"] = top;
    }
    out << j.dump(2) << '\n';
    return;
  }
  std::vector<std::vector<std::string>> rows;
  if (cfg.top) {
    for (const auto& e : ranked) rows.push_back({e.label, report::format_number(e.value)});
  } else {
    for (Index i = 0; i < g.size(); ++i) rows.push_back({g.label(i), report::format_number(result.power[i])});
  }
  if (fmt == Format::text) {
    out << "method " << to_string(result.method) << '\n'
        << "perturbation " << to_string(kind);
    if (alpha) out << ' ' << report::format_number(*alpha);
    out << '\n'
        << "converged " << (result.converged ? "true" : "false") << '\n'
        << "residual " << report::format_number(result.residual) << '\n'
        << "outer_iterations " << result.outer_iterations << '\n'
        << "matvecs " << result.matvecs << '\n';
    if (!result.warning.empty()) out << "warning " << result.warning << '\n';
    out << '\n';
  }
  emit_rows(out, fmt, {"label", "power"}, rows);
}

// --- measures ----------------------------------------------------------------

// power, degree, centrality, bonacich, shapley, nash, in that order.
inline std::vector<MeasureVector> compute_measures(const Graph& g, const RunConfig& cfg) {
  std::vector<MeasureVector> all;
  const auto [kind, alpha] = perturbation_of(cfg, Perturbation::diagonal);
  const auto p = checked_power(g, kind, alpha, solver_config(cfg));
  MeasureVector power{"power", p.power, {}, p.converged, p.outer_iterations, p.matvecs, p.warning};
  if (alpha) power.params.emplace_back("alpha", *alpha);
  power.params.emplace_back("tol", cfg.tol);
  all.push_back(std::move(power));
  all.push_back(degree_centrality(g));
  {
    LinearOperator op(g);
    all.push_back(eigenvector_centrality(op, cfg.tol));
  }
  {
    LinearOperator op(g);
    const double r = spectral_radius(op).value;
    const double beta = r > 0.0 ? cfg.beta_fraction / r : 0.0;
    all.push_back(bonacich(g, cfg.bonacich_alpha, beta));
  }
  all.push_back(shapley_power(g));
  all.push_back(nash_power(g));
  return all;
}

inline void run_measures(const RunConfig& cfg, std::ostream& out) {
  const auto src = single_source(cfg);
  const auto& g = src.graph;
  const auto all = compute_measures(g, cfg);
  const Format fmt = cfg.format.value_or(Format::text);

  if (cfg.top) {
    const auto table = rank_table(g.labels(), all, *cfg.top, kTieTolerance);
    if (fmt == Format::json) {
      report::Json j;
      j["top"] = *cfg.top;
      report::Json cols = report::Json::array();
      for (const auto& col : table) {
        report::Json entries = report::Json::array();
        for (const auto& e : col.top) entries.push_back({{"label", e.label}, {"value", report::number(e.value)}});
        cols.push_back({{"name", col.name}, {"top", entries}});
      }
      j["rankings"] = cols;
      out << j.dump(2) << '\n';
      return;
    }
    std::vector<std::string> header{"rank"};
    for (const auto& col : table) {
      header.push_back(col.name);
      header.push_back(col.name + "_value");
    }
    std::vector<std::vector<std::string>> rows;
    for (std::size_t r = 0; r < *cfg.top; ++r) {
      std::vector<std::string> row{std::to_string(r + 1)};
      for (const auto& col : table) {
        row.push_back(col.top[r].label);
        row.push_back(report::format_number(col.top[r].value));
      }
      rows.push_back(std::move(row));
    }
    emit_rows(out, fmt, header, rows);
    return;
  }

  if (fmt == Format::json) {
    report::Json j;
    j["graph"] = src.name;
    report::Json ms = report::Json::array();
    for (const auto& m : all) ms.push_back(report::to_json(m, g));
    j["measures"] = ms;
    out << j.dump(2) << '\n';
    return;
  }
  std::vector<std::string> header{"label"};
  for (const auto& m : all) header.push_back(m.name);
  std::vector<std::vector<std::string>> rows;
  for (Index i = 0; i < g.size(); ++i) {
    std::vector<std::string> row{g.label(i)};
    for (const auto& m : all) row.push_back(report::format_number(m.values[i]));
    rows.push_back(std::move(row));
  }
  emit_rows(out, fmt, header, rows);
}

// --- compare -----------------------------------------------------------------

struct Comparison {
  CorrelationMatrix kendall;
  CorrelationMatrix pearson;
  CorrelationMatrix partial;  // given degree, degree itself excluded
};

inline Comparison compare_measures(const std::vector<MeasureVector>& all) {
  const auto& degree = all.at(1).values;
  std::vector<MeasureVector> controlled;
  for (const auto& m : all) {
    if (m.name != "degree") controlled.push_back(m);
  }
  return {correlation_matrix(all, CorrelationMethod::kendall, {}, kTieTolerance),
          correlation_matrix(all, CorrelationMethod::pearson),
          correlation_matrix(controlled, CorrelationMethod::partial_pearson_given_degree, degree)};
}

inline void run_compare(const RunConfig& cfg, std::ostream& out) {
  const auto src = single_source(cfg);
  const auto cmp = compare_measures(compute_measures(src.graph, cfg));
  const Format fmt = cfg.format.value_or(Format::text);
  if (fmt == Format::json) {
    report::Json j;
    j["graph"] = src.name;
    j["kendall"] = report::to_json(cmp.kendall);
    j["pearson"] = report::to_json(cmp.pearson);
    j["partial_given_degree"] = report::to_json(cmp.partial);
    out << j.dump(2) << '\n';
    return;
  }
  bool first = true;
  for (const auto* m : {&cmp.kendall, &cmp.pearson, &cmp.partial}) {
    if (!first) out << '\n';
    first = false;
    if (fmt == Format::csv) {
      report::write_csv(out, *m);
      continue;
    }
    std::vector<std::string> header{std::string(to_string(m->method))};
    header.insert(header.end(), m->names.begin(), m->names.end());
    std::vector<std::vector<std::string>> rows;
    for (std::size_t a = 0; a < m->names.size(); ++a) {
      std::vector<std::string> row{m->names[a]};
      for (double v : m->coefficients[a]) row.push_back(report::format_number(v));
      rows.push_back(std::move(row));
    }
    print_table(out, header, rows);
  }
}

// --- bench -------------------------------------------------------------------

struct BenchCell {
  bool defined = false;
  std::uint64_t matvecs = 0;
  bool converged = false;
};

struct BenchRow {
  std::string graph;
  Index n = 0;
  std::size_t edges = 0;
  std::array<BenchCell, 6> cells;  // PM, SK, SK-D, SK-F, NM, NM-D
};

inline const std::array<std::string, 6> kBenchColumns = {"PM", "SK", "SK-D", "SK-F", "NM", "NM-D"};

// Matvec counts for the fixed roster: power method, SK and Newton unperturbed
// (only when totally supported), SK/Newton with diagonal damping 0.15 and SK
// with full damping 0.01.
inline BenchRow bench_graph(const Source& src, double tol) {
  const auto& g = src.graph;
  BenchRow row{src.name, g.size(), g.edges().size(), {}};
  const bool solvable = has_total_support(g).totally_supported;
  SolverConfig sk;
  sk.tol = tol;
  SolverConfig nm = sk;
  nm.method = Method::newton;

  auto run = [&](std::size_t col, Perturbation kind, double alpha, const SolverConfig& s) {
    LinearOperator op(g, kind, alpha);
    try {
      const auto r = solve(op, s);
      row.cells[col] = {true, r.matvecs, r.converged};
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::divergence) throw;
      row.cells[col] = {true, op.matvecs(), false};
    }
  };
  {
    LinearOperator op(g);
    const auto pm = eigenvector_centrality(op, tol);
    row.cells[0] = {true, pm.matvecs, pm.converged};
  }
  if (solvable) run(1, Perturbation::none, 0.0, sk);
  run(2, Perturbation::diagonal, kDiagonalDefault, sk);
  run(3, Perturbation::full, kFullDefault, sk);
  if (solvable) run(4, Perturbation::none, 0.0, nm);
  run(5, Perturbation::diagonal, kDiagonalDefault, nm);
  return row;
}

inline void run_bench(const RunConfig& cfg, std::ostream& out) {
  const auto sources = load_sources(cfg);
  std::vector<std::future<BenchRow>> jobs;
  for (const auto& src : sources) {
    jobs.push_back(std::async(std::launch::async, [&src, tol = cfg.tol] { return bench_graph(src, tol); }));
  }
  std::vector<BenchRow> rows;
  for (auto& j : jobs) rows.push_back(j.get());

  const Format fmt = cfg.format.value_or(Format::csv);
  if (fmt == Format::json) {
    report::Json arr = report::Json::array();
    for (const auto& r : rows) {
      report::Json j;
      j["graph"] = r.graph;
      j["n"] = r.n;
      j["edges"] = r.edges;
      for (std::size_t c = 0; c < kBenchColumns.size(); ++c) {
        if (!r.cells[c].defined) {
          j[kBenchColumns[c]] = nullptr;
        } else {
          j[kBenchColumns[c]] = {{"matvecs", r.cells[c].matvecs}, {"converged", r.cells[c].converged}};
        }
      }
      arr.push_back(j);
    }
    report::Json j;
    j["tol"] = report::number(cfg.tol);
    j["rows"] = arr;
    out << j.dump(2) << '\n';
    return;
  }
  std::vector<std::string> header{"graph", "n", "edges"};
  header.insert(header.end(), kBenchColumns.begin(), kBenchColumns.end());
  std::vector<std::vector<std::string>> table;
  for (const auto& r : rows) {
    std::vector<std::string> line{r.graph, std::to_string(r.n), std::to_string(r.edges)};
    for (const auto& c : r.cells) line.push_back(c.defined ? std::to_string(c.matvecs) : "--");
    table.push_back(std::move(line));
  }
  emit_rows(out, fmt, header, table);
}

// --- entry point -------------------------------------------------------------

inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::io: return 3;
    case ErrorKind::parse:
    case ErrorKind::duplicate_edge:
    case ErrorKind::empty_input: return 4;
    case ErrorKind::structural: return 5;
    case ErrorKind::divergence:
    case ErrorKind::solver_breakdown: return 6;
    case ErrorKind::invalid_argument:
    case ErrorKind::length_mismatch: return 7;
  }
  return 1;
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"netpower: power, centrality and matrix balancing on networks", "netpower"};
  app.require_subcommand(1);
  RunConfig cfg;
  const std::map<std::string, Format> formats{
      {"json", Format::json}, {"csv", Format::csv}, {"text", Format::text}};

  auto common = [&](CLI::App* sub) {
    sub->add_option("--input", cfg.inputs, "Edge-list file (repeatable for bench)");
    sub->add_option("--format", cfg.format, "Output format: json|csv|text")
        ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
    sub->add_option("--generate", cfg.generate, "Random connected graph: N M SEED")
        ->expected(3);
    sub->add_option("--count", cfg.count, "Graphs to generate (seeds SEED, SEED+1, ...)")
        ->check(CLI::PositiveNumber);
  };
  auto solving = [&](CLI::App* sub) {
    sub->add_option("--perturb", cfg.perturb, "Perturbation: none|diag|full")
        ->check(CLI::IsMember({"none", "diag", "full"}));
    sub->add_option("--alpha", cfg.alpha, "Damping parameter (diag default 0.15, full 0.01)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--method", cfg.method, "Solver: sk|newton")->check(CLI::IsMember({"sk", "newton"}));
    sub->add_option("--tol", cfg.tol, "Balance residual tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--max-iter", cfg.max_iter, "Outer iteration cap");
    sub->add_flag("--force", cfg.force, "Solve even when no exact solution exists");
    sub->add_option("--top", cfg.top, "Show only the top K nodes");
  };

  auto* analyze = app.add_subcommand("analyze", "Structural existence and uniqueness verdicts");
  common(analyze);
  auto* power = app.add_subcommand("power", "Solve x = A x^-1");
  common(power);
  solving(power);
  auto* measures = app.add_subcommand("measures", "Power next to degree, centrality, Bonacich, Shapley, Nash");
  auto* compare = app.add_subcommand("compare", "Kendall, Pearson and partial correlation of the measures");
  for (auto* sub : {measures, compare}) {
    common(sub);
    solving(sub);
    sub->add_option("--bonacich-alpha", cfg.bonacich_alpha, "Bonacich alpha (default 1)");
    sub->add_option("--beta-fraction", cfg.beta_fraction, "Bonacich beta as a fraction of 1/r (default -0.85)")
        ->check(CLI::Range(-0.999999, 0.999999));
  }
  auto* bench = app.add_subcommand("bench", "Matvec counts for PM, SK, SK-D, SK-F, NM, NM-D");
  common(bench);
  bench->add_option("--tol", cfg.tol, "Convergence tolerance")->check(CLI::PositiveNumber);

  std::vector<std::string> argv_store{"netpower"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "netpower: error[usage]: " << e.what() << '\n';
    return 2;
  }

  try {
    if (!cfg.generate.empty() && (cfg.generate[0] < 2)) {
      throw Error(ErrorKind::invalid_argument, "--generate needs N >= 2");
    }
    std::ostringstream buffer;
    if (analyze->parsed()) {
      cfg.command = "analyze";
      run_analyze(cfg, buffer);
    } else if (power->parsed()) {
      cfg.command = "power";
      run_power(cfg, buffer);
    } else if (measures->parsed()) {
      cfg.command = "measures";
      run_measures(cfg, buffer);
    } else if (compare->parsed()) {
      cfg.command = "compare";
      run_compare(cfg, buffer);
    } else if (bench->parsed()) {
      cfg.command = "bench";
      run_bench(cfg, buffer);
    }
    out << buffer.str();
  } catch (const Error& e) {
    err << "netpower: error[" << to_string(e.kind()) << "]: " << e.what() << '\n';
    return exit_code(e.kind());
  }
  return 0;
}

}  // namespace netpower::cli
