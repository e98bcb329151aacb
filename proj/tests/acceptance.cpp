// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "netpower/cli.hpp"
#include "netpower/netpower.hpp"

using namespace netpower;
namespace gen = netpower::generators;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) detail = what;
    ok = ok && cond;
  }
};

SolverConfig config(Method m, double tol = 1e-8) {
  SolverConfig cfg;
  cfg.method = m;
  cfg.tol = tol;
  return cfg;
}

double rel_diff(const Vector& a, const Vector& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]) / std::max(std::abs(a[i]), std::abs(b[i])));
  }
  return worst;
}

std::string fmt(double v) { return report::format_number(v); }

// Random graph with independent edges (and optional loops); may be disconnected.
Graph random_small(std::size_t n, double p, double loop_p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Edge> edges;
  for (Index i = 0; i < n; ++i) {
    if (u(rng) < loop_p) edges.push_back({i, i, 1.0});
    for (Index j = i + 1; j < n; ++j) {
      if (u(rng) < p) edges.push_back({i, j, 1.0});
    }
  }
  return Graph(gen::default_labels(n), std::move(edges));
}

// Seeds s, s+1, ... of G(n, m) conditioned on connectivity and total support.
std::vector<Graph> totally_supported(std::size_t count, Index n, std::size_t m, std::uint64_t seed) {
  std::vector<Graph> out;
  for (; out.size() < count; ++seed) {
    auto g = gen::random_connected(n, m, seed);
    if (has_total_support(g).totally_supported) out.push_back(std::move(g));
  }
  return out;
}

Check exact_fixed_points() {
  Check c;
  const auto g = gen::complete(3);
  for (auto m : {Method::sinkhorn_knopp, Method::newton}) {
    LinearOperator op(g);
    const auto r = solve(op, config(m));
    LinearOperator check(g);
    const double res = balance_residual(check, r.power);
    for (double v : r.power) c.require(std::abs(v - std::sqrt(2.0)) <= 1e-8, "value " + fmt(v));
    c.require(res <= 1e-8, "residual " + fmt(res));
  }
  return c;
}

Check scaled_matrix_is_doubly_stochastic() {
  Check c;
  double worst = 0.0;
  for (std::uint64_t k = 0; k < 50; ++k) {
    const Index n = 20 + (k * 37) % 181;
    const auto g = gen::random_connected(n, 3 * n, 4000 + k);
    LinearOperator op(g, Perturbation::diagonal, 0.15);
    const auto r = solve(op, config(Method::sinkhorn_knopp));
    c.require(r.converged, "unconverged on graph " + std::to_string(k));
    // Row sums of D (A + 0.15 I) D straight from the edge list; equal to the
    // column sums by symmetry of the stored entries.
    Vector rows(n, 0.0), cols(n, 0.0);
    for (Index i = 0; i < n; ++i) {
      rows[i] += 0.15 / (r.power[i] * r.power[i]);
      cols[i] += 0.15 / (r.power[i] * r.power[i]);
    }
    for (const auto& e : g.edges()) {
      const double s = e.weight / (r.power[e.u] * r.power[e.v]);
      rows[e.u] += s;
      cols[e.v] += s;
      if (e.u != e.v) {
        rows[e.v] += s;
        cols[e.u] += s;
      }
    }
    for (Index i = 0; i < n; ++i) {
      worst = std::max({worst, std::abs(rows[i] - 1.0), std::abs(cols[i] - 1.0)});
    }
  }
  c.require(worst <= 1e-7, "worst sum error " + fmt(worst));
  c.detail = c.ok ? "worst sum error " + fmt(worst) : c.detail;
  return c;
}

Check structure_matches_oracle() {
  Check c;
  for (std::uint64_t k = 0; k < 200; ++k) {
    const auto g = random_small(1 + k % 8, 0.15 + 0.1 * static_cast<double>(k % 6), k % 3 ? 0.25 : 0.0, 1000 + k);
    c.require(has_support(g).supported == brute_force_support(g, SupportMode::support),
              "support mismatch on graph " + std::to_string(k));
    c.require(has_total_support(g).totally_supported == brute_force_support(g, SupportMode::total),
              "total support mismatch on graph " + std::to_string(k));
  }
  const auto star = analyze_structure(gen::star(3));
  c.require(!star.has_support, "star has support");
  const auto p4 = analyze_structure(gen::path(4));
  c.require(p4.has_support && !p4.has_total_support, "P4 verdicts");
  const auto tpe = analyze_structure(gen::disjoint_union(gen::complete(3), gen::path(2)));
  c.require(tpe.has_total_support && !tpe.connected, "triangle plus edge verdicts");
  const auto k3 = analyze_structure(gen::complete(3));
  c.require(k3.fully_indecomposable, "K3 not fully indecomposable");
  return c;
}

Check existence_gate() {
  Check c;
  const auto g = gen::star(3);
  {
    LinearOperator op(g);
    auto cfg = config(Method::sinkhorn_knopp);
    try {
      const auto r = solve(op, cfg);
      c.require(!r.converged, "unperturbed star converged");
    } catch (const Error& e) {
      c.require(e.kind() == ErrorKind::divergence, "unexpected error kind");
    }
  }
  for (double alpha : {0.05, 0.15, 0.5}) {
    for (auto m : {Method::sinkhorn_knopp, Method::newton}) {
      LinearOperator op(g, Perturbation::diagonal, alpha);
      const auto r = solve(op, config(m));
      c.require(r.converged, std::string(to_string(m)) + " unconverged at alpha " + fmt(alpha));
    }
  }
  return c;
}

Check path_benchmarks() {
  Check c;
  auto power = [](Index n) {
    return compute_power(gen::path(n), Perturbation::diagonal, 0.15, config(Method::sinkhorn_knopp)).power;
  };
  const auto p3 = power(3), p4 = power(4), p5 = power(5);
  auto tie = [](double a, double b) { return std::abs(a - b) <= 1e-9; };
  c.require(p3[1] > p3[0] && tie(p3[0], p3[2]), "P3 ranking");
  c.require(tie(p4[1], p4[2]) && tie(p4[0], p4[3]) && p4[1] > p4[0], "P4 ranking");
  c.require(p4[1] < p3[1], "power(B|P4) >= power(B|P3)");
  c.require(tie(p5[1], p5[3]) && tie(p5[0], p5[4]) && p5[1] > p5[2] && p5[2] > p5[0], "P5 ranking");
  c.require(p5[1] > p4[1], "power(B|P5) <= power(B|P4)");
  const auto path5 = gen::path(5);
  LinearOperator op(path5);
  const auto cent = eigenvector_centrality(op).values;
  c.require(std::max_element(cent.begin(), cent.end()) - cent.begin() == 2, "centrality argmax on P5");
  return c;
}

Check nash_fixpoints() {
  Check c;
  const std::vector<std::pair<Index, Vector>> cases = {{3, {0, 1, 0}}, {5, {0, 1, 0, 1, 0}}, {2, {0.5, 0.5}}};
  for (const auto& [n, expected] : cases) {
    double identity = 0.0;
    const auto g = gen::path(n);
    const auto r = nash_dynamics(g, 1e-9, 100'000, NashSurplusRule::split, [&](const NashState& st) {
      for (std::size_t a = 0; a < st.arcs.size(); ++a) {
        identity = std::max(identity, std::abs(st.revenue[a] + st.revenue[st.mirror[a]] - 1.0));
      }
    });
    c.require(r.measure.converged, "P" + std::to_string(n) + " unconverged");
    for (Index i = 0; i < n; ++i) {
      c.require(std::abs(r.measure.values[i] - expected[i]) <= 1e-6, "P" + std::to_string(n) + " fixpoint");
    }
    c.require(identity <= 1e-12, "pair identity off by " + fmt(identity));
  }
  return c;
}

Check shapley_is_second_iterate() {
  Check c;
  for (std::uint64_t k = 0; k < 100; ++k) {
    const Index n = 5 + k % 60;
    const auto g = gen::random_connected(n, n + k % (2 * n), 7000 + k);
    LinearOperator op(g);
    c.require(shapley_power(g).values == sinkhorn_iterate(op, 2), "mismatch on graph " + std::to_string(k));
  }
  return c;
}

Check bonacich_newton_identity() {
  Check c;
  std::size_t pairs = 0;
  double worst = 0.0;
  for (std::uint64_t k = 0; k < 20; ++k) {
    const auto g = gen::random_connected(20 + k * 3, 45 + k * 7, 500 + k);
    LinearOperator op(g);
    const double r = spectral_radius(op).value;
    for (double gamma : {0.1, 0.3, 0.5}) {
      if (!(gamma * gamma * r < 1.0)) continue;
      const auto [newton, bona] = bonacich_newton_identity_check(g, gamma);
      worst = std::max(worst, rel_diff(newton, bona));
      ++pairs;
    }
    const auto zero = bonacich(g, 1.3, 0.0).values;
    const auto d = degrees(g);
    for (Index i = 0; i < g.size(); ++i) c.require(zero[i] == 1.3 * d[i], "beta = 0 is not alpha * degree");
  }
  c.require(worst <= 1e-9, "worst relative gap " + fmt(worst));
  c.require(pairs >= 40, "only " + std::to_string(pairs) + " (graph, gamma) pairs tested");
  if (c.ok) c.detail = std::to_string(pairs) + " pairs, worst relative gap " + fmt(worst);
  return c;
}

Check efficiency_ordering() {
  Check c;
  std::ostringstream table;
  for (const auto& g : totally_supported(10, 100, 300, 1)) {
    auto count = [&](Perturbation kind, double alpha, Method m) {
      LinearOperator op(g, kind, alpha);
      const auto r = solve(op, config(m));
      c.require(r.converged, "solver unconverged");
      return r.matvecs;
    };
    LinearOperator pm_op(g);
    const auto pm = eigenvector_centrality(pm_op);
    c.require(pm.converged, "power method unconverged");
    const auto sk = count(Perturbation::none, 0.0, Method::sinkhorn_knopp);
    const auto skf = count(Perturbation::full, 0.01, Method::sinkhorn_knopp);
    const auto nm = count(Perturbation::none, 0.0, Method::newton);
    const auto nmd = count(Perturbation::diagonal, 0.15, Method::newton);
    c.require(skf < sk, "SK-F >= SK");
    c.require(nm < sk, "NM >= SK");
    c.require(static_cast<double>(nmd) <= 1.2 * static_cast<double>(nm), "NM-D > 1.2 NM");
    const double ratio = static_cast<double>(pm.matvecs) / static_cast<double>(skf);
    c.require(ratio >= 0.1 && ratio <= 10.0, "PM and SK-F differ by more than 10x");
    table << ' ' << pm.matvecs << '/' << sk << '/' << skf << '/' << nm << '/' << nmd;
  }
  if (c.ok) c.detail = "PM/SK/SK-F/NM/NM-D:" + table.str();
  return c;
}

Check quality_curve() {
  Check c;
  const auto g = totally_supported(1, 60, 180, 1).front();
  const auto base = compute_power(g, Perturbation::none, std::nullopt, config(Method::sinkhorn_knopp, 1e-10));
  c.require(base.converged, "unperturbed solve unconverged");
  double previous = 1.0;
  std::ostringstream curve;
  for (double alpha : {0.01, 0.1, 0.5, 1.0}) {
    const auto diag = compute_power(g, Perturbation::diagonal, alpha, config(Method::sinkhorn_knopp, 1e-10));
    const auto full = compute_power(g, Perturbation::full, alpha, config(Method::sinkhorn_knopp, 1e-10));
    const double rd = pearson(base.power, diag.power);
    const double rf = pearson(base.power, full.power);
    if (alpha == 0.01) c.require(rd >= 0.99, "diagonal correlation " + fmt(rd) + " at 0.01");
    c.require(rd <= previous + 0.02, "curve increases at alpha " + fmt(alpha));
    c.require(rd >= rf, "full beats diagonal at alpha " + fmt(alpha));
    previous = rd;
    curve << ' ' << fmt(alpha) << ':' << report::format_number(std::round(rd * 1e4) / 1e4) << '/'
          << report::format_number(std::round(rf * 1e4) / 1e4);
  }
  if (c.ok) c.detail = "alpha:diag/full" + curve.str();
  return c;
}

Check novelty_signs() {
  Check c;
  int negative_partial = 0;
  for (std::uint64_t k = 0; k < 20; ++k) {
    const auto g = gen::random_connected(80, 240, 100 + k);
    const auto p = compute_power(g, Perturbation::diagonal, 0.15, config(Method::sinkhorn_knopp)).power;
    const auto d = degrees(g);
    const auto s = shapley_power(g).values;
    LinearOperator op(g);
    const double r = spectral_radius(op).value;
    const auto b = bonacich(g, 1.0, -0.85 / r).values;
    LinearOperator cop(g);
    const auto cent = eigenvector_centrality(cop).values;
    const std::string at = " on graph " + std::to_string(k);
    c.require(kendall_tau(p, d, KendallVariant::b, 1e-9) > 0.0, "tau(P, D) <= 0" + at);
    c.require(kendall_tau(p, s, KendallVariant::b, 1e-9) > 0.0, "tau(P, S) <= 0" + at);
    c.require(kendall_tau(p, b, KendallVariant::b, 1e-9) > 0.0, "tau(P, B) <= 0" + at);
    negative_partial += partial_correlation(p, cent, d) < 0.0;
  }
  c.require(negative_partial >= 18, std::to_string(negative_partial) + "/20 negative partials");
  if (c.ok) c.detail = std::to_string(negative_partial) + "/20 negative partial(P, C | D)";
  return c;
}

Check cli_determinism() {
  Check c;
  const std::string dir = NETPOWER_DATA_DIR;
  const std::vector<std::vector<std::string>> commands = {
      {"analyze", "--input", dir + "/p4.txt"},
      {"power", "--input", dir + "/p5.txt", "--perturb", "diag"},
      {"power", "--input", dir + "/weighted.txt", "--method", "newton"},
      {"measures", "--input", dir + "/p5.txt"},
      {"measures", "--generate", "50", "120", "9", "--top", "5"},
      {"compare", "--generate", "50", "120", "9"},
      {"bench", "--generate", "80", "200", "3", "--count", "3"},
  };
  std::size_t runs = 0;
  for (const auto& base : commands) {
    for (const char* format : {"text", "csv", "json"}) {
      auto args = base;
      args.insert(args.end(), {"--format", format});
      std::ostringstream a, b, ea, eb;
      const int ca = cli::run(args, a, ea);
      const int cb = cli::run(args, b, eb);
      c.require(ca == 0, base.front() + " failed: " + ea.str());
      c.require(ca == cb && a.str() == b.str() && !a.str().empty(), base.front() + " output differs");
      ++runs;
    }
  }
  if (c.ok) c.detail = std::to_string(runs) + " command/format pairs byte-identical";
  return c;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Check()> run;
    double limit_seconds;  // 0: no limit
  };
  const std::vector<Criterion> criteria = {
      {"exact fixed points on K3", exact_fixed_points, 1.0},
      {"scaled matrix doubly stochastic", scaled_matrix_is_doubly_stochastic, 30.0},
      {"structure agrees with brute force", structure_matches_oracle, 30.0},
      {"existence gate on the star", existence_gate, 0.0},
      {"path benchmarks", path_benchmarks, 0.0},
      {"nash fixpoints", nash_fixpoints, 0.0},
      {"shapley equals second SK iterate", shapley_is_second_iterate, 0.0},
      {"bonacich/newton identity", bonacich_newton_identity, 0.0},
      {"efficiency ordering", efficiency_ordering, 60.0},
      {"quality curve", quality_curve, 0.0},
      {"novelty signs", novelty_signs, 0.0},
      {"cli determinism", cli_determinism, 0.0},
  };
  int failed = 0;
  int index = 0;
  for (const auto& cr : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    Check c;
    try {
      c = cr.run();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail = std::string("exception: ") + e.what();
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (cr.limit_seconds > 0.0 && seconds >= cr.limit_seconds) {
      c.ok = false;
      c.detail = "took " + fmt(seconds) + " s, limit " + fmt(cr.limit_seconds) + " s";
    }
    failed += !c.ok;
    std::printf("%s %2d %-36s %.3fs%s%s\n", c.ok ? "PASS" : "FAIL", index, cr.name, seconds,
                c.detail.empty() ? "" : "  ", c.detail.c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
