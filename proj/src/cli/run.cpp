#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include "cli/model.hpp"
#include "thermoform/cli.hpp"
#include "thermoform/induced.hpp"
#include "thermoform/nonlinear.hpp"
#include "thermoform/pressure.hpp"

namespace thermoform::cli {

namespace {

std::string num(double x) { return format_number(x); }
std::string integer(long long x) { return std::to_string(x); }

std::size_t cap_of(const RunConfig& c) { return c.parameters.cap.value_or(default_enumeration_cap()); }

int default_q(const Potential& phi, const Potential& psi) { return std::max(phi.range(), psi.range()); }

NonlinearSearchOptions search_options(const RunConfig& c) {
  NonlinearSearchOptions o;
  o.search.restarts = c.parameters.restarts;
  o.search.seed = c.parameters.seed;
  o.heuristic = c.parameters.heuristic;
  return o;
}

PotentialVector components(const RunConfig& c, const Model& m) {
  std::vector<Potential> parts;
  for (const auto& name : c.parameters.components) parts.push_back(m.potentials.at(name));
  return PotentialVector(std::move(parts));
}

RunResult run_pressure(const RunConfig& c, const Model& m) {
  const Potential& phi = m.potentials.at(c.parameters.phi);
  RunResult r;
  r.table.header = {"potential", "method", "n", "value"};
  r.table.rows.push_back({c.parameters.phi, "spectral", "", num(topological_pressure(m.sft, phi))});
  if (c.parameters.n) {
    const auto est = cylinder_pressure_estimate(m.sft, phi, *c.parameters.n, cap_of(c));
    r.table.rows.push_back({c.parameters.phi, "cylinder", integer(*c.parameters.n), num(est.value)});
  }
  return r;
}

RunResult run_induced(const RunConfig& c, const Model& m) {
  const InducedProblem problem(m.potentials.at(c.parameters.phi), m.potentials.at(c.parameters.psi));
  RunResult r;
  r.table.header = {"method", "T", "q", "value"};
  r.table.rows.push_back({"root", "", "", num(bowen_root(problem).value)});
  if (c.parameters.T) {
    const int q = c.parameters.q.value_or(default_q(problem.phi(), problem.psi()));
    const auto est = direct_induced_estimate(problem, *c.parameters.T, q, cap_of(c));
    r.table.rows.push_back({"direct", num(*c.parameters.T), integer(q), num(est.value)});
  }
  return r;
}

RunResult run_nonlinear(const RunConfig& c, const Model& m) {
  const auto phi = components(c, m);
  RunResult r;
  r.table.header = {"method", "n", "value"};
  const auto var = nonlinear_variational(phi, *m.functional, search_options(c));
  r.table.rows.push_back({var.heuristic ? "variational (heuristic)" : "variational", "", num(var.value)});
  if (c.parameters.n) {
    const auto est = nonlinear_direct(phi, *m.functional, *c.parameters.n, cap_of(c));
    r.table.rows.push_back({"direct", integer(*c.parameters.n), num(est.value)});
  }
  return r;
}

RunResult run_nonlinear_induced(const RunConfig& c, const Model& m) {
  const auto phi = components(c, m);
  const Potential& psi = m.potentials.at(c.parameters.psi);
  RunResult r;
  r.table.header = {"method", "T", "q", "value"};
  const auto root = nonlinear_induced_root(phi, psi, *m.functional, search_options(c));
  r.table.rows.push_back({"root", "", "", num(root.value)});
  if (c.parameters.T) {
    const int q = c.parameters.q.value_or(std::max(phi.max_range(), psi.range()));
    const auto est = nonlinear_induced_direct(phi, psi, *m.functional, *c.parameters.T, q, cap_of(c));
    r.table.rows.push_back({"direct", num(*c.parameters.T), integer(q), num(est.value)});
  }
  return r;
}

RunResult run_freeze_sweep(const RunConfig& c, const Model& m) {
  const auto sweep = beta_sweep(m.potentials.at(c.parameters.phi), m.potentials.at(c.parameters.psi),
                                *c.parameters.beta_grid);
  RunResult r;
  r.table.header = {"beta", "pressure", "ratio", "scaled_entropy", "asymptote", "gap"};
  for (std::size_t i = 0; i < sweep.betas.size(); ++i)
    r.table.rows.push_back({num(sweep.betas[i]), num(sweep.pressures[i]), num(sweep.ratios[i]),
                            num(sweep.scaled_entropies[i]), num(sweep.betas[i] * sweep.max_ratio + sweep.h_inf),
                            num(sweep.gaps[i])});
  const auto verdict = detect_freezing(sweep, c.parameters.tolerances.at("freezing"));
  std::string line = "verdict: " + to_string(verdict.kind);
  if (verdict.kind == FreezingVerdict::Kind::Frozen) line += " at beta " + num(verdict.beta0);
  if (!verdict.reason.empty()) line += " (" + verdict.reason + ")";
  r.notes.push_back(line);
  r.notes.push_back("max ratio " + num(sweep.max_ratio) + ", h_inf " + num(sweep.h_inf));
  r.sweep = sweep;
  return r;
}

RunResult run_zero_temp(const RunConfig& c, const Model& m) {
  const auto schedule = c.parameters.beta_grid.value_or(default_beta_schedule());
  const auto rep = zero_temperature_limit(m.potentials.at(c.parameters.phi), m.potentials.at(c.parameters.psi),
                                          schedule, c.parameters.test_depth);
  // Words live on the block shift when the potentials have range > 1.
  const int k = InducedProblem(m.potentials.at(c.parameters.phi), m.potentials.at(c.parameters.psi))
                    .canonical()
                    .sft.alphabet_size();
  RunResult r;
  r.table.header = {"beta", "ratio", "ratio_error", "cauchy"};
  for (const auto& w : rep.words) r.table.header.push_back("mass_" + word_to_string(w, k));
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const auto& row = rep.rows[i];
    std::vector<std::string> fields{num(row.beta), num(row.ratio), num(row.ratio_error),
                                    i == 0 ? "" : num(rep.cauchy[i - 1])};
    for (double x : row.masses) fields.push_back(num(x));
    r.table.rows.push_back(std::move(fields));
  }
  r.notes.push_back("max ratio " + num(rep.max_ratio) + (rep.ratio_converged ? ", ratio converged" : ", ratio not converged"));
  return r;
}

RunResult run_max_ratio(const RunConfig& c, const Model& m) {
  const Potential& phi = m.potentials.at(c.parameters.phi);
  const Potential& psi = m.potentials.at(c.parameters.psi);
  const auto max = max_cycle_ratio(phi, psi);
  const auto h = h_infinity(phi, psi, max);
  RunResult r;
  r.table.header = {"max_ratio", "witness", "period", "h_infinity", "h_infinity_exact", "subgraph_full"};
  const int k = InducedProblem(phi, psi).canonical().sft.alphabet_size();
  r.table.rows.push_back({num(max.value), max.witness.to_string(k), integer(max.witness.period()), num(h.value),
                          h.exact ? "true" : "false", max.full ? "true" : "false"});
  return r;
}

RunResult run_estimate(const RunConfig& c, const Model& m) {
  const Potential& phi = m.potentials.at(c.parameters.phi);
  const double exact = topological_pressure(m.sft, phi);
  RunResult r;
  r.table.header = {"n", "estimate", "spectral", "error"};
  for (int n = std::max(1, phi.range()); n <= *c.parameters.n; ++n) {
    const double est = cylinder_pressure_estimate(m.sft, phi, n, cap_of(c)).value;
    r.table.rows.push_back({integer(n), num(est), num(exact), num(est - exact)});
  }
  return r;
}

// ---------------------------------------------------------------------------
// verify

struct Fixture {
  std::string name;
  Potential phi;
  Potential psi;
};

std::vector<Fixture> verify_fixtures(const RunConfig& c) {
  auto values = [](const Sft& s, std::vector<double> v) { return Potential::from_symbol_values(s, std::move(v)); };
  const Sft full2 = fixtures::full2(), golden = fixtures::golden(), cycle2 = fixtures::cycle2();
  std::vector<Fixture> out{
      {"full2", values(full2, {0.5, -0.3}), values(full2, {1.0, 2.0})},
      {"golden", values(golden, {0.2, -0.4}), values(golden, {1.0, 1.5})},
      {"cycle2", values(cycle2, {0.3, 0.0}), values(cycle2, {1.0, 2.0})},
  };
  if (c.system && c.potentials.contains(c.parameters.phi) && c.potentials.contains(c.parameters.psi)) {
    RunConfig probe = c;
    probe.command = "induced";
    const Model m = build_model(probe);
    out.push_back({"config", m.potentials.at(c.parameters.phi), m.potentials.at(c.parameters.psi)});
  }
  return out;
}

class Verifier {
 public:
  explicit Verifier(RunResult& result) : r_(result) {
    r_.table.header = {"suite", "fixture", "case", "trials", "failures", "worst", "status"};
  }

  void add(const std::string& suite, const std::string& fixture, const std::string& name, int trials, int failures,
           double worst) {
    const bool ok = failures == 0;
    r_.table.rows.push_back({suite, fixture, name, integer(trials), integer(failures), num(worst), ok ? "pass" : "FAIL"});
    if (!ok) {
      r_.verified = false;
      r_.notes.push_back("failed: " + suite + " / " + fixture + " / " + name);
    }
  }

  // One trial comparing two numbers.
  void compare(const std::string& suite, const std::string& fixture, const std::string& name, double a, double b,
               double tol) {
    const double d = std::abs(a - b);
    add(suite, fixture, name, 1, d <= tol ? 0 : 1, d);
  }

 private:
  RunResult& r_;
};

RunResult run_verify(const RunConfig& c) {
  const auto& tol = c.parameters.tolerances;
  const std::uint64_t seed = c.parameters.seed;
  RunResult r;
  Verifier v(r);

  for (const auto& fx : verify_fixtures(c)) {
    const InducedProblem problem(fx.phi, fx.psi, fx.name);
    const Sft& sft = fx.phi.sft();

    for (const auto& pc : induced_property_suite(problem, seed, {tol.at("identity"), tol.at("inequality")}).cases)
      v.add("induced properties", fx.name, pc.name, pc.trials, pc.failures, pc.worst);

    const auto tangent = tangent_check(problem, induced_equilibrium(problem), seed, 32);
    int misses = 0;
    double worst = 0.0;
    for (const auto& tc : tangent.cases) {
      const double shortfall = tc.ratio - tc.pressure_gain;
      worst = std::max(worst, shortfall);
      if (shortfall > tol.at("inequality")) ++misses;
    }
    v.add("tangent functional", fx.name, "equilibrium is tangent", static_cast<int>(tangent.cases.size()), misses, worst);

    // Classical and induced values under conjugacies.
    std::vector<Symbol> perm(static_cast<std::size_t>(sft.alphabet_size()));
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<Symbol>(perm.size() - 1 - i);
    const auto permuted = permute_symbols(sft, {fx.phi, fx.psi}, perm);
    const auto recoded = higher_block_recode(sft, {fx.phi, fx.psi}, 2);
    const double classical = topological_pressure(sft, fx.phi);
    const double root = bowen_root(problem).value;
    v.compare("conjugacy", fx.name, "classical, permutation", classical,
              topological_pressure(permuted.sft, permuted.potentials[0]), tol.at("permutation"));
    v.compare("conjugacy", fx.name, "classical, 2-block recoding", classical,
              topological_pressure(recoded.sft, recoded.potentials[0]), tol.at("recoding"));
    v.compare("conjugacy", fx.name, "induced, permutation", root,
              bowen_root(InducedProblem(permuted.potentials[0], permuted.potentials[1])).value, tol.at("permutation"));
    v.compare("conjugacy", fx.name, "induced, 2-block recoding", root,
              bowen_root(InducedProblem(recoded.potentials[0], recoded.potentials[1])).value, tol.at("recoding"));
    const auto linear = NonlinearFunctional::linear({1.0});
    for (const auto& cc : conjugacy_invariance_check(PotentialVector({fx.phi}), fx.psi, linear, seed).cases) {
      const bool recoding = cc.name.find("recoding") != std::string::npos;
      v.compare("conjugacy", fx.name, cc.name, cc.before, cc.after,
                recoding ? tol.at("recoding") : std::max(cc.tolerance, tol.at("permutation")));
    }

    // Linear F must reproduce the classical cylinder sum exactly.
    const int n = 8;
    const double classical_n = cylinder_pressure_estimate(sft, fx.phi, n).value;
    const double nonlinear_n = nonlinear_direct(PotentialVector({fx.phi}), linear, n).value;
    v.add("nonlinear", fx.name, "linear F collapses to classical", 1, classical_n == nonlinear_n ? 0 : 1,
          std::abs(classical_n - nonlinear_n));

    // Karp against every simple cycle.
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0), w(0.5, 2.0);
    const auto cycles = enumerate_simple_cycles(sft, sft.alphabet_size());
    int karp_fail = 0;
    double karp_worst = 0.0;
    const int pairs = 10;
    for (int t = 0; t < pairs; ++t) {
      std::vector<double> a(perm.size()), b(perm.size());
      for (auto& x : a) x = u(rng);
      for (auto& x : b) x = w(rng);
      const auto phi = Potential::from_symbol_values(sft, a), psi = Potential::from_symbol_values(sft, b);
      double brute = -std::numeric_limits<double>::infinity();
      for (const auto& cyc : cycles) brute = std::max(brute, periodic_birkhoff(phi, cyc) / periodic_birkhoff(psi, cyc));
      const double d = std::abs(max_cycle_ratio(phi, psi).value - brute);
      karp_worst = std::max(karp_worst, d);
      if (d > tol.at("karp")) ++karp_fail;
    }
    v.add("max cycle ratio", fx.name, "Karp against cycle enumeration", pairs, karp_fail, karp_worst);

    const auto diff = differentiability_check(fx.phi, fx.psi, c.parameters.beta0);
    v.add("freezing", fx.name, "derivative equals equilibrium ratio", 1, diff.difference <= tol.at("derivative") ? 0 : 1,
          diff.difference);
  }

  // Closed forms on the full 2-shift.
  const Sft full2 = fixtures::full2();
  const auto phi10 = Potential::from_symbol_values(full2, {1.0, 0.0});
  const auto one = Potential::constant(full2, 1.0);
  v.compare("closed form", "full2", "Bowen root for psi = (1,2) is log golden ratio",
            bowen_root(InducedProblem(Potential::constant(full2, 0.0), Potential::from_symbol_values(full2, {1.0, 2.0})))
                .value,
            std::log(std::numbers::phi), tol.at("root"));

  std::vector<double> betas;
  for (int b = 1; b <= 12; ++b) betas.push_back(b);
  const auto sweep = beta_sweep(phi10, one, betas);
  int gap_fail = 0;
  double gap_worst = 0.0;
  for (std::size_t i = 0; i < betas.size(); ++i) {
    const double d = std::abs(sweep.gaps[i] - std::log1p(std::exp(-betas[i])));
    gap_worst = std::max(gap_worst, d);
    if (d > tol.at("gap")) ++gap_fail;
  }
  v.add("closed form", "full2", "gap is log(1 + exp(-beta))", static_cast<int>(betas.size()), gap_fail, gap_worst);
  const auto kind = detect_freezing(sweep, tol.at("freezing")).kind;
  v.add("freezing", "full2", "phi = (1,0) is asymptotic", 1, kind == FreezingVerdict::Kind::Asymptotic ? 0 : 1, 0.0);
  const auto constant = detect_freezing(beta_sweep(Potential::constant(full2, 0.7), one, betas), tol.at("freezing"));
  v.add("freezing", "full2", "constant phi freezes at once", 1,
        constant.kind == FreezingVerdict::Kind::Frozen && constant.beta0 == betas.front() ? 0 : 1, 0.0);
  const Sft cycle2 = fixtures::cycle2();
  const auto zero_entropy = detect_freezing(
      beta_sweep(Potential::from_symbol_values(cycle2, {0.3, 0.0}), Potential::from_symbol_values(cycle2, {1.0, 2.0}), betas),
      tol.at("freezing"));
  v.add("freezing", "cycle2", "zero entropy freezes at once", 1,
        zero_entropy.kind == FreezingVerdict::Kind::Frozen && zero_entropy.beta0 == betas.front() ? 0 : 1, 0.0);

  std::size_t failed = 0;
  for (const auto& row : r.table.rows) failed += row.back() == "FAIL";
  r.notes.push_back(std::to_string(r.table.rows.size() - failed) + " of " + std::to_string(r.table.rows.size()) +
                    " checks passed");
  return r;
}

int exit_code_for(ErrorCode code) {
  return code == ErrorCode::SchemaError || code == ErrorCode::ValidationError ? 1 : 2;
}

}  // namespace

RunResult compute(const RunConfig& c) {
  if (c.command == "verify") return run_verify(c);
  const Model m = build_model(c);
  if (c.command == "pressure") return run_pressure(c, m);
  if (c.command == "induced") return run_induced(c, m);
  if (c.command == "nonlinear") return run_nonlinear(c, m);
  if (c.command == "nonlinear-induced") return run_nonlinear_induced(c, m);
  if (c.command == "freeze-sweep") return run_freeze_sweep(c, m);
  if (c.command == "zero-temp") return run_zero_temp(c, m);
  if (c.command == "max-ratio") return run_max_ratio(c, m);
  if (c.command == "estimate") return run_estimate(c, m);
  throw Error(ErrorCode::SchemaError, "command: unknown command '" + c.command + "'");
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const RunResult r = compute(config);
    // Render everything before touching the file system.
    const std::string csv = to_csv(r.table);
    std::string svg;
    if (!config.output.svg_path.empty()) {
      if (!r.sweep) throw Error(ErrorCode::ValidationError, "output.svg_path: only freeze-sweep draws a plot");
      svg = render_sweep_svg(*r.sweep);
    }
    if (config.output.csv_path.empty()) {
      out << csv;
    } else {
      std::ofstream file(config.output.csv_path, std::ios::binary | std::ios::trunc);
      if (!file) throw Error(ErrorCode::IoError, "cannot open '" + config.output.csv_path + "' for writing");
      file << csv;
      if (!file.flush()) throw Error(ErrorCode::IoError, "failed writing '" + config.output.csv_path + "'");
    }
    if (!svg.empty()) write_sweep_svg(*r.sweep, config.output.svg_path);
    for (const auto& note : r.notes) err << "thermoform: " << note << '\n';
    if (!r.verified) {
      err << "thermoform: verification failed\n";
      return 2;
    }
    return 0;
  } catch (const Error& e) {
    err << "thermoform: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "thermoform: " << e.what() << '\n';
    return 2;
  }
}

int execute(const Invocation& inv, std::ostream& out, std::ostream& err) {
  std::string text;
  {
    std::ifstream file(inv.config_path, std::ios::binary);
    if (!file) {
      err << "thermoform: cannot read config '" << inv.config_path << "'\n";
      return 1;
    }
    std::ostringstream ss;
    ss << file.rdbuf();
    text = ss.str();
  }
  RunConfig config;
  try {
    config = parse_config(text, inv.command);
    if (inv.csv_path) config.output.csv_path = *inv.csv_path;
    if (inv.svg_path) {
      if (config.command != "freeze-sweep")
        throw Error(ErrorCode::SchemaError, "--svg: only freeze-sweep draws a plot");
      config.output.svg_path = *inv.svg_path;
    }
    if (inv.seed) config.parameters.seed = *inv.seed;
  } catch (const Error& e) {
    err << "thermoform: " << e.what() << '\n';
    return exit_code_for(e.code());
  }
  return run(config, out, err);
}

}  // namespace thermoform::cli
