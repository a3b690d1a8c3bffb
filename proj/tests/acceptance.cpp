// Acceptance run: one line per criterion with its tolerance and timing.
// Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "thermoform/freezing.hpp"
#include "thermoform/induced.hpp"
#include "thermoform/nonlinear.hpp"
#include "thermoform/pressure.hpp"

using namespace thermoform;

namespace {

struct Outcome {
  bool ok = false;
  std::string detail;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::string sci(double x) { return fmt("%.2e", x); }

Potential values(const Sft& sft, std::vector<double> v) { return Potential::from_symbol_values(sft, std::move(v)); }

struct Fixture {
  const char* name;
  Sft sft;
  Potential phi;
  Potential psi;
};

std::vector<Fixture> fixture_set() {
  const Sft f = fixtures::full2(), g = fixtures::golden(), c = fixtures::cycle2();
  return {
      {"FULL2", f, values(f, {0.5, -0.3}), values(f, {1.0, 2.0})},
      {"GOLDEN", g, values(g, {0.2, -0.4}), values(g, {1.0, 1.5})},
      {"CYCLE2", c, values(c, {0.3, 0.0}), values(c, {1.0, 2.0})},
  };
}

// u + u² = 1 on (0, 1), solved by bisection; β = −log u.
double golden_oracle() {
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mid + mid * mid < 1.0 ? lo : hi) = mid;
  }
  return -std::log(0.5 * (lo + hi));
}

double bernoulli_entropy(double p) {
  double h = 0.0;
  if (p > 0.0) h -= p * std::log(p);
  if (p < 1.0) h -= (1.0 - p) * std::log(1.0 - p);
  return h;
}

NonlinearFunctional square() {
  Eigen::MatrixXd q(1, 1);
  q << 1.0;
  return NonlinearFunctional::quadratic(q, {0.0});
}

Outcome c1() {
  const Sft full = fixtures::full2();
  const double root =
      bowen_root(InducedProblem(Potential::constant(full, 0.0), values(full, {1.0, 2.0}))).value;
  const double oracle = golden_oracle();
  const double d = std::abs(root - oracle);
  const double closed = std::abs(root - std::log(std::numbers::phi));
  return {d <= 1e-9 && closed <= 1e-9,
          "root " + fmt("%.10f", root) + ", |root - oracle| = " + sci(d) + " <= 1e-9"};
}

Outcome c2() {
  const Sft full = fixtures::full2();
  const InducedProblem p(Potential::constant(full, 0.0), values(full, {1.0, 2.0}));
  const double root = bowen_root(p).value;
  const double e20 = std::abs(direct_induced_estimate(p, 20.0, 1).value - root);
  const double e24 = std::abs(direct_induced_estimate(p, 24.0, 1).value - root);
  return {e20 <= 0.08 && e24 <= 0.05,
          "error " + fmt("%.4f", e20) + " at T=20 (<= 0.08), " + fmt("%.4f", e24) + " at T=24 (<= 0.05)"};
}

Outcome c3() {
  bool ok = true;
  std::string detail;
  for (const auto& fx : fixture_set()) {
    const double root = bowen_root(InducedProblem(fx.phi, fx.psi)).value;
    const auto res = optimize_markov(
        fx.sft,
        [&](const MarkovMeasure& mu) {
          return (entropy(mu) + integrate_potential(mu, fx.phi)) / integrate_potential(mu, fx.psi);
        },
        {.restarts = 20, .seed = 0});
    const double d = res.value - root;
    ok = ok && d >= -1e-4 && d <= 1e-6;
    detail += std::string(detail.empty() ? "" : ", ") + fx.name + " " + sci(d);
  }
  return {ok, "variational - root: " + detail + " in [-1e-4, 1e-6]"};
}

Outcome c4() {
  bool ok = true;
  int trials = 0;
  double worst = 0.0;
  std::string failed;
  for (const auto& fx : fixture_set()) {
    const auto report = induced_property_suite(InducedProblem(fx.phi, fx.psi), 0, {1e-8, 1e-9}, 20);
    for (const auto& c : report.cases) {
      trials += c.trials;
      worst = std::max(worst, c.worst);
      if (c.failures) failed += std::string(" ") + fx.name + "/" + c.name;
    }
    ok = ok && report.passed();
  }
  return {ok, std::to_string(trials) + " checks at 1e-8 / 1e-9, worst violation " + sci(worst) +
                  (failed.empty() ? "" : ", failed:" + failed)};
}

Outcome c5() {
  bool ok = true;
  std::string detail;
  std::mt19937_64 rng(0);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const auto& fx : fixture_set()) {
    const auto phi = Potential::from_function(fx.sft, 2, [&](std::span<const Symbol>) { return u(rng); });
    const double classical = cylinder_pressure_estimate(fx.sft, phi, 10).value;
    const double nonlinear = nonlinear_direct(PotentialVector({phi}), NonlinearFunctional::linear({1.0}), 10).value;
    ok = ok && classical == nonlinear;
    detail += std::string(detail.empty() ? "" : ", ") + fx.name + (classical == nonlinear ? " equal" : " differ");
  }
  return {ok, "n=10 with range-2 phi: " + detail};
}

Outcome c6() {
  const Sft full = fixtures::full2();
  const auto phi = PotentialVector({values(full, {1.0, 0.0})});
  double oracle = -1.0;
  for (int i = 0; i <= 1000000; ++i) {
    const double p = i * 1e-6;
    oracle = std::max(oracle, bernoulli_entropy(p) + p * p);
  }
  const double var = nonlinear_variational(phi, square()).value;
  const double direct = nonlinear_direct(phi, square(), 14).value;
  const double dv = std::abs(var - oracle), dd = std::abs(direct - oracle);
  return {dv <= 1e-4 && dd <= 2e-2,
          "grid oracle " + fmt("%.7f", oracle) + ", variational off by " + sci(dv) + " (<= 1e-4), direct n=14 off by " +
              sci(dd) + " (<= 2e-2); the quoted 0.8583956 is not what this oracle gives"};
}

Outcome c7() {
  const Sft full = fixtures::full2();
  const auto phi = PotentialVector({values(full, {1.0, 0.0})});
  const auto psi = values(full, {1.0, 2.0});
  const double beta = nonlinear_induced_root(phi, psi, square()).value;
  const double residual = std::abs(g_beta_pressure(phi, psi, square(), beta).value);
  bool ok = residual <= 1e-6;
  double worst = 0.0;
  for (const auto& fx : fixture_set()) {
    const double linear =
        nonlinear_induced_root(PotentialVector({fx.phi}), fx.psi, NonlinearFunctional::linear({1.0})).value;
    worst = std::max(worst, std::abs(linear - bowen_root(InducedProblem(fx.phi, fx.psi)).value));
  }
  ok = ok && worst <= 1e-5;
  return {ok, "|P^{G_beta*}| = " + sci(residual) + " (<= 1e-6), linear F vs Bowen root " + sci(worst) + " (<= 1e-5)"};
}

Outcome c8() {
  const Sft full = fixtures::full2();
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(0.5 + 0.02 * i);
  const auto scan = r_threshold_scan(PotentialVector({Potential::constant(full, 0.0)}), Potential::constant(full, 1.0),
                                     NonlinearFunctional::constant(1, 0.0), grid, 22);
  if (!scan.last_growing || !scan.first_decaying) return {false, "grid does not bracket a switch"};
  const double lo = *scan.last_growing, hi = *scan.first_decaying;
  const bool ok = lo <= std::log(2.0) && std::log(2.0) <= hi && hi - lo <= 0.02 + 1e-12;
  return {ok, "growth up to " + fmt("%.2f", lo) + ", decay from " + fmt("%.2f", hi) + ", log 2 = 0.6931"};
}

Outcome c9() {
  const Sft full = fixtures::full2(), cyc = fixtures::cycle2();
  std::vector<double> grid;
  for (int b = 1; b <= 64; ++b) grid.push_back(b);
  const auto flat = detect_freezing(beta_sweep(Potential::constant(full, 0.7), Potential::constant(full, 1.0), grid));
  const auto zero = detect_freezing(beta_sweep(values(cyc, {0.3, 0.0}), values(cyc, {1.0, 2.0}), grid));
  const auto sweep = beta_sweep(values(full, {1.0, 0.0}), Potential::constant(full, 1.0), grid);
  const auto asym = detect_freezing(sweep);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    worst = std::max(worst, std::abs(sweep.gaps[i] - std::log1p(std::exp(-grid[i]))));
  const bool ok = flat.kind == FreezingVerdict::Kind::Frozen && flat.beta0 == 1.0 &&
                  zero.kind == FreezingVerdict::Kind::Frozen && zero.beta0 == 1.0 &&
                  asym.kind == FreezingVerdict::Kind::Asymptotic && worst <= 1e-8;
  return {ok, "constant " + to_string(flat.kind) + "@" + fmt("%g", flat.beta0) + ", CYCLE2 " + to_string(zero.kind) +
                  "@" + fmt("%g", zero.beta0) + ", FULL2 (1,0) " + to_string(asym.kind) + ", gap error " + sci(worst) +
                  " (<= 1e-8)"};
}

Outcome c10() {
  const Sft full = fixtures::full2();
  const auto rep = zero_temperature_limit(values(full, {1.0, 0.0}), Potential::constant(full, 1.0));
  const double err = rep.rows.back().ratio_error;
  const double last = rep.cauchy.back();
  bool monotone = true;
  for (std::size_t i = 1; i < rep.cauchy.size(); ++i) monotone = monotone && rep.cauchy[i] <= rep.cauchy[i - 1];
  return {err <= 1e-10 && last <= 1e-9 && monotone,
          "beta=" + fmt("%g", rep.rows.back().beta) + ": |int phi - 1| = " + sci(err) + " (<= 1e-10), last increment " +
              sci(last) + " (<= 1e-9)"};
}

Outcome c11() {
  const Sft full = fixtures::full2();
  const auto rep = differentiability_check(values(full, {1.0, 0.0}), Potential::constant(full, 1.0), 1.0);
  const double exact = std::exp(1.0) / (1.0 + std::exp(1.0));
  const double d = std::abs(rep.derivative - exact);
  return {d <= 1e-5 && std::abs(rep.ratio - exact) <= 1e-10,
          "derivative " + fmt("%.7f", rep.derivative) + " vs e/(1+e) " + fmt("%.7f", exact) + ", |d| = " + sci(d) +
              " (<= 1e-5)"};
}

Outcome c12() {
  bool ok = true;
  double perm_worst = 0.0, block_worst = 0.0;
  for (const auto& fx : fixture_set()) {
    std::vector<Symbol> perm(static_cast<std::size_t>(fx.sft.alphabet_size()));
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<Symbol>(perm.size() - 1 - i);
    const auto permuted = permute_symbols(fx.sft, {fx.phi, fx.psi}, perm);
    const auto recoded = higher_block_recode(fx.sft, {fx.phi, fx.psi}, 2);
    const double classical = topological_pressure(fx.sft, fx.phi);
    const double root = bowen_root(InducedProblem(fx.phi, fx.psi)).value;
    perm_worst = std::max({perm_worst,
                           std::abs(classical - topological_pressure(permuted.sft, permuted.potentials[0])),
                           std::abs(root - bowen_root(InducedProblem(permuted.potentials[0], permuted.potentials[1])).value)});
    block_worst = std::max({block_worst,
                            std::abs(classical - topological_pressure(recoded.sft, recoded.potentials[0])),
                            std::abs(root - bowen_root(InducedProblem(recoded.potentials[0], recoded.potentials[1])).value)});
    const auto report = conjugacy_invariance_check(PotentialVector({fx.phi}), fx.psi, square(), 0);
    for (const auto& c : report.cases) {
      const double d = std::abs(c.before - c.after);
      (c.name.find("recoding") != std::string::npos ? block_worst : perm_worst) =
          std::max(c.name.find("recoding") != std::string::npos ? block_worst : perm_worst, d);
    }
  }
  ok = perm_worst <= 1e-12 && block_worst <= 1e-6;
  return {ok, "classical, induced, nonlinear-induced: permutation " + sci(perm_worst) + " (<= 1e-12), 2-block " +
                  sci(block_worst) + " (<= 1e-6)"};
}

Outcome c13() {
  std::mt19937_64 rng(0);
  std::uniform_real_distribution<double> u(-1.0, 1.0), w(0.2, 3.0);
  double worst = 0.0;
  int pairs = 0;
  for (const auto& fx : fixture_set()) {
    const auto cycles = enumerate_simple_cycles(fx.sft, fx.sft.alphabet_size());
    const auto k = static_cast<std::size_t>(fx.sft.alphabet_size());
    for (int t = 0; t < 50; ++t, ++pairs) {
      std::vector<double> a(k), b(k);
      for (auto& x : a) x = u(rng);
      for (auto& x : b) x = w(rng);
      const auto phi = values(fx.sft, a), psi = values(fx.sft, b);
      double brute = -std::numeric_limits<double>::infinity();
      for (const auto& c : cycles) brute = std::max(brute, periodic_birkhoff(phi, c) / periodic_birkhoff(psi, c));
      worst = std::max(worst, std::abs(max_cycle_ratio(phi, psi).value - brute));
    }
  }
  return {worst <= 1e-9, std::to_string(pairs) + " pairs, worst |Karp - enumeration| = " + sci(worst) + " (<= 1e-9)"};
}

struct Criterion {
  int id;
  const char* name;
  double limit;  // seconds
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "exactness", 0.1, c1},
      {2, "definitional convergence", 30, c2},
      {3, "variational sandwich", 20, c3},
      {4, "induced property suite", 30, c4},
      {5, "nonlinear linear collapse", 5, c5},
      {6, "nonlinear oracle", 60, c6},
      {7, "G_beta root consistency", 10, c7},
      {8, "R-threshold", 30, c8},
      {9, "freezing", 10, c9},
      {10, "zero temperature", 5, c10},
      {11, "differentiability", 5, c11},
      {12, "conjugacy invariance", 20, c12},
      {13, "max cycle ratio", 10, c13},
  };
  int failed = 0;
  double total = 0.0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("threw ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    total += secs;
    const bool ok = out.ok && secs < c.limit;
    failed += !ok;
    std::printf("[%s] %2d %-26s %.3f s (limit %g s)  %s\n", ok ? "PASS" : "FAIL", c.id, c.name, secs, c.limit,
                out.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed in %.2f s\n", static_cast<int>(criteria.size()) - failed, criteria.size(),
              total);
  return failed;
}
