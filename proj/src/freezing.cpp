#include "thermoform/freezing.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>

namespace thermoform {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<double> symbol_values(const Potential& p) {
  std::vector<double> v(static_cast<std::size_t>(p.sft().alphabet_size()));
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = p.value_at_code(i);
  return v;
}

double cycle_sum(const std::vector<double>& v, const Word& states) {
  double s = 0.0;
  for (Symbol x : states) s += v[static_cast<std::size_t>(x)];
  return s;
}

// Max-plus longest path lengths D[i][j] over nonempty walks, weight w[i] per
// edge i→j. Assumes no positive cycles beyond rounding.
std::vector<std::vector<double>> longest_paths(const Sft& sft, const std::vector<double>& w) {
  const auto k = static_cast<std::size_t>(sft.alphabet_size());
  std::vector<std::vector<double>> d(k, std::vector<double>(k, kNegInf));
  for (std::size_t i = 0; i < k; ++i)
    for (Symbol j : sft.successors(static_cast<Symbol>(i))) d[i][static_cast<std::size_t>(j)] = w[i];
  for (std::size_t m = 0; m < k; ++m)
    for (std::size_t i = 0; i < k; ++i) {
      if (d[i][m] == kNegInf) continue;
      for (std::size_t j = 0; j < k; ++j)
        if (d[m][j] != kNegInf) d[i][j] = std::max(d[i][j], d[i][m] + d[m][j]);
    }
  return d;
}

// Shortest cycle through `start` using only marked edges (BFS), preferring
// smaller symbols on ties.
Word shortest_cycle(const std::vector<std::vector<char>>& edge, Symbol start) {
  const auto k = edge.size();
  std::vector<int> parent(k, -1);
  std::deque<std::size_t> queue;
  const auto s = static_cast<std::size_t>(start);
  for (std::size_t j = 0; j < k; ++j) {
    if (!edge[s][j]) continue;
    if (j == s) return {start};
    if (parent[j] == -1) {
      parent[j] = start;
      queue.push_back(j);
    }
  }
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    for (std::size_t j = 0; j < k; ++j) {
      if (!edge[u][j]) continue;
      if (j == s) {
        Word path;
        for (auto x = static_cast<int>(u); x != start; x = parent[static_cast<std::size_t>(x)]) path.push_back(x);
        path.push_back(start);
        std::reverse(path.begin(), path.end());
        return path;
      }
      if (parent[j] == -1) {
        parent[j] = static_cast<int>(u);
        queue.push_back(j);
      }
    }
  }
  return {};
}

struct Critical {
  std::vector<std::vector<char>> edge;
  std::size_t count = 0;
};

// Edges i→j with w_i + D[j][i] >= -tol, i.e. on a cycle of mean ≈ 0.
Critical critical_edges(const Sft& sft, const std::vector<double>& w, double tol) {
  const auto d = longest_paths(sft, w);
  const auto k = static_cast<std::size_t>(sft.alphabet_size());
  Critical c{std::vector<std::vector<char>>(k, std::vector<char>(k, 0)), 0};
  for (std::size_t i = 0; i < k; ++i)
    for (Symbol js : sft.successors(static_cast<Symbol>(i))) {
      const auto j = static_cast<std::size_t>(js);
      const double back = (i == j) ? 0.0 : d[j][i];
      if (back != kNegInf && w[i] + back >= -tol) {
        c.edge[i][j] = 1;
        ++c.count;
      }
    }
  return c;
}

std::vector<double> shifted_weights(const std::vector<double>& phi, const std::vector<double>& psi, double lambda) {
  std::vector<double> w(phi.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = phi[i] - lambda * psi[i];
  return w;
}

// Strongly connected components of the marked subgraph (Kosaraju),
// skipping vertices without marked edges.
std::vector<std::vector<Symbol>> components(const std::vector<std::vector<char>>& edge) {
  const auto k = edge.size();
  std::vector<char> seen(k, 0);
  std::vector<std::size_t> order;
  std::function<void(std::size_t)> forward = [&](std::size_t u) {
    seen[u] = 1;
    for (std::size_t v = 0; v < k; ++v)
      if (edge[u][v] && !seen[v]) forward(v);
    order.push_back(u);
  };
  for (std::size_t u = 0; u < k; ++u)
    if (!seen[u]) forward(u);
  std::vector<int> comp(k, -1);
  std::function<void(std::size_t, int)> backward = [&](std::size_t u, int c) {
    comp[u] = c;
    for (std::size_t v = 0; v < k; ++v)
      if (edge[v][u] && comp[v] == -1) backward(v, c);
  };
  int count = 0;
  for (auto it = order.rbegin(); it != order.rend(); ++it)
    if (comp[*it] == -1) backward(*it, count++);
  std::vector<std::vector<Symbol>> out(static_cast<std::size_t>(count));
  for (std::size_t u = 0; u < k; ++u) out[static_cast<std::size_t>(comp[u])].push_back(static_cast<Symbol>(u));
  // Keep only components carrying a cycle.
  std::vector<std::vector<Symbol>> cyclic;
  for (auto& c : out) {
    bool has_edge = false;
    for (Symbol a : c)
      for (Symbol b : c) has_edge = has_edge || edge[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
    if (has_edge) cyclic.push_back(std::move(c));
  }
  return cyclic;
}

// ∫φ/∫ψ for the unscaled pair of `base`; μ lives on its block shift.
double ratio_on(const MarkovMeasure& mu, const InducedProblem& base) {
  const auto& c = base.canonical();
  return integrate_potential(mu, c.potentials[0]) / integrate_potential(mu, c.potentials[1]);
}

}  // namespace

double max_cycle_mean(const Sft& sft, const std::vector<double>& w) {
  const auto k = static_cast<std::size_t>(sft.alphabet_size());
  if (w.size() != k) throw Error(ErrorCode::InvalidArgument, "need one weight per symbol");
  // D[j][v]: best weight of a j-edge walk ending at v, from any start.
  std::vector<std::vector<double>> d(k + 1, std::vector<double>(k, kNegInf));
  std::fill(d[0].begin(), d[0].end(), 0.0);
  for (std::size_t j = 1; j <= k; ++j)
    for (std::size_t u = 0; u < k; ++u) {
      if (d[j - 1][u] == kNegInf) continue;
      for (Symbol v : sft.successors(static_cast<Symbol>(u)))
        d[j][static_cast<std::size_t>(v)] = std::max(d[j][static_cast<std::size_t>(v)], d[j - 1][u] + w[u]);
    }
  double best = kNegInf;
  for (std::size_t v = 0; v < k; ++v) {
    if (d[k][v] == kNegInf) continue;
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < k; ++j)
      if (d[j][v] != kNegInf)
        worst = std::min(worst, (d[k][v] - d[j][v]) / static_cast<double>(k - j));
    best = std::max(best, worst);
  }
  return best;
}

CycleRatioResult max_cycle_ratio(const Potential& phi, const Potential& psi) {
  const InducedProblem problem(phi, psi);
  const auto& canon = problem.canonical();
  const Sft& sft = canon.sft;
  if (!sft.irreducible()) throw Error(ErrorCode::NotIrreducible, "max cycle ratio needs an irreducible shift");
  const std::vector<double> f = symbol_values(canon.potentials[0]);
  const std::vector<double> g = symbol_values(canon.potentials[1]);

  // Cycle ratios are ψ-weighted averages of f/g, hence lie in this bracket.
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < f.size(); ++i) {
    lo = std::min(lo, f[i] / g[i]);
    hi = std::max(hi, f[i] / g[i]);
  }
  int it = 0;
  while (hi - lo > 1e-10 * std::max(1.0, std::abs(hi)) && it < 200) {
    const double mid = 0.5 * (lo + hi);
    (max_cycle_mean(sft, shifted_weights(f, g, mid)) > 0.0 ? lo : hi) = mid;
    ++it;
  }

  // Dinkelbach polish: move λ to the exact ratio of the best critical cycle
  // until no critical cycle beats it.
  const double psi_min = problem.psi_min();
  double lambda = lo;
  double best = -std::numeric_limits<double>::infinity();
  Word witness;
  for (int round = 0; round < 100; ++round, ++it) {
    const auto crit = critical_edges(sft, shifted_weights(f, g, lambda), 1e-9 * psi_min);
    for (std::size_t s = 0; s < crit.edge.size(); ++s) {
      const Word cyc = shortest_cycle(crit.edge, static_cast<Symbol>(s));
      if (cyc.empty()) continue;
      const double r = cycle_sum(f, cyc) / cycle_sum(g, cyc);
      if (r > best) {
        best = r;
        witness = cyc;
      }
    }
    if (witness.empty()) throw Error(ErrorCode::EmptySubgraph, "no critical cycle at the bracketed ratio");
    if (best <= lambda) break;
    lambda = best;
  }
  lambda = cycle_sum(f, witness) / cycle_sum(g, witness);

  const auto crit = critical_edges(sft, shifted_weights(f, g, lambda), 1e-9 * psi_min);
  CycleRatioResult out{lambda, Cycle(sft, witness).canonical(), {}, crit.count == sft.edge_count(), it};
  for (std::size_t i = 0; i < crit.edge.size(); ++i)
    for (std::size_t j = 0; j < crit.edge.size(); ++j)
      if (crit.edge[i][j]) out.subgraph_edges.emplace_back(static_cast<Symbol>(i), static_cast<Symbol>(j));
  return out;
}

HInfinity h_infinity(const Potential& phi, const Potential& psi, const CycleRatioResult& max) {
  const InducedProblem problem(phi, psi);
  const auto& canon = problem.canonical();
  const auto k = static_cast<std::size_t>(canon.sft.alphabet_size());
  if (max.subgraph_edges.empty()) throw Error(ErrorCode::EmptySubgraph, "maximizing subgraph is empty");
  std::vector<std::vector<char>> edge(k, std::vector<char>(k, 0));
  for (const auto& [a, b] : max.subgraph_edges) edge[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = 1;
  const std::vector<double> f = symbol_values(canon.potentials[0]);
  const std::vector<double> g = symbol_values(canon.potentials[1]);

  HInfinity out;
  for (const auto& comp : components(edge)) {
    const auto n = comp.size();
    std::vector<std::vector<int>> adj(n, std::vector<int>(n, 0));
    std::size_t edges = 0;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        adj[a][b] = edge[static_cast<std::size_t>(comp[a])][static_cast<std::size_t>(comp[b])];
        edges += static_cast<std::size_t>(adj[a][b]);
      }
    if (edges == n) continue;  // a single cycle carries no entropy
    const Sft sub(static_cast<int>(n), adj);
    std::vector<double> psi_sub(n);
    std::vector<double> w(n);
    for (std::size_t a = 0; a < n; ++a) {
      const auto s = static_cast<std::size_t>(comp[a]);
      psi_sub[a] = g[s];
      w[a] = f[s] - max.value * g[s];
    }
    // Exact when the cycle means of φ − Max·ψ on the component are all zero.
    std::vector<double> neg(w);
    for (double& x : neg) x = -x;
    const double tol = 1e-9 * problem.psi_min();
    if (max_cycle_mean(sub, w) > tol || max_cycle_mean(sub, neg) > tol) out.exact = false;
    const InducedProblem restricted(Potential::constant(sub, 0.0), Potential::from_symbol_values(sub, psi_sub));
    out.value = std::max(out.value, bowen_root(restricted).value);
  }
  return out;
}

HInfinity h_infinity(const Potential& phi, const Potential& psi) {
  return h_infinity(phi, psi, max_cycle_ratio(phi, psi));
}

BetaSweep beta_sweep(const Potential& phi, const Potential& psi, const std::vector<double>& betas) {
  if (betas.empty() || !std::is_sorted(betas.begin(), betas.end()))
    throw Error(ErrorCode::InvalidArgument, "β grid must be nonempty and sorted");
  const auto max = max_cycle_ratio(phi, psi);
  const InducedProblem base(phi, psi);
  BetaSweep sweep;
  sweep.betas = betas;
  sweep.max_ratio = max.value;
  sweep.h_inf = h_infinity(phi, psi, max).value;
  sweep.subgraph_full = max.full;
  for (double beta : betas) {
    const InducedProblem p(beta * phi, psi);
    const double pressure = bowen_root(p).value;
    const auto mu = induced_equilibrium(p);
    const auto& c = p.canonical();
    const double psi_mass = integrate_potential(mu, c.potentials[1]);
    sweep.pressures.push_back(pressure);
    sweep.ratios.push_back(ratio_on(mu, base));
    sweep.scaled_entropies.push_back(entropy(mu) / psi_mass);
    sweep.gaps.push_back(pressure - (beta * sweep.max_ratio + sweep.h_inf));
  }
  return sweep;
}

std::string to_string(FreezingVerdict::Kind kind) {
  switch (kind) {
    case FreezingVerdict::Kind::Frozen: return "frozen";
    case FreezingVerdict::Kind::Asymptotic: return "asymptotic";
    case FreezingVerdict::Kind::Indeterminate: return "indeterminate";
  }
  return "unknown";
}

FreezingVerdict detect_freezing(const BetaSweep& sweep, double tol) {
  FreezingVerdict v;
  const auto& gaps = sweep.gaps;
  if (gaps.size() < 6) {
    v.reason = "need at least 6 grid points";
    return v;
  }
  // First index from which every gap is within tol.
  std::size_t tail = gaps.size();
  while (tail > 0 && std::abs(gaps[tail - 1]) <= tol) --tail;
  if (tail < gaps.size() && sweep.subgraph_full) {
    v.kind = FreezingVerdict::Kind::Frozen;
    v.beta0 = sweep.betas[tail];
    v.reason = tail == 0 ? "gaps vanish on the whole grid" : "gaps vanish from β₀ on";
    return v;
  }
  bool nonincreasing = true;
  for (std::size_t i = 1; i < gaps.size(); ++i) nonincreasing = nonincreasing && gaps[i] <= gaps[i - 1] + tol;
  const bool positive = std::all_of(gaps.begin(), gaps.end(), [&](double g) { return g >= -tol; });
  if (gaps.front() > tol && positive && nonincreasing && gaps.back() < gaps.front() / 10.0) {
    v.kind = FreezingVerdict::Kind::Asymptotic;
    v.reason = sweep.subgraph_full ? "gaps decay but never vanish"
                                   : "maximizing subgraph misses edges, so fully supported equilibria never freeze";
    return v;
  }
  v.reason = "gaps neither vanish nor decay monotonically";
  return v;
}

std::vector<double> default_beta_schedule() { return {1, 2, 4, 8, 16, 32, 64}; }

ZeroTemperatureReport zero_temperature_limit(const Potential& phi, const Potential& psi,
                                             const std::vector<double>& schedule, int test_depth) {
  if (test_depth < 1) throw Error(ErrorCode::InvalidArgument, "test depth must be at least 1");
  if (schedule.size() < 2 || !std::is_sorted(schedule.begin(), schedule.end()) ||
      std::adjacent_find(schedule.begin(), schedule.end()) != schedule.end())
    throw Error(ErrorCode::InvalidArgument, "schedule must be strictly increasing with at least two points");
  const InducedProblem base(phi, psi);
  ZeroTemperatureReport report;
  report.max_ratio = max_cycle_ratio(phi, psi).value;
  report.words = enumerate_words(base.canonical().sft, test_depth);
  for (double beta : schedule) {
    const InducedProblem p(beta * phi, psi);
    const auto mu = induced_equilibrium(p);
    ZeroTemperatureRow row;
    row.beta = beta;
    for (const auto& w : report.words) row.masses.push_back(mu.cylinder_mass(w));
    row.ratio = ratio_on(mu, base);
    row.ratio_error = std::abs(row.ratio - report.max_ratio);
    if (!report.rows.empty()) {
      double diff = 0.0;
      for (std::size_t i = 0; i < row.masses.size(); ++i)
        diff = std::max(diff, std::abs(row.masses[i] - report.rows.back().masses[i]));
      report.cauchy.push_back(diff);
    }
    report.rows.push_back(std::move(row));
  }
  const auto& prev = report.rows[report.rows.size() - 2];
  const auto& last = report.rows.back();
  report.constant = prev.beta * prev.ratio_error;
  report.ratio_converged = last.ratio_error <= std::max(1e-6, report.constant / last.beta);
  return report;
}

DifferentiabilityReport differentiability_check(const Potential& phi, const Potential& psi, double beta0,
                                                double step) {
  if (!(step > 0.0)) throw Error(ErrorCode::InvalidArgument, "step must be positive");
  DifferentiabilityReport r;
  r.beta0 = beta0;
  const double up = bowen_root(InducedProblem((beta0 + step) * phi, psi)).value;
  const double down = bowen_root(InducedProblem((beta0 - step) * phi, psi)).value;
  r.derivative = (up - down) / (2.0 * step);
  r.ratio = ratio_on(induced_equilibrium(InducedProblem(beta0 * phi, psi)), InducedProblem(phi, psi));
  r.difference = std::abs(r.derivative - r.ratio);
  return r;
}

}  // namespace thermoform
