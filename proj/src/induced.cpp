#include "thermoform/induced.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "detail/induced_sum.hpp"

namespace thermoform {

namespace {

constexpr double kRootTolerance = 1e-10;

std::vector<double> symbol_values(const Potential& p) {
  std::vector<double> v(static_cast<std::size_t>(p.sft().alphabet_size()));
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = p.value_at_code(i);
  return v;
}

// P_top(φ − βψ) on the block shift, both given per symbol.
double root_function(const Sft& sft, const std::vector<double>& phi, const std::vector<double>& psi, double beta,
                     std::vector<double>& scratch) {
  for (std::size_t i = 0; i < phi.size(); ++i) scratch[i] = phi[i] - beta * psi[i];
  return spectral_pressure(sft, scratch).value;
}

Potential random_symbol_potential(const Sft& sft, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(static_cast<std::size_t>(sft.alphabet_size()));
  for (double& x : v) x = u(rng);
  return Potential::from_symbol_values(sft, std::move(v));
}

Potential random_like(const Potential& shape, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  return Potential::from_function(shape.sft(), shape.range(), [&](std::span<const Symbol>) { return u(rng); });
}

}  // namespace

InducedProblem::InducedProblem(Potential phi, Potential psi, std::string label)
    : phi_(std::move(phi)),
      psi_(std::move(psi)),
      label_(std::move(label)),
      canonical_([&] {
        if (!(phi_.sft() == psi_.sft())) throw Error(ErrorCode::RangeMismatch, "φ and ψ live on different shifts");
        if (!(psi_.min_value() > 0.0)) throw Error(ErrorCode::NonPositiveScaling, "ψ must be strictly positive");
        return higher_block_recode(phi_.sft(), {phi_, psi_}, std::max(phi_.range(), psi_.range()));
      }()) {}

Potential InducedProblem::lift(const Potential& g) const {
  if (!(g.sft() == sft())) throw Error(ErrorCode::RangeMismatch, "potential lives on a different shift");
  return canonical_.recode(g);
}

InducedProblem InducedProblem::with_phi(Potential phi) const { return InducedProblem(std::move(phi), psi_, label_); }

PressureResult bowen_root(const InducedProblem& problem, const BowenOptions& options) {
  const Sft& sft = problem.canonical().sft;
  if (!sft.irreducible()) throw Error(ErrorCode::NotIrreducible, "induced pressure needs an irreducible shift");
  const Potential& phi = problem.phi();
  const double m = problem.psi_min();
  const double big_m = problem.psi_max();
  PressureResult r;
  r.method = PressureMethod::Root;

  if (m == big_m && !options.force_bisection) {
    r.value = topological_pressure(problem.sft(), phi) / m;
    r.diagnostics.note = "constant ψ";
    return r;
  }

  const std::vector<double> phi_v = symbol_values(problem.canonical().potentials[0]);
  const std::vector<double> psi_v = symbol_values(problem.canonical().potentials[1]);
  std::vector<double> scratch(phi_v.size());
  const double log_k = std::log(static_cast<double>(problem.sft().alphabet_size()));
  const double top = log_k + phi.max_value();
  double lo = std::min(phi.min_value() / big_m, phi.min_value() / m) - 1.0;
  double hi = std::max(top / m, top / big_m) + 1.0;
  r.diagnostics.bracket_lo = lo;
  r.diagnostics.bracket_hi = hi;
  if (root_function(sft, phi_v, psi_v, lo, scratch) < 0.0 || root_function(sft, phi_v, psi_v, hi, scratch) > 0.0)
    throw Error(ErrorCode::BracketFailure, "P_top(φ − βψ) does not change sign on the bracket");

  int it = 0;
  for (; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double f = root_function(sft, phi_v, psi_v, mid, scratch);
    if (f > 0.0)
      lo = mid;
    else if (f < 0.0)
      hi = mid;
    else
      lo = hi = mid;
  }
  r.value = 0.5 * (lo + hi);
  r.diagnostics.iterations = it;
  r.diagnostics.residual = std::abs(root_function(sft, phi_v, psi_v, r.value, scratch));
  if (r.diagnostics.residual > kRootTolerance)
    throw Error(ErrorCode::NoConvergence, "bisection ended with |P_top(φ − βψ)| above 1e-10");
  return r;
}

PressureResult direct_induced_estimate(const InducedProblem& problem, double T, int q, std::size_t cap) {
  if (!(T > 0.0)) throw Error(ErrorCode::InvalidArgument, "T must be positive");
  if (q < std::max(problem.phi().range(), problem.psi().range()))
    throw Error(ErrorCode::InvalidArgument, "q must be at least the potential ranges");
  WordWalker walker(problem.sft(), {&problem.phi(), &problem.psi()}, cap);
  const auto sum = detail::induced_sum_over_prefixes(walker, problem.psi(), 1, problem.psi_min(), T, q,
                                                     [](const WordWalker& w, int n) { return w.birkhoff(0, n); });
  if (sum.lse.terms == 0) throw Error(ErrorCode::EmptySum, "no prefix meets any X_n");
  PressureResult r;
  r.value = sum.lse.log_sum / T;
  r.method = PressureMethod::DirectInduced;
  r.diagnostics.word_length = sum.max_depth;
  r.diagnostics.cylinders = sum.lse.terms;
  r.diagnostics.overflow = sum.lse.overflow;
  if (sum.split > 0) r.diagnostics.note = std::to_string(sum.split) + " prefixes split by the X_n condition";
  return r;
}

MarkovMeasure induced_equilibrium(const InducedProblem& problem) {
  const double beta = bowen_root(problem).value;
  const auto& c = problem.canonical();
  return rpf_equilibrium(c.sft, c.potentials[0] - beta * c.potentials[1]);
}

std::vector<double> default_t_grid() { return {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6}; }

DirectionalDerivatives directional_derivatives(const InducedProblem& problem, const Potential& g,
                                               const std::vector<double>& t_grid) {
  if (t_grid.empty()) throw Error(ErrorCode::InvalidArgument, "t grid is empty");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > 0.0) || (i > 0 && !(t_grid[i] < t_grid[i - 1])))
      throw Error(ErrorCode::InvalidArgument, "t grid must be positive and strictly decreasing");
  }
  const double base = bowen_root(problem).value;
  DirectionalDerivatives out;
  for (double t : t_grid) {
    QuotientRow row;
    row.t = t;
    row.right = (bowen_root(problem.with_phi(problem.phi() + t * g)).value - base) / t;
    row.left = (base - bowen_root(problem.with_phi(problem.phi() - t * g)).value) / t;
    out.table.push_back(row);
  }
  out.d_plus = out.table.back().right;
  out.d_minus = out.table.back().left;
  return out;
}

TangentReport tangent_check(const InducedProblem& problem, const MarkovMeasure& mu,
                            const std::vector<Potential>& g_samples) {
  if (g_samples.empty()) throw Error(ErrorCode::InvalidArgument, "need at least one g");
  if (!(mu.sft() == problem.canonical().sft))
    throw Error(ErrorCode::RangeMismatch, "measure must live on the canonical block shift");
  const double base = bowen_root(problem).value;
  const double psi_mass = integrate_potential(mu, problem.canonical().potentials[1]);
  TangentReport report;
  for (std::size_t i = 0; i < g_samples.size(); ++i) {
    const Potential& g = g_samples[i];
    TangentCase c;
    c.label = g.label().empty() ? "g" + std::to_string(i) : g.label();
    c.pressure_gain = bowen_root(problem.with_phi(problem.phi() + g)).value - base;
    c.ratio = integrate_potential(mu, problem.lift(g)) / psi_mass;
    c.violated = c.pressure_gain < c.ratio - 1e-9;
    if (c.violated) ++report.violations;
    report.cases.push_back(std::move(c));
  }
  report.summary = report.violations == 0 ? "no violation found"
                                          : std::to_string(report.violations) + " violations found";
  return report;
}

TangentReport tangent_check(const InducedProblem& problem, const MarkovMeasure& mu, std::uint64_t seed, int count) {
  if (count < 1) throw Error(ErrorCode::InvalidArgument, "need at least one g");
  std::mt19937_64 rng(seed);
  std::vector<Potential> samples;
  samples.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) samples.push_back(random_symbol_potential(problem.sft(), rng, -1.0, 1.0));
  return tangent_check(problem, mu, samples);
}

bool PropertyReport::passed() const {
  return std::all_of(cases.begin(), cases.end(), [](const PropertyCase& c) { return c.failures == 0; });
}

PropertyReport induced_property_suite(const InducedProblem& problem, std::uint64_t seed,
                                      const PropertyTolerances& tol, int draws) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Sft& sft = problem.sft();
  const double m = problem.psi_min();
  const double big_m = problem.psi_max();
  auto P = [&](const Potential& phi) { return bowen_root(problem.with_phi(phi)).value; };
  PropertyReport report;

  // `excess` > 0 means the property failed by that much.
  auto record = [&](PropertyCase& c, double excess) {
    ++c.trials;
    if (excess > 0.0) {
      ++c.failures;
      c.worst = std::max(c.worst, excess);
    }
  };
  auto draw = [&] { return random_like(problem.phi(), rng, -1.0, 1.0); };

  PropertyCase mono{"monotonicity"};
  PropertyCase bounds{"bounds"};
  PropertyCase bounds_nonneg{"bounds, g >= 0"};
  PropertyCase convex{"convexity"};
  PropertyCase scale_up{"scaling c>=1"};
  PropertyCase scale_down{"scaling c<=1"};
  PropertyCase subadd{"subadditivity"};
  PropertyCase cohom{"cohomology invariance"};
  PropertyCase shift{"P(t psi') = t + P(0)"};
  PropertyCase invariant{"invariant measure bound"};
  PropertyCase non_invariant{"non-invariant measure detected"};

  const double p0 = P(Potential::constant(sft, 0.0));
  for (int i = 0; i < draws; ++i) {
    const Potential a = draw();
    const Potential b = draw();
    const double pa = P(a);
    const double pb = P(b);

    record(mono, pa - P(a + random_like(a, rng, 0.0, 1.0)) - tol.inequality);

    // inf g / ∫ψ lies between inf g / M and inf g / m depending on its sign.
    const double gain = P(a + b) - pa;
    const double below = std::min(b.min_value() / big_m, b.min_value() / m);
    const double above = std::max(b.max_value() / m, b.max_value() / big_m);
    record(bounds, std::max(below - gain, gain - above) - tol.inequality);
    const Potential bump = random_like(a, rng, 0.0, 1.0);
    const double bump_gain = P(a + bump) - pa;
    record(bounds_nonneg,
           std::max(bump.min_value() / big_m - bump_gain, bump_gain - bump.max_value() / m) - tol.inequality);

    const double s = unit(rng);
    record(convex, P(s * a + (1.0 - s) * b) - (s * pa + (1.0 - s) * pb) - tol.inequality);

    const double up = 1.0 + 2.0 * unit(rng);
    record(scale_up, P(up * a) - up * pa - tol.inequality);
    const double down = -2.0 + 3.0 * unit(rng);
    record(scale_down, down * pa - P(down * a) - tol.inequality);

    record(subadd, P(a + b) - (pa + pb) - tol.inequality);

    std::vector<double> h(static_cast<std::size_t>(sft.alphabet_size()));
    for (double& x : h) x = -1.0 + 2.0 * unit(rng);
    record(cohom, std::abs(P(add_coboundary(a, h)) - pa) - tol.identity);
    const Potential psi_cob = add_coboundary(problem.psi(), h);
    for (int t = -2; t <= 2; ++t)
      record(shift, std::abs(P(static_cast<double>(t) * psi_cob) - (t + p0)) - tol.identity);
  }

  // Invariant Markov measures on the block shift: ∫φ ≤ P_ψ(φ) ∫ψ.
  const auto& canon = problem.canonical();
  const RowLogitMap logits(canon.sft);
  std::normal_distribution<double> normal(0.0, 1.5);
  for (int i = 0; i < draws; ++i) {
    const Potential a = draw();
    std::vector<double> x(logits.dimension());
    for (double& v : x) v = normal(rng);
    const auto mu = MarkovMeasure::from_transition(canon.sft, logits.transition(x));
    record(invariant, integrate_potential(mu, problem.lift(a)) -
                          P(a) * integrate_potential(mu, canon.potentials[1]) - tol.inequality);
  }

  // A Markov chain started off its stationary law is not invariant, and the
  // coboundary n(h∘σ − h) with h = νP − ν breaks the bound for large n.
  const int kc = canon.sft.alphabet_size();
  for (int i = 0; i < draws && kc > 1; ++i) {
    std::vector<double> x(logits.dimension());
    for (double& v : x) v = normal(rng);
    const Eigen::MatrixXd p = logits.transition(x);
    Eigen::VectorXd nu(kc);
    for (int j = 0; j < kc; ++j) nu(j) = 0.05 + unit(rng);
    nu /= nu.sum();
    const Eigen::VectorXd drift = p.transpose() * nu - nu;
    const double gap = drift.squaredNorm();
    // A tiny drift needs a huge n, and e^{φ−βψ} then leaves double range.
    if (gap < 1e-4) continue;
    double psi_mass = 0.0;
    for (int j = 0; j < kc; ++j) psi_mass += nu(j) * canon.potentials[1].value_at_code(static_cast<std::size_t>(j));
    const double n = std::ceil((std::abs(p0) * psi_mass + 1.0) / gap);
    std::vector<double> h(static_cast<std::size_t>(kc));
    for (int j = 0; j < kc; ++j) h[static_cast<std::size_t>(j)] = -n * drift(j);
    // add_coboundary(0, -n·drift) = n(drift∘σ − drift); its ν-integral is n·|drift|².
    const Potential phi = add_coboundary(Potential::constant(canon.sft, 0.0), h);
    const InducedProblem lifted(phi, canon.potentials[1]);
    const double lhs = n * gap;
    const double rhs = bowen_root(lifted).value * psi_mass;
    record(non_invariant, lhs > rhs ? 0.0 : rhs - lhs);
  }

  report.cases = {mono, bounds, bounds_nonneg, convex, scale_up, scale_down, subadd, cohom, shift, invariant, non_invariant};
  return report;
}

}  // namespace thermoform
