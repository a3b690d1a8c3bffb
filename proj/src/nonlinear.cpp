#include "thermoform/nonlinear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "detail/induced_sum.hpp"
#include "detail/log_sum_exp.hpp"

namespace thermoform {

namespace {

constexpr double kPsdTolerance = 1e-10;

std::vector<const Potential*> pointers(const PotentialVector& v) {
  std::vector<const Potential*> out;
  for (const auto& p : v.components()) out.push_back(&p);
  return out;
}

void require_dimension(const PotentialVector& phi, const NonlinearFunctional& f) {
  if (phi.dimension() != f.dimension())
    throw Error(ErrorCode::InvalidArgument, "F and Φ have different dimensions");
}

void require_positive(const Potential& psi) {
  if (!(psi.min_value() > 0.0)) throw Error(ErrorCode::NonPositiveScaling, "ψ must be strictly positive");
}

void require_convex(const NonlinearFunctional& f, const NonlinearSearchOptions& options, ErrorCode code) {
  if (!f.convex() && !options.heuristic) throw Error(code, "F is not convex; enable heuristic mode to proceed");
}

}  // namespace

// ---------------------------------------------------------------------------
// NonlinearFunctional

NonlinearFunctional NonlinearFunctional::linear(std::vector<double> c, double offset) {
  if (c.empty()) throw Error(ErrorCode::InvalidArgument, "F needs dimension >= 1");
  NonlinearFunctional f;
  f.kind_ = Kind::Linear;
  f.d_ = static_cast<int>(c.size());
  f.c_ = std::move(c);
  f.offset_ = offset;
  f.convex_ = true;
  return f;
}

NonlinearFunctional NonlinearFunctional::quadratic(Eigen::MatrixXd q, std::vector<double> c, double offset) {
  const auto d = static_cast<Eigen::Index>(c.size());
  if (d == 0 || q.rows() != d || q.cols() != d)
    throw Error(ErrorCode::InvalidArgument, "Q must be d×d with d = |c| >= 1");
  if ((q - q.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw Error(ErrorCode::InvalidArgument, "Q must be symmetric");
  NonlinearFunctional f;
  f.kind_ = Kind::Quadratic;
  f.d_ = static_cast<int>(d);
  f.c_ = std::move(c);
  f.offset_ = offset;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(q, Eigen::EigenvaluesOnly);
  f.convex_ = eig.eigenvalues().minCoeff() >= -kPsdTolerance;
  f.q_ = std::move(q);
  return f;
}

NonlinearFunctional NonlinearFunctional::custom(int dimension, Evaluator fn, bool convex) {
  if (dimension < 1) throw Error(ErrorCode::InvalidArgument, "F needs dimension >= 1");
  if (!fn) throw Error(ErrorCode::InvalidArgument, "custom F needs an evaluator");
  NonlinearFunctional f;
  f.kind_ = Kind::Custom;
  f.d_ = dimension;
  f.convex_ = convex;
  f.eval_ = std::move(fn);
  return f;
}

double NonlinearFunctional::operator()(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != d_) throw Error(ErrorCode::InvalidArgument, "argument has the wrong dimension");
  if (kind_ == Kind::Custom) return eval_(x);
  double v = offset_;
  for (int i = 0; i < d_; ++i) v += c_[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
  if (kind_ == Kind::Quadratic) {
    for (int i = 0; i < d_; ++i)
      for (int j = 0; j < d_; ++j) v += x[static_cast<std::size_t>(i)] * q_(i, j) * x[static_cast<std::size_t>(j)];
  }
  return v;
}

double NonlinearFunctional::scaled(int n, std::span<const double> sums) const {
  if (static_cast<int>(sums.size()) != d_) throw Error(ErrorCode::InvalidArgument, "argument has the wrong dimension");
  const double dn = static_cast<double>(n);
  if (kind_ == Kind::Custom) {
    std::vector<double> avg(sums.begin(), sums.end());
    for (double& a : avg) a /= dn;
    return dn * eval_(avg);
  }
  double v = 0.0;
  for (int i = 0; i < d_; ++i) v += c_[static_cast<std::size_t>(i)] * sums[static_cast<std::size_t>(i)];
  if (offset_ != 0.0) v += dn * offset_;
  if (kind_ == Kind::Quadratic) {
    double quad = 0.0;
    for (int i = 0; i < d_; ++i)
      for (int j = 0; j < d_; ++j)
        quad += sums[static_cast<std::size_t>(i)] * q_(i, j) * sums[static_cast<std::size_t>(j)];
    v += quad / dn;
  }
  return v;
}

NonlinearFunctional NonlinearFunctional::g_beta(double beta) const {
  NonlinearFunctional g;
  g.d_ = d_ + 1;
  g.convex_ = convex_;
  if (kind_ == Kind::Custom) {
    g.kind_ = Kind::Custom;
    const Evaluator inner = eval_;
    const int d = d_;
    g.eval_ = [inner, d, beta](std::span<const double> x) {
      return inner(x.first(static_cast<std::size_t>(d))) - beta * x[static_cast<std::size_t>(d)];
    };
    return g;
  }
  g.kind_ = kind_;
  g.c_ = c_;
  g.c_.push_back(-beta);
  g.offset_ = offset_;
  if (kind_ == Kind::Quadratic) {
    g.q_ = Eigen::MatrixXd::Zero(d_ + 1, d_ + 1);
    g.q_.topLeftCorner(d_, d_) = q_;
  }
  return g;
}

// ---------------------------------------------------------------------------
// PotentialVector

PotentialVector::PotentialVector(std::vector<Potential> components) : components_(std::move(components)) {
  if (components_.empty()) throw Error(ErrorCode::InvalidArgument, "Φ needs at least one component");
  for (const auto& p : components_)
    if (!(p.sft() == components_.front().sft()))
      throw Error(ErrorCode::RangeMismatch, "components of Φ live on different shifts");
}

int PotentialVector::max_range() const noexcept {
  int r = 1;
  for (const auto& p : components_) r = std::max(r, p.range());
  return r;
}

PotentialVector PotentialVector::appended(const Potential& psi) const {
  auto c = components_;
  c.push_back(psi);
  return PotentialVector(std::move(c));
}

// ---------------------------------------------------------------------------
// Estimators

PressureResult nonlinear_direct(const PotentialVector& phi, const NonlinearFunctional& f, int n, std::size_t cap) {
  require_dimension(phi, f);
  const int r = phi.max_range();
  if (n < r) throw Error(ErrorCode::InvalidArgument, "n must be at least the common range");
  const int length = n + r - 1;
  if (phi.sft().word_count(length) > static_cast<double>(cap))
    throw Error(ErrorCode::CapExceeded, "nonlinear estimate would enumerate more than the cap");
  WordWalker walker(phi.sft(), pointers(phi), std::numeric_limits<std::size_t>::max());
  std::vector<double> sums(static_cast<std::size_t>(phi.dimension()));
  const auto lse = detail::log_sum_exp_over_words(walker, length, [&](const WordWalker& w) {
    for (std::size_t i = 0; i < sums.size(); ++i) sums[i] = w.birkhoff(i, n);
    return f.scaled(n, sums);
  });
  PressureResult out;
  out.value = lse.log_sum / n;
  out.method = PressureMethod::NonlinearDirect;
  out.diagnostics.word_length = length;
  out.diagnostics.cylinders = lse.terms;
  out.diagnostics.overflow = lse.overflow;
  return out;
}

NonlinearVariational nonlinear_variational(const PotentialVector& phi, const NonlinearFunctional& f,
                                           const NonlinearSearchOptions& options) {
  require_dimension(phi, f);
  require_convex(f, options, ErrorCode::NonConvexWithoutAcknowledgement);
  const RecodedSystem rec = higher_block_recode(phi.sft(), phi.components(), phi.max_range());
  std::vector<double> means(static_cast<std::size_t>(phi.dimension()));
  const auto res = optimize_markov(
      rec.sft,
      [&](const MarkovMeasure& mu) {
        for (std::size_t i = 0; i < means.size(); ++i) means[i] = integrate_potential(mu, rec.potentials[i]);
        return entropy(mu) + f(means);
      },
      options.search);
  return {res.measure, res.value, !f.convex()};
}

PressureResult g_beta_pressure(const PotentialVector& phi, const Potential& psi, const NonlinearFunctional& f,
                               double beta, const GBetaMethod& method) {
  require_positive(psi);
  require_dimension(phi, f);
  const PotentialVector extended = phi.appended(psi);
  const NonlinearFunctional g = f.g_beta(beta);
  if (method.kind == GBetaMethod::Kind::Direct) return nonlinear_direct(extended, g, method.n);
  PressureResult out;
  const auto v = nonlinear_variational(extended, g, method.variational);
  out.value = v.value;
  out.method = PressureMethod::Variational;
  if (v.heuristic) out.diagnostics.note = "heuristic: F is not convex";
  return out;
}

std::pair<double, double> hull_bounds(const PotentialVector& phi, const NonlinearFunctional& f, int n,
                                      std::size_t cap) {
  require_dimension(phi, f);
  const int length = n + phi.max_range() - 1;
  WordWalker walker(phi.sft(), pointers(phi), cap);
  std::vector<double> avg(static_cast<std::size_t>(phi.dimension()));
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  walker.walk(length, [&](const WordWalker& w) {
    if (w.depth() < length) return true;
    for (std::size_t i = 0; i < avg.size(); ++i) avg[i] = w.birkhoff(i, n) / n;
    const double v = f(avg);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    return true;
  });
  return {lo, hi};
}

PressureResult nonlinear_induced_root(const PotentialVector& phi, const Potential& psi, const NonlinearFunctional& f,
                                      const NonlinearSearchOptions& options) {
  require_dimension(phi, f);
  require_positive(psi);
  require_convex(f, options, ErrorCode::NonConvexF);
  if (!phi.sft().irreducible()) throw Error(ErrorCode::NotIrreducible, "induced pressure needs an irreducible shift");

  GBetaMethod method;
  method.kind = GBetaMethod::Kind::Variational;
  method.variational = options;
  auto pressure = [&](double beta) { return g_beta_pressure(phi, psi, f, beta, method).value; };

  // The bracket comes from F over finitely many averages, which can miss the
  // hull extremes, so it is widened geometrically until the signs are right.
  const auto [f_min, f_max] = hull_bounds(phi, f);
  const double m = psi.min_value();
  const double big_m = psi.max_value();
  const double top = std::log(static_cast<double>(phi.sft().alphabet_size())) + f_max;
  double lo = std::min(f_min / big_m, f_min / m) - 1.0;
  double hi = std::max(top / m, top / big_m) + 1.0;
  PressureResult out;
  out.method = PressureMethod::Root;
  int widen = 0;
  while (pressure(lo) < 0.0) {
    if (++widen > 30) throw Error(ErrorCode::BracketFailure, "could not find β with P^{G_β} > 0");
    lo -= (hi - lo);
  }
  while (pressure(hi) > 0.0) {
    if (++widen > 30) throw Error(ErrorCode::BracketFailure, "could not find β with P^{G_β} < 0");
    hi += (hi - lo);
  }
  out.diagnostics.bracket_lo = lo;
  out.diagnostics.bracket_hi = hi;

  int it = 0;
  while (hi - lo > 1e-10 && it < 100) {
    const double mid = 0.5 * (lo + hi);
    (pressure(mid) > 0.0 ? lo : hi) = mid;
    ++it;
  }
  out.value = 0.5 * (lo + hi);
  out.diagnostics.iterations = it;
  out.diagnostics.residual = std::abs(pressure(out.value));
  if (out.diagnostics.residual > 1e-6)
    throw Error(ErrorCode::NoConvergence, "|P^{G_β}| above 1e-6 at the bisection root");
  if (!f.convex()) out.diagnostics.note = "heuristic: F is not convex, the root characterization is unproven here";
  return out;
}

PressureResult nonlinear_induced_direct(const PotentialVector& phi, const Potential& psi,
                                        const NonlinearFunctional& f, double T, int q, std::size_t cap) {
  require_dimension(phi, f);
  require_positive(psi);
  if (!(T > 0.0)) throw Error(ErrorCode::InvalidArgument, "T must be positive");
  if (q < std::max(phi.max_range(), psi.range()))
    throw Error(ErrorCode::InvalidArgument, "q must be at least the potential ranges");
  auto ptrs = pointers(phi);
  ptrs.push_back(&psi);
  WordWalker walker(phi.sft(), ptrs, cap);
  std::vector<double> sums(static_cast<std::size_t>(phi.dimension()));
  const auto sum = detail::induced_sum_over_prefixes(
      walker, psi, sums.size(), psi.min_value(), T, q, [&](const WordWalker& w, int n) {
        for (std::size_t i = 0; i < sums.size(); ++i) sums[i] = w.birkhoff(i, n);
        return f.scaled(n, sums);
      });
  if (sum.lse.terms == 0) throw Error(ErrorCode::EmptySum, "no prefix meets any X_n");
  PressureResult out;
  out.value = sum.lse.log_sum / T;
  out.method = PressureMethod::DirectInduced;
  out.diagnostics.word_length = sum.max_depth;
  out.diagnostics.cylinders = sum.lse.terms;
  out.diagnostics.overflow = sum.lse.overflow;
  if (sum.split > 0) out.diagnostics.note = std::to_string(sum.split) + " prefixes split by the X_n condition";
  return out;
}

ThresholdScan r_threshold_scan(const PotentialVector& phi, const Potential& psi, const NonlinearFunctional& f,
                               const std::vector<double>& beta_grid, int n_max, std::size_t cap) {
  require_dimension(phi, f);
  require_positive(psi);
  if (beta_grid.empty() || !std::is_sorted(beta_grid.begin(), beta_grid.end()))
    throw Error(ErrorCode::InvalidArgument, "β grid must be nonempty and sorted");
  if (n_max < 2 || n_max > 24) throw Error(ErrorCode::InvalidArgument, "n_max must lie in [2, 24]");
  const int q = std::max(phi.max_range(), psi.range());
  auto ptrs = pointers(phi);
  ptrs.push_back(&psi);
  const std::size_t psi_index = ptrs.size() - 1;
  WordWalker walker(phi.sft(), ptrs, cap);

  const std::size_t nb = beta_grid.size();
  const auto nn = static_cast<std::size_t>(n_max);
  std::vector<double> sums(static_cast<std::size_t>(phi.dimension()));
  // One max shift per (n, β).
  std::vector<double> shift(nn * nb, -std::numeric_limits<double>::infinity());
  std::vector<double> total(nn * nb, 0.0);
  auto visit = [&](bool first_pass) {
    return [&, first_pass](const WordWalker& w) {
      if (w.depth() < q) return true;
      const int n = w.depth() - q + 1;
      for (std::size_t i = 0; i < sums.size(); ++i) sums[i] = w.birkhoff(i, n);
      const double base = f.scaled(n, sums);
      const double s_psi = w.birkhoff(psi_index, n);
      for (std::size_t b = 0; b < nb; ++b) {
        const double e = base - beta_grid[b] * s_psi;
        const std::size_t at = static_cast<std::size_t>(n - 1) * nb + b;
        if (first_pass)
          shift[at] = std::max(shift[at], e);
        else
          total[at] += std::exp(e - shift[at]);
      }
      return true;
    };
  };
  walker.walk(n_max + q - 1, visit(true));
  walker.walk(n_max + q - 1, visit(false));

  ThresholdScan scan;
  for (std::size_t b = 0; b < nb; ++b) {
    ThresholdRow row;
    row.beta = beta_grid[b];
    double running = -std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < nn; ++n) {
      const double inc = shift[n * nb + b] + std::log(total[n * nb + b]);
      row.log_increments.push_back(inc);
      const double hi = std::max(running, inc);
      running = hi + std::log(std::exp(running - hi) + std::exp(inc - hi));
      row.log_partial_sums.push_back(running);
    }
    const double log_ratio = row.log_increments[nn - 1] - row.log_increments[nn - 2];
    row.last_ratio = std::exp(log_ratio);
    row.growing = log_ratio > 0.0;
    if (row.growing) {
      scan.last_growing = row.beta;
    } else if (!scan.first_decaying) {
      scan.first_decaying = row.beta;
    }
    scan.rows.push_back(std::move(row));
  }
  return scan;
}

// ---------------------------------------------------------------------------
// Conjugacy

bool ConjugacyReport::passed() const {
  return std::all_of(cases.begin(), cases.end(), [](const ConjugacyCase& c) { return c.passed; });
}

ConjugacyReport conjugacy_invariance_check(const PotentialVector& phi, const Potential& psi,
                                           const NonlinearFunctional& f, std::uint64_t seed, int direct_n) {
  const Sft& sft = phi.sft();
  std::vector<Symbol> perm(static_cast<std::size_t>(sft.alphabet_size()));
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  if (perm.size() > 1 && std::is_sorted(perm.begin(), perm.end())) std::swap(perm[0], perm[1]);

  auto all = phi.components();
  all.push_back(psi);
  const auto permuted = permute_symbols(sft, all, perm);
  const auto recoded = higher_block_recode(sft, all, std::max(2, std::max(phi.max_range(), psi.range())));
  auto split = [&](const std::vector<Potential>& pots) {
    return std::pair{PotentialVector(std::vector<Potential>(pots.begin(), pots.end() - 1)), pots.back()};
  };
  const auto [phi_p, psi_p] = split(permuted.potentials);
  const auto [phi_r, psi_r] = split(recoded.potentials);

  ConjugacyReport report;
  auto add = [&](std::string name, double before, double after, double tol) {
    report.cases.push_back({std::move(name), before, after, tol, std::abs(before - after) <= tol});
  };
  add("nonlinear_direct, permutation", nonlinear_direct(phi, f, direct_n).value,
      nonlinear_direct(phi_p, f, direct_n).value, 1e-9);
  const double root = nonlinear_induced_root(phi, psi, f).value;
  add("nonlinear_induced_root, permutation", root, nonlinear_induced_root(phi_p, psi_p, f).value, 1e-9);
  add("nonlinear_induced_root, 2-block recoding", root, nonlinear_induced_root(phi_r, psi_r, f).value, 1e-6);
  return report;
}

}  // namespace thermoform
