#include "thermoform/markov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace thermoform {

namespace {

constexpr double kRowSumTolerance = 1e-12;
constexpr double kStationaryTolerance = 1e-10;
constexpr double kStationaryResidual = 1e-13;

bool support_irreducible(const Eigen::MatrixXd& p) {
  const Eigen::Index k = p.rows();
  auto reach = [&](bool forward) {
    std::vector<char> seen(static_cast<std::size_t>(k), 0);
    std::vector<Eigen::Index> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      const Eigen::Index u = stack.back();
      stack.pop_back();
      for (Eigen::Index v = 0; v < k; ++v) {
        const double w = forward ? p(u, v) : p(v, u);
        if (w > 0.0 && !seen[static_cast<std::size_t>(v)]) {
          seen[static_cast<std::size_t>(v)] = 1;
          stack.push_back(v);
        }
      }
    }
    return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
  };
  return reach(true) && reach(false);
}

double stationary_residual(const Eigen::VectorXd& pi, const Eigen::MatrixXd& p) {
  return (p.transpose() * pi - pi).lpNorm<1>();
}

}  // namespace

MarkovMeasure::MarkovMeasure(Sft sft, Eigen::MatrixXd transition, Eigen::VectorXd stationary)
    : sft_(std::move(sft)), transition_(std::move(transition)), stationary_(std::move(stationary)) {
  const int k = sft_.alphabet_size();
  if (transition_.rows() != k || transition_.cols() != k || stationary_.size() != k)
    throw Error(ErrorCode::InvalidArgument, "transition/stationary dimensions do not match the alphabet");
  for (int i = 0; i < k; ++i) {
    double row = 0.0;
    for (int j = 0; j < k; ++j) {
      const double v = transition_(i, j);
      if (!std::isfinite(v) || v < 0.0) throw Error(ErrorCode::InvalidArgument, "transition entries must be >= 0");
      if (v > 0.0 && !sft_.allowed(i, j))
        throw Error(ErrorCode::InvalidArgument, "transition charges a forbidden edge");
      row += v;
    }
    if (std::abs(row - 1.0) > kRowSumTolerance)
      throw Error(ErrorCode::InvalidArgument, "transition row " + std::to_string(i) + " does not sum to 1");
  }
  if ((stationary_.array() < 0.0).any() || std::abs(stationary_.sum() - 1.0) > kStationaryTolerance)
    throw Error(ErrorCode::InvalidArgument, "stationary vector is not a probability vector");
  if (stationary_residual(stationary_, transition_) > kStationaryTolerance)
    throw Error(ErrorCode::InvalidArgument, "stationary vector is not invariant");
}

MarkovMeasure MarkovMeasure::from_transition(Sft sft, Eigen::MatrixXd transition) {
  Eigen::VectorXd pi = stationary_distribution(transition, sft);
  return MarkovMeasure(std::move(sft), std::move(transition), std::move(pi));
}

double MarkovMeasure::cylinder_mass(std::span<const Symbol> word) const {
  if (word.empty()) return 1.0;
  if (!sft_.admissible(word)) return 0.0;
  double mass = stationary_(word[0]);
  for (std::size_t i = 1; i < word.size(); ++i) mass *= transition_(word[i - 1], word[i]);
  return mass;
}

Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& transition, const Sft& sft) {
  const int k = sft.alphabet_size();
  if (transition.rows() != k || transition.cols() != k)
    throw Error(ErrorCode::InvalidArgument, "transition dimensions do not match the alphabet");
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      if (transition(i, j) > 0.0 && !sft.allowed(i, j))
        throw Error(ErrorCode::InvalidArgument, "transition charges a forbidden edge");
  if (!support_irreducible(transition))
    throw Error(ErrorCode::ReducibleSupport, "transition support is not irreducible; stationary vector not unique");

  // Direct solve of π(P - I) = 0, Σπ = 1, then lazy power steps (P + I)/2
  // until the invariance residual drops below 1e-13.
  Eigen::MatrixXd a = transition.transpose() - Eigen::MatrixXd::Identity(k, k);
  a.row(k - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(k);
  b(k - 1) = 1.0;
  Eigen::VectorXd pi = a.fullPivLu().solve(b);
  if (!pi.allFinite()) pi = Eigen::VectorXd::Constant(k, 1.0 / k);
  pi = pi.cwiseMax(0.0);
  pi /= pi.sum();

  const Eigen::MatrixXd lazy_t = 0.5 * (transition.transpose() + Eigen::MatrixXd::Identity(k, k));
  for (int it = 0; it < 1000000 && stationary_residual(pi, transition) > kStationaryResidual; ++it) {
    pi = lazy_t * pi;
    pi /= pi.sum();
  }
  if (stationary_residual(pi, transition) > kStationaryResidual)
    throw Error(ErrorCode::NoConvergence, "stationary distribution did not reach residual 1e-13");
  return pi;
}

double entropy(const MarkovMeasure& measure) {
  const auto& p = measure.transition();
  const auto& pi = measure.stationary();
  double h = 0.0;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j < p.cols(); ++j) {
      const double v = p(i, j);
      if (v > 0.0) row -= v * std::log(v);
    }
    h += pi(i) * row;
  }
  return std::max(h, 0.0);
}

double integrate_potential(const MarkovMeasure& measure, const Potential& pot) {
  if (!(pot.sft() == measure.sft()))
    throw Error(ErrorCode::RangeMismatch, "potential and measure live on different shifts");
  const auto& p = measure.transition();
  const auto& pi = measure.stationary();
  double total = 0.0;
  WordWalker walker(pot.sft(), {&pot});
  const int r = pot.range();
  std::vector<double> mass(static_cast<std::size_t>(r) + 1, 1.0);
  walker.walk(r, [&](const WordWalker& w) {
    const int d = w.depth();
    const auto word = w.word();
    const auto du = static_cast<std::size_t>(d);
    mass[du] = d == 1 ? pi(word[0]) : mass[du - 1] * p(word[du - 2], word[du - 1]);
    if (mass[du] == 0.0) return false;
    if (d == r) total += mass[du] * w.birkhoff(0, 1);
    return true;
  });
  return total;
}

MarkovMeasure cycle_measure(const Sft& sft, const Cycle& cycle) {
  const Cycle checked(sft, cycle.states());
  const int k = sft.alphabet_size();
  const auto& s = checked.states();
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(k, k);
  Eigen::VectorXd pi = Eigen::VectorXd::Zero(k);
  for (std::size_t i = 0; i < s.size(); ++i) {
    p(s[i], s[(i + 1) % s.size()]) = 1.0;
    pi(s[i]) = 1.0 / static_cast<double>(s.size());
  }
  // States off the cycle carry no mass; give them any allowed row.
  for (int i = 0; i < k; ++i)
    if (pi(i) == 0.0) p(i, sft.successors(i).front()) = 1.0;
  return MarkovMeasure(sft, std::move(p), std::move(pi));
}

// ---------------------------------------------------------------------------

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, const NelderMeadOptions& options) {
  const std::size_t n = x0.size();
  NelderMeadResult result;
  if (n == 0) {
    result.argmin = x0;
    result.value = f(x0);
    result.converged = true;
    return result;
  }
  std::vector<std::vector<double>> simplex(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += options.initial_step;
  std::vector<double> values(n + 1);
  for (std::size_t i = 0; i <= n; ++i) values[i] = f(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  auto sort_simplex = [&] {
    for (std::size_t i = 0; i <= n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<std::vector<double>> s2(n + 1);
    std::vector<double> v2(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      s2[i] = std::move(simplex[order[i]]);
      v2[i] = values[order[i]];
    }
    simplex = std::move(s2);
    values = std::move(v2);
  };
  auto diameter = [&] {
    double d = 0.0;
    for (std::size_t i = 1; i <= n; ++i)
      for (std::size_t j = 0; j < n; ++j) d = std::max(d, std::abs(simplex[i][j] - simplex[0][j]));
    return d;
  };
  auto along = [&](const std::vector<double>& centroid, const std::vector<double>& worst, double t) {
    std::vector<double> x(n);
    for (std::size_t j = 0; j < n; ++j) x[j] = centroid[j] + t * (worst[j] - centroid[j]);
    return x;
  };

  int it = 0;
  sort_simplex();
  for (; it < options.max_iterations; ++it) {
    if (diameter() <= options.simplex_tolerance) {
      result.converged = true;
      break;
    }
    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / static_cast<double>(n);

    const auto xr = along(centroid, simplex[n], -1.0);
    const double fr = f(xr);
    if (fr < values[0]) {
      const auto xe = along(centroid, simplex[n], -2.0);
      const double fe = f(xe);
      if (fe < fr) {
        simplex[n] = xe;
        values[n] = fe;
      } else {
        simplex[n] = xr;
        values[n] = fr;
      }
    } else if (fr < values[n - 1]) {
      simplex[n] = xr;
      values[n] = fr;
    } else {
      const bool outside = fr < values[n];
      const auto xc = outside ? along(centroid, simplex[n], -0.5) : along(centroid, simplex[n], 0.5);
      const double fc = f(xc);
      if (fc < (outside ? fr : values[n])) {
        simplex[n] = xc;
        values[n] = fc;
      } else {
        for (std::size_t i = 1; i <= n; ++i) {
          for (std::size_t j = 0; j < n; ++j) simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
          values[i] = f(simplex[i]);
        }
      }
    }
    sort_simplex();
  }
  if (!result.converged && diameter() <= options.simplex_tolerance) result.converged = true;
  result.argmin = simplex[0];
  result.value = values[0];
  result.iterations = it;
  result.simplex_diameter = diameter();
  result.value_spread = values[n] - values[0];
  return result;
}

RowLogitMap::RowLogitMap(const Sft& sft) : sft_(sft) {
  for (int i = 0; i < sft.alphabet_size(); ++i) dim_ += sft.successors(i).size() - 1;
}

Eigen::MatrixXd RowLogitMap::transition(const std::vector<double>& logits) const {
  const int k = sft_.alphabet_size();
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(k, k);
  std::size_t pos = 0;
  for (int i = 0; i < k; ++i) {
    const auto& succ = sft_.successors(i);
    std::vector<double> z(succ.size(), 0.0);
    for (std::size_t a = 0; a + 1 < succ.size(); ++a) z[a] = logits[pos++];
    const double zmax = *std::max_element(z.begin(), z.end());
    double total = 0.0;
    for (double& v : z) {
      v = std::max(std::exp(v - zmax), 1e-300);
      total += v;
    }
    for (std::size_t a = 0; a < succ.size(); ++a) p(i, succ[a]) = z[a] / total;
  }
  return p;
}

MarkovSearchResult optimize_markov(const Sft& sft, const std::function<double(const MarkovMeasure&)>& objective,
                                   const MarkovSearchOptions& options) {
  if (options.restarts < 1) throw Error(ErrorCode::InvalidArgument, "restarts must be >= 1");
  const RowLogitMap map(sft);
  int evaluations = 0;
  auto negated = [&](const std::vector<double>& x) {
    ++evaluations;
    const MarkovMeasure m = MarkovMeasure::from_transition(sft, map.transition(x));
    const double v = objective(m);
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteObjective, "objective returned a non-finite value");
    return -v;
  };

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, options.start_spread);
  const int restarts = map.dimension() == 0 ? 1 : options.restarts;

  NelderMeadResult best;
  bool have = false;
  for (int r = 0; r < restarts; ++r) {
    std::vector<double> x0(map.dimension(), 0.0);
    if (r > 0)
      for (double& v : x0) v = normal(rng);
    NelderMeadResult res = nelder_mead(negated, x0, options.simplex);
    // Ties broken by lexicographic parameters so the reduction order is irrelevant.
    if (!have || res.value < best.value || (res.value == best.value && res.argmin < best.argmin)) {
      best = std::move(res);
      have = true;
    }
  }
  MarkovMeasure m = MarkovMeasure::from_transition(sft, map.transition(best.argmin));
  const double value = objective(m);
  return MarkovSearchResult{std::move(m), value, best.value_spread, restarts, evaluations};
}

}  // namespace thermoform
