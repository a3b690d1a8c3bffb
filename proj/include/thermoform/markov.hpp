#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "thermoform/sft.hpp"

namespace thermoform {

/// Order-1 Markov measure on an SFT: a row-stochastic transition matrix
/// supported on the adjacency, together with its stationary vector.
class MarkovMeasure {
 public:
  /// Checks support ⊆ adjacency, row sums within 1e-12 and stationarity
  /// within 1e-10.
  MarkovMeasure(Sft sft, Eigen::MatrixXd transition, Eigen::VectorXd stationary);

  /// Computes the stationary vector; throws ReducibleSupport when it is not
  /// unique.
  static MarkovMeasure from_transition(Sft sft, Eigen::MatrixXd transition);

  const Sft& sft() const noexcept { return sft_; }
  const Eigen::MatrixXd& transition() const noexcept { return transition_; }
  const Eigen::VectorXd& stationary() const noexcept { return stationary_; }

  /// π_{w0} Π P_{w_i w_{i+1}}; zero for inadmissible words.
  double cylinder_mass(std::span<const Symbol> word) const;

 private:
  Sft sft_;
  Eigen::MatrixXd transition_;
  Eigen::VectorXd stationary_;
};

Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& transition, const Sft& sft);

/// Kolmogorov–Sinai entropy in nats, with 0·log 0 = 0.
double entropy(const MarkovMeasure& measure);

double integrate_potential(const MarkovMeasure& measure, const Potential& pot);

/// Deterministic walk along the cycle; uniform on the cycle states.
MarkovMeasure cycle_measure(const Sft& sft, const Cycle& cycle);

// ---------------------------------------------------------------------------
// Derivative-free maximization over Markov measures

struct NelderMeadOptions {
  int max_iterations = 2000;
  double simplex_tolerance = 1e-9;
  double initial_step = 1.0;
};

struct NelderMeadResult {
  std::vector<double> argmin;
  double value = 0.0;
  int iterations = 0;
  double simplex_diameter = 0.0;
  double value_spread = 0.0;
  bool converged = false;
};

/// Minimizes f from x0 with the standard reflection/expansion/contraction/
/// shrink coefficients (1, 2, 1/2, 1/2).
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, const NelderMeadOptions& options = {});

struct MarkovSearchOptions {
  int restarts = 20;
  std::uint64_t seed = 0;
  NelderMeadOptions simplex{};
  /// Standard deviation of the random starting logits.
  double start_spread = 1.5;
};

struct MarkovSearchResult {
  MarkovMeasure measure;
  double value;
  /// Simplex value spread of the winning restart.
  double residual;
  int restarts;
  int evaluations;
};

/// Row-logit parameterization: row i carries one unconstrained real per
/// allowed transition except the last, which is pinned to 0, and the row is
/// the normalized exponential of its logits.
class RowLogitMap {
 public:
  explicit RowLogitMap(const Sft& sft);
  std::size_t dimension() const noexcept { return dim_; }
  Eigen::MatrixXd transition(const std::vector<double>& logits) const;

 private:
  Sft sft_;
  std::size_t dim_ = 0;
};

/// Multi-start Nelder–Mead maximization of `objective` over Markov measures
/// supported on the full adjacency. Deterministic for a given seed.
MarkovSearchResult optimize_markov(const Sft& sft, const std::function<double(const MarkovMeasure&)>& objective,
                                   const MarkovSearchOptions& options = {});

}  // namespace thermoform
