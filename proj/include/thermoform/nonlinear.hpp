#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "thermoform/markov.hpp"
#include "thermoform/pressure.hpp"
#include "thermoform/sft.hpp"

namespace thermoform {

/// F: ℝ^d → ℝ, either F(x) = xᵀQx + cᵀx + offset or a user evaluator.
class NonlinearFunctional {
 public:
  enum class Kind { Linear, Quadratic, Custom };
  using Evaluator = std::function<double(std::span<const double>)>;

  static NonlinearFunctional linear(std::vector<double> c, double offset = 0.0);
  /// Q must be symmetric; convexity is decided by its smallest eigenvalue
  /// (>= -1e-10).
  static NonlinearFunctional quadratic(Eigen::MatrixXd q, std::vector<double> c, double offset = 0.0);
  static NonlinearFunctional custom(int dimension, Evaluator f, bool convex);
  /// F ≡ value on ℝ^d.
  static NonlinearFunctional constant(int dimension, double value) {
    return linear(std::vector<double>(static_cast<std::size_t>(dimension), 0.0), value);
  }

  int dimension() const noexcept { return d_; }
  Kind kind() const noexcept { return kind_; }
  bool convex() const noexcept { return convex_; }
  const std::vector<double>& linear_part() const noexcept { return c_; }
  const Eigen::MatrixXd& quadratic_part() const noexcept { return q_; }
  double offset() const noexcept { return offset_; }

  double operator()(std::span<const double> x) const;
  /// n·F(S/n) for a Birkhoff vector S. Exact linear algebra for the linear
  /// kind, so F = <c,·> reproduces Σ c_i S_i with no division.
  double scaled(int n, std::span<const double> sums) const;

  /// G_β(a, b) = F(a) − βb on ℝ^{d+1}; convex whenever F is.
  NonlinearFunctional g_beta(double beta) const;

 private:
  NonlinearFunctional() = default;

  Kind kind_ = Kind::Linear;
  int d_ = 0;
  bool convex_ = true;
  std::vector<double> c_;
  Eigen::MatrixXd q_;
  double offset_ = 0.0;
  Evaluator eval_;
};

/// Φ = (φ_1, …, φ_d) on one shift.
class PotentialVector {
 public:
  explicit PotentialVector(std::vector<Potential> components);

  const Sft& sft() const noexcept { return components_.front().sft(); }
  int dimension() const noexcept { return static_cast<int>(components_.size()); }
  const std::vector<Potential>& components() const noexcept { return components_; }
  const Potential& operator[](std::size_t i) const { return components_[i]; }
  int max_range() const noexcept;

  /// (Φ, ψ).
  PotentialVector appended(const Potential& psi) const;

 private:
  std::vector<Potential> components_;
};

/// (1/n) log Σ over (n+r-1)-words of exp[n F(S_nΦ/n)].
PressureResult nonlinear_direct(const PotentialVector& phi, const NonlinearFunctional& f, int n,
                                std::size_t cap = default_enumeration_cap());

struct NonlinearSearchOptions {
  MarkovSearchOptions search;
  /// Accept non-convex F; results are then only heuristic.
  bool heuristic = false;
};

struct NonlinearVariational {
  MarkovMeasure measure;  // lives on the max-range block shift
  double value = 0.0;
  bool heuristic = false;
};

/// sup over Markov measures of h_μ + F(∫Φ dμ); a lower bound for P^F(Φ).
NonlinearVariational nonlinear_variational(const PotentialVector& phi, const NonlinearFunctional& f,
                                           const NonlinearSearchOptions& options = {});

struct GBetaMethod {
  enum class Kind { Direct, Variational };
  Kind kind = Kind::Variational;
  int n = 12;  // direct only
  NonlinearSearchOptions variational;
};

/// P^{G_β}(Φ, ψ).
PressureResult g_beta_pressure(const PotentialVector& phi, const Potential& psi, const NonlinearFunctional& f,
                               double beta, const GBetaMethod& method = {});

/// Min and max of F over the Birkhoff averages S_nΦ/n of all (n+r-1)-words.
std::pair<double, double> hull_bounds(const PotentialVector& phi, const NonlinearFunctional& f, int n = 8,
                                      std::size_t cap = default_enumeration_cap());

/// P_ψ^F(Φ): the root of β ↦ P^{G_β}(Φ, ψ), bisected on the variational value.
PressureResult nonlinear_induced_root(const PotentialVector& phi, const Potential& psi, const NonlinearFunctional& f,
                                      const NonlinearSearchOptions& options = {});

/// (1/T) log Σ_{n ∈ S_T} Σ exp[n F(S_nΦ/n)] over the prefixes meeting X_n,
/// with X_n as in direct_induced_estimate.
PressureResult nonlinear_induced_direct(const PotentialVector& phi, const Potential& psi,
                                        const NonlinearFunctional& f, double T, int q,
                                        std::size_t cap = default_enumeration_cap());

struct ThresholdRow {
  double beta = 0.0;
  /// log of Σ_{m<=n} I_m for n = 1..n_max.
  std::vector<double> log_partial_sums;
  /// log I_n with I_n = Σ exp[n F(S_nΦ/n) − β S_nψ].
  std::vector<double> log_increments;
  double last_ratio = 0.0;  // I_{n_max} / I_{n_max-1}
  bool growing = false;
};

struct ThresholdScan {
  std::vector<ThresholdRow> rows;
  /// Last growing and first decaying β, when the grid brackets a switch.
  std::optional<double> last_growing;
  std::optional<double> first_decaying;
};

/// Partial sums of exp[n F(S_nΦ/n) − β S_nψ] for each β on a sorted grid.
/// Every cylinder is counted (T = 0, so Y_n is the whole space).
ThresholdScan r_threshold_scan(const PotentialVector& phi, const Potential& psi, const NonlinearFunctional& f,
                               const std::vector<double>& beta_grid, int n_max,
                               std::size_t cap = default_enumeration_cap());

struct ConjugacyCase {
  std::string name;
  double before = 0.0;
  double after = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct ConjugacyReport {
  std::vector<ConjugacyCase> cases;
  bool passed() const;
};

/// Compares nonlinear_direct and nonlinear_induced_root across a random
/// symbol permutation (1e-9) and the 2-block recoding (1e-6, root only).
ConjugacyReport conjugacy_invariance_check(const PotentialVector& phi, const Potential& psi,
                                           const NonlinearFunctional& f, std::uint64_t seed, int direct_n = 8);

}  // namespace thermoform
