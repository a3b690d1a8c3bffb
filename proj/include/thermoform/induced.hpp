#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "thermoform/markov.hpp"
#include "thermoform/pressure.hpp"
#include "thermoform/sft.hpp"

namespace thermoform {

/// The pair (φ, ψ) with ψ > 0 whose induced pressure P_ψ(φ) is wanted.
///
/// Keeps the original potentials and a range-1 recoding onto the
/// max(range)-block shift, where all spectral work happens.
class InducedProblem {
 public:
  /// Throws NonPositiveScaling unless min ψ > 0.
  InducedProblem(Potential phi, Potential psi, std::string label = {});

  const Sft& sft() const noexcept { return phi_.sft(); }
  const Potential& phi() const noexcept { return phi_; }
  const Potential& psi() const noexcept { return psi_; }
  const std::string& label() const noexcept { return label_; }
  double psi_min() const noexcept { return psi_.min_value(); }
  double psi_max() const noexcept { return psi_.max_value(); }

  /// Block presentation with potentials {φ, ψ} at range 1.
  const RecodedSystem& canonical() const noexcept { return canonical_; }
  /// A potential of range <= canonical().block moved onto the block shift.
  Potential lift(const Potential& g) const;

  InducedProblem with_phi(Potential phi) const;

 private:
  Potential phi_;
  Potential psi_;
  std::string label_;
  RecodedSystem canonical_;
};

struct BowenOptions {
  /// Skip the P_top(φ)/s shortcut for constant ψ ≡ s.
  bool force_bisection = false;
};

/// P_ψ(φ) as the root β of P_top(φ − βψ) = 0, found by bisection on the
/// spectral pressure.
PressureResult bowen_root(const InducedProblem& problem, const BowenOptions& options = {});

/// (1/T) log Σ_{n ∈ S_T} Σ e^{S_nφ} over the (n+q-1)-prefixes that meet
/// X_n = {S_nψ <= T < S_{n+1}ψ}. Membership is decided exactly on (n+q)-words.
PressureResult direct_induced_estimate(const InducedProblem& problem, double T, int q,
                                       std::size_t cap = default_enumeration_cap());

/// Gibbs measure of φ − β*ψ on canonical().sft, β* = bowen_root.
MarkovMeasure induced_equilibrium(const InducedProblem& problem);

struct QuotientRow {
  double t = 0.0;
  double right = 0.0;  // (P(φ+tg) − P(φ)) / t
  double left = 0.0;   // (P(φ) − P(φ−tg)) / t
};

struct DirectionalDerivatives {
  double d_minus = 0.0;
  double d_plus = 0.0;
  std::vector<QuotientRow> table;
};

std::vector<double> default_t_grid();

/// One-sided difference quotients of t ↦ P_ψ(φ+tg) on a decreasing grid.
DirectionalDerivatives directional_derivatives(const InducedProblem& problem, const Potential& g,
                                               const std::vector<double>& t_grid = default_t_grid());

struct TangentCase {
  std::string label;
  double pressure_gain = 0.0;  // P_ψ(φ+g) − P_ψ(φ)
  double ratio = 0.0;          // ∫g dμ / ∫ψ dμ
  bool violated = false;
};

struct TangentReport {
  std::vector<TangentCase> cases;
  std::size_t violations = 0;
  /// "no violation found" or a count; sampling can never certify tangency.
  std::string summary;
};

/// Checks P_ψ(φ+g) − P_ψ(φ) >= ∫g dμ / ∫ψ dμ − 1e-9 for each g.
/// μ must live on problem.canonical().sft.
TangentReport tangent_check(const InducedProblem& problem, const MarkovMeasure& mu,
                            const std::vector<Potential>& g_samples);

/// Same with `count` random range-1 g, entries uniform in [−1, 1].
TangentReport tangent_check(const InducedProblem& problem, const MarkovMeasure& mu, std::uint64_t seed,
                            int count = 64);

struct PropertyCase {
  std::string name;
  int trials = 0;
  int failures = 0;
  /// Largest violation seen (0 when everything held).
  double worst = 0.0;
};

struct PropertyReport {
  std::vector<PropertyCase> cases;
  bool passed() const;
};

struct PropertyTolerances {
  double identity = 1e-8;
  double inequality = 1e-9;
};

/// Monotonicity, bounds, convexity, scaling, subadditivity, cohomology
/// invariance and the invariant-measure bound on 20 random draws each.
PropertyReport induced_property_suite(const InducedProblem& problem, std::uint64_t seed,
                                      const PropertyTolerances& tol = {}, int draws = 20);

}  // namespace thermoform
