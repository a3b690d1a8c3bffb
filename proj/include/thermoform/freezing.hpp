#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "thermoform/induced.hpp"
#include "thermoform/markov.hpp"
#include "thermoform/sft.hpp"

namespace thermoform {

/// Max over invariant measures of ∫φ/∫ψ, with a cycle attaining it.
///
/// Potentials of range > 1 are handled on the block shift of
/// InducedProblem::canonical(), so the witness and the edges then use block
/// symbols.
struct CycleRatioResult {
  double value = 0.0;
  Cycle witness;
  /// Edges lying on some cycle of maximal ratio.
  std::vector<std::pair<Symbol, Symbol>> subgraph_edges;
  /// Whether subgraph_edges is every edge of the shift.
  bool full = false;
  int iterations = 0;
};

/// Largest mean weight over cycles of the graph with weight w[i][j] on edge
/// i→j (Karp). Entries for missing edges are ignored.
double max_cycle_mean(const Sft& sft, const std::vector<double>& vertex_weight);

CycleRatioResult max_cycle_ratio(const Potential& phi, const Potential& psi);

struct HInfinity {
  double value = 0.0;
  /// Every cycle of the maximizing subgraph attains the max ratio, so the
  /// subgraph carries exactly the maximizing measures. Otherwise value is
  /// only an upper bound.
  bool exact = true;
};

/// sup{h_μ/∫ψ dμ : μ maximizes ∫φ/∫ψ}.
HInfinity h_infinity(const Potential& phi, const Potential& psi, const CycleRatioResult& max);
HInfinity h_infinity(const Potential& phi, const Potential& psi);

struct BetaSweep {
  std::vector<double> betas;
  std::vector<double> pressures;         // P_ψ(βφ)
  std::vector<double> ratios;            // ∫φ dμ_β / ∫ψ dμ_β
  std::vector<double> scaled_entropies;  // h(μ_β) / ∫ψ dμ_β
  double max_ratio = 0.0;
  double h_inf = 0.0;
  std::vector<double> gaps;  // pressure − (β·max_ratio + h_inf)
  /// The maximizing subgraph is the whole shift.
  bool subgraph_full = false;
};

BetaSweep beta_sweep(const Potential& phi, const Potential& psi, const std::vector<double>& betas);

struct FreezingVerdict {
  enum class Kind { Frozen, Asymptotic, Indeterminate };
  Kind kind = Kind::Indeterminate;
  double beta0 = 0.0;  // Frozen only
  std::string reason;
};

std::string to_string(FreezingVerdict::Kind kind);

/// Frozen at β₀ needs the gaps to vanish from β₀ on and a maximizing
/// subgraph covering every edge: equilibria here are fully supported Markov
/// measures, so a small gap alone cannot mean they have become maximizing.
/// Asymptotic: gaps positive, nonincreasing within tol, and the last below a
/// tenth of the first.
FreezingVerdict detect_freezing(const BetaSweep& sweep, double tol = 1e-7);

struct ZeroTemperatureRow {
  double beta = 0.0;
  std::vector<double> masses;  // cylinder masses of the test words
  double ratio = 0.0;
  double ratio_error = 0.0;  // |ratio − Max|
};

struct ZeroTemperatureReport {
  std::vector<Word> words;  // admissible words of length test_depth
  std::vector<ZeroTemperatureRow> rows;
  /// sup-norm change of the masses between consecutive β.
  std::vector<double> cauchy;
  double max_ratio = 0.0;
  /// β·|ratio − Max| at the second to last point; the last point should be
  /// within max(1e-6, C/β).
  double constant = 0.0;
  bool ratio_converged = false;
};

std::vector<double> default_beta_schedule();

ZeroTemperatureReport zero_temperature_limit(const Potential& phi, const Potential& psi,
                                             const std::vector<double>& schedule = default_beta_schedule(),
                                             int test_depth = 2);

struct DifferentiabilityReport {
  double beta0 = 0.0;
  double derivative = 0.0;  // central difference of β ↦ P_ψ(βφ)
  double ratio = 0.0;       // ∫φ/∫ψ for the equilibrium at β₀
  double difference = 0.0;
};

DifferentiabilityReport differentiability_check(const Potential& phi, const Potential& psi, double beta0,
                                                double step = 1e-4);

}  // namespace thermoform
