#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "thermoform/markov.hpp"
#include "thermoform/sft.hpp"

namespace thermoform {

enum class PressureMethod { Spectral, Cylinder, Root, DirectInduced, NonlinearDirect, Variational };

std::string_view to_string(PressureMethod method) noexcept;

struct PressureDiagnostics {
  int iterations = 0;
  /// Longest word length enumerated by cylinder-type estimators.
  int word_length = 0;
  double residual = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  std::size_t cylinders = 0;
  /// Some exponent exceeded 700 nats; the value is still exact through the
  /// max-shifted reduction.
  bool overflow = false;
  std::string note;
};

struct PressureResult {
  double value = 0.0;
  PressureMethod method = PressureMethod::Spectral;
  PressureDiagnostics diagnostics;
};

/// Perron data of the weighted transfer matrix M_ij = A_ij e^{φ(i)}.
struct PerronData {
  double log_radius = 0.0;
  Eigen::VectorXd right;  // positive, max entry 1
  int iterations = 0;
  double relative_gap = 0.0;  // Collatz–Wielandt bracket width / radius
};

/// Power iteration with a positive diagonal shift, run until the
/// Collatz–Wielandt bounds min/max (Mx)_i/x_i agree to 1e-13 relatively.
/// `weights` is row-scaled so that its largest entry is 1; log_scale is added
/// back to the returned log radius.
PerronData perron_root(const Eigen::MatrixXd& weights, double log_scale, int max_iterations = 100000);

/// log ρ(A_ij e^{φ(i)}) for a range-1 φ on an irreducible SFT.
PressureResult spectral_pressure(const Sft& sft, const Potential& phi);

/// Same as spectral_pressure with φ given as one value per symbol.
PressureResult spectral_pressure(const Sft& sft, std::span<const double> symbol_values);

/// (1/n) log Σ_{|w| = n+r-1} e^{S_nφ(w)} over admissible words.
PressureResult cylinder_pressure_estimate(const Sft& sft, const Potential& phi, int n,
                                          std::size_t cap = default_enumeration_cap());

/// Gibbs Markov measure P_ij = M_ij r_j / (λ r_i), π_i ∝ l_i r_i, for a
/// range-1 φ on an irreducible SFT.
MarkovMeasure rpf_equilibrium(const Sft& sft, const Potential& phi);

/// Applies spectral_pressure after recoding φ to range 1 when needed.
double topological_pressure(const Sft& sft, const Potential& phi);

}  // namespace thermoform
