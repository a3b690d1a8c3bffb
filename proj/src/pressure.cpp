#include "thermoform/pressure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "detail/log_sum_exp.hpp"

namespace thermoform {

std::string_view to_string(PressureMethod method) noexcept {
  switch (method) {
    case PressureMethod::Spectral: return "spectral";
    case PressureMethod::Cylinder: return "cylinder";
    case PressureMethod::Root: return "root";
    case PressureMethod::DirectInduced: return "direct_induced";
    case PressureMethod::NonlinearDirect: return "nonlinear_direct";
    case PressureMethod::Variational: return "variational";
  }
  return "unknown";
}

namespace {

constexpr double kPerronTolerance = 1e-13;

void require_range_one(const Potential& phi) {
  if (phi.range() != 1)
    throw Error(ErrorCode::RangeMismatch, "spectral methods need a range-1 potential; recode first");
}

std::vector<double> symbol_values(const Sft& sft, const Potential& phi) {
  if (!(phi.sft() == sft)) throw Error(ErrorCode::RangeMismatch, "potential lives on a different shift");
  std::vector<double> v(static_cast<std::size_t>(sft.alphabet_size()));
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = phi.value_at_code(i);
  return v;
}

// M_ij = A_ij e^{φ(i) - max φ}
Eigen::MatrixXd scaled_weights(const Sft& sft, std::span<const double> phi) {
  if (phi.size() != static_cast<std::size_t>(sft.alphabet_size()))
    throw Error(ErrorCode::RangeMismatch, "need one value per symbol");
  const int k = sft.alphabet_size();
  const double top = *std::max_element(phi.begin(), phi.end());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    const double w = std::exp(phi[static_cast<std::size_t>(i)] - top);
    if (w == 0.0) throw Error(ErrorCode::NoConvergence, "potential spread too large for double precision");
    for (Symbol j : sft.successors(i)) m(i, j) = w;
  }
  return m;
}

}  // namespace

PerronData perron_root(const Eigen::MatrixXd& weights, double log_scale, int max_iterations) {
  const Eigen::Index k = weights.rows();
  Eigen::VectorXd x = Eigen::VectorXd::Ones(k);
  PerronData out;
  double best_gap = std::numeric_limits<double>::infinity();
  double best_radius = 0.0;
  Eigen::VectorXd best_x = x;
  int stalled = 0;
  for (int it = 1; it <= max_iterations; ++it) {
    const Eigen::VectorXd y = weights * x;
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) {
      const double ratio = y(i) / x(i);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    const double gap = (hi - lo) / hi;
    if (gap < best_gap) {
      best_gap = gap;
      best_radius = 0.5 * (lo + hi);
      best_x = x;
      stalled = 0;
    } else {
      ++stalled;
    }
    out.iterations = it;
    // Keep going past the tolerance while the bracket still tightens.
    if (best_gap <= 1e-15 || (best_gap <= kPerronTolerance && stalled >= 8)) break;
    // Shifting by the lower bound lo <= ρ keeps every iterate positive and
    // damps the peripheral eigenvalues of periodic matrices.
    x = y + lo * x;
    x /= x.maxCoeff();
  }
  if (best_gap > kPerronTolerance)
    throw Error(ErrorCode::NoConvergence, "power iteration did not converge to relative gap 1e-13");
  out.log_radius = log_scale + std::log(best_radius);
  out.right = best_x / best_x.maxCoeff();
  out.relative_gap = best_gap;
  return out;
}

PressureResult spectral_pressure(const Sft& sft, const Potential& phi) {
  require_range_one(phi);
  return spectral_pressure(sft, symbol_values(sft, phi));
}

PressureResult spectral_pressure(const Sft& sft, std::span<const double> phi) {
  if (!sft.irreducible()) throw Error(ErrorCode::NotIrreducible, "spectral pressure needs an irreducible shift");
  for (double v : phi)
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "potential values must be finite");
  const PerronData data = perron_root(scaled_weights(sft, phi), *std::max_element(phi.begin(), phi.end()));
  PressureResult r;
  r.value = data.log_radius;
  r.method = PressureMethod::Spectral;
  r.diagnostics.iterations = data.iterations;
  r.diagnostics.residual = data.relative_gap;
  return r;
}

PressureResult cylinder_pressure_estimate(const Sft& sft, const Potential& phi, int n, std::size_t cap) {
  if (n < phi.range()) throw Error(ErrorCode::InvalidArgument, "n must be at least the potential range");
  const int length = n + phi.range() - 1;
  if (sft.word_count(length) > static_cast<double>(cap))
    throw Error(ErrorCode::CapExceeded, "cylinder estimate would enumerate more than the cap");
  WordWalker walker(sft, {&phi}, std::numeric_limits<std::size_t>::max());
  const auto lse = detail::log_sum_exp_over_words(walker, length, [n](const WordWalker& w) { return w.birkhoff(0, n); });
  PressureResult r;
  r.value = lse.log_sum / n;
  r.method = PressureMethod::Cylinder;
  r.diagnostics.word_length = length;
  r.diagnostics.cylinders = lse.terms;
  r.diagnostics.overflow = lse.overflow;
  return r;
}

MarkovMeasure rpf_equilibrium(const Sft& sft, const Potential& phi) {
  require_range_one(phi);
  if (!sft.irreducible()) throw Error(ErrorCode::NotIrreducible, "equilibrium construction needs an irreducible shift");
  const Eigen::MatrixXd m = scaled_weights(sft, symbol_values(sft, phi));
  const PerronData right = perron_root(m, 0.0);
  const PerronData left = perron_root(m.transpose(), 0.0);
  const double lambda = std::exp(right.log_radius);
  const int k = sft.alphabet_size();
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    double row = 0.0;
    for (Symbol j : sft.successors(i)) {
      p(i, j) = m(i, j) * right.right(j) / (lambda * right.right(i));
      row += p(i, j);
    }
    p.row(i) /= row;
  }
  Eigen::VectorXd pi = left.right.cwiseProduct(right.right);
  pi /= pi.sum();
  // One exact correction step against the normalized rows.
  const Eigen::VectorXd refined = p.transpose() * pi;
  pi = refined / refined.sum();
  return MarkovMeasure(sft, std::move(p), std::move(pi));
}

double topological_pressure(const Sft& sft, const Potential& phi) {
  if (phi.range() == 1) return spectral_pressure(sft, phi).value;
  const RecodedSystem rec = higher_block_recode(sft, {phi}, phi.range());
  return spectral_pressure(rec.sft, rec.potentials[0]).value;
}

}  // namespace thermoform
