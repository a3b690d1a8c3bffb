#pragma once

#include <cmath>
#include <cstddef>
#include <limits>

#include "thermoform/sft.hpp"

namespace thermoform::detail {

struct LogSumExp {
  double log_sum = -std::numeric_limits<double>::infinity();
  double max_exponent = -std::numeric_limits<double>::infinity();
  std::size_t terms = 0;
  bool overflow = false;
};

inline constexpr double kOverflowExponent = 700.0;

/// log Σ exp(exponent(w)) over all admissible words of length `length`,
/// shifted once by the maximum exponent. Two walks in lexicographic order,
/// so the reduction order is fixed.
template <class Exponent>
LogSumExp log_sum_exp_over_words(WordWalker& walker, int length, Exponent&& exponent) {
  LogSumExp out;
  walker.walk(length, [&](const WordWalker& w) {
    if (w.depth() == length) {
      const double e = exponent(w);
      out.max_exponent = std::fmax(out.max_exponent, e);
      ++out.terms;
    }
    return true;
  });
  if (out.terms == 0) return out;
  const double shift = out.max_exponent;
  double sum = 0.0;
  walker.walk(length, [&](const WordWalker& w) {
    if (w.depth() == length) sum += std::exp(exponent(w) - shift);
    return true;
  });
  out.log_sum = shift + std::log(sum);
  out.overflow = out.max_exponent > kOverflowExponent;
  return out;
}

}  // namespace thermoform::detail
