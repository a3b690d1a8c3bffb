#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "detail/log_sum_exp.hpp"
#include "thermoform/sft.hpp"

namespace thermoform::detail {

struct InducedSum {
  LogSumExp lse;
  std::size_t split = 0;  // prefixes only partly inside X_n
  int max_depth = 0;
};

/// Log-sum over (n, prefix) pairs where the prefix of length n+q-1 meets
/// X_n = {S_nψ <= T < S_{n+1}ψ}. `exponent(walker, n)` is evaluated at the
/// prefix. ψ must be positive with minimum psi_min; subtrees with S_nψ > T
/// are pruned since S_nψ only grows.
template <class Exponent>
InducedSum induced_sum_over_prefixes(WordWalker& walker, const Potential& psi, std::size_t psi_index,
                                     double psi_min, double T, int q, Exponent&& exponent) {
  InducedSum out;
  const int r = psi.range();
  const int n_max = static_cast<int>(std::floor(T / psi_min)) + 1;
  out.max_depth = n_max + q - 1;
  std::vector<Symbol> window(static_cast<std::size_t>(r));
  const Sft& sft = psi.sft();

  // Returns -1 to prune, 0 if the prefix misses X_n, 1 if it meets it.
  auto classify = [&](const WordWalker& w, int n, bool count_split) {
    const double s = w.birkhoff(psi_index, n);
    if (s > T) return -1;
    const auto word = w.word();
    const auto start = static_cast<std::size_t>(n);
    if (n + r - 1 <= w.depth() - 1) {
      const double next = psi.value(word.subspan(start, static_cast<std::size_t>(r)));
      return s + next > T ? 1 : 0;
    }
    // The window for S_{n+1}ψ ends one symbol past the prefix.
    for (int i = 0; i + 1 < r; ++i) window[static_cast<std::size_t>(i)] = word[start + static_cast<std::size_t>(i)];
    std::size_t hit = 0;
    const auto& succ = sft.successors(word.back());
    for (Symbol t : succ) {
      window[static_cast<std::size_t>(r - 1)] = t;
      if (s + psi.value(window) > T) ++hit;
    }
    if (count_split && hit > 0 && hit < succ.size()) ++out.split;
    return hit > 0 ? 1 : 0;
  };

  walker.walk(out.max_depth, [&](const WordWalker& w) {
    if (w.depth() < q) return true;
    const int n = w.depth() - q + 1;
    const int c = classify(w, n, true);
    if (c < 0) return false;
    if (c > 0) {
      out.lse.max_exponent = std::fmax(out.lse.max_exponent, exponent(w, n));
      ++out.lse.terms;
    }
    return true;
  });
  if (out.lse.terms == 0) return out;
  const double shift = out.lse.max_exponent;
  double sum = 0.0;
  walker.walk(out.max_depth, [&](const WordWalker& w) {
    if (w.depth() < q) return true;
    const int n = w.depth() - q + 1;
    const int c = classify(w, n, false);
    if (c < 0) return false;
    if (c > 0) sum += std::exp(exponent(w, n) - shift);
    return true;
  });
  out.lse.log_sum = shift + std::log(sum);
  out.lse.overflow = out.lse.max_exponent > kOverflowExponent;
  return out;
}

}  // namespace thermoform::detail
