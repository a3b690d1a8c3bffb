#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "thermoform/error.hpp"

namespace thermoform {

using Symbol = int;
using Word = std::vector<Symbol>;

inline constexpr std::size_t kDefaultEnumerationCap = std::size_t{1} << 26;

/// Enumeration cap used when a caller does not pass one: THERMOFORM_CAP if
/// set to a positive integer, otherwise 2^26.
std::size_t default_enumeration_cap();

/// One-sided subshift of finite type given by a 0/1 adjacency matrix.
///
/// The shift space is the set of sequences x_0 x_1 ... with
/// adjacency(x_i, x_{i+1}) = 1, the map is the left shift, and the metric is
/// d(x, y) = 2^{-min{i : x_i != y_i}}. Instances are immutable.
class Sft {
 public:
  /// Validates the matrix and computes the irreducible/primitive flags.
  /// Throws EmptyRowOrColumn if some symbol has no successor or predecessor.
  Sft(int alphabet_size, const std::vector<std::vector<int>>& adjacency);

  int alphabet_size() const noexcept { return k_; }
  bool allowed(Symbol from, Symbol to) const noexcept {
    return adj_[static_cast<std::size_t>(from * k_ + to)] != 0;
  }
  bool irreducible() const noexcept { return irreducible_; }
  bool primitive() const noexcept { return primitive_; }

  const std::vector<Symbol>& successors(Symbol s) const { return succ_[static_cast<std::size_t>(s)]; }
  std::vector<std::vector<int>> adjacency() const;
  std::size_t edge_count() const noexcept { return edges_; }

  bool admissible(std::span<const Symbol> word) const;

  /// 1^T A^{n-1} 1 in floating point; exact while below 2^53.
  double word_count(int n) const;

  bool operator==(const Sft& other) const noexcept { return k_ == other.k_ && adj_ == other.adj_; }

 private:
  int k_;
  std::vector<std::uint8_t> adj_;
  std::vector<std::vector<Symbol>> succ_;
  std::size_t edges_ = 0;
  bool irreducible_ = false;
  bool primitive_ = false;
};

/// Free-function form of the Sft constructor.
Sft validate_sft(int alphabet_size, const std::vector<std::vector<int>>& adjacency);

namespace fixtures {
/// Full shift on {0,1}.
Sft full2();
/// Golden-mean shift: the word "11" is forbidden.
Sft golden();
/// Two states alternating deterministically.
Sft cycle2();
}  // namespace fixtures

/// Symbols rendered as digits for k <= 10, comma separated beyond.
std::string word_to_string(std::span<const Symbol> word, int alphabet_size);
Word parse_word(std::string_view text, int alphabet_size);

/// All admissible n-words in lexicographic order.
std::vector<Word> enumerate_words(const Sft& sft, int n,
                                  std::size_t cap = default_enumeration_cap());

/// Real-valued function of the first `range` symbols of a sequence.
///
/// Values are stored densely by base-k window code; inadmissible windows hold
/// NaN and are never read.
class LocallyConstantPotential {
 public:
  using WindowFn = std::function<double(std::span<const Symbol>)>;

  static LocallyConstantPotential from_table(const Sft& sft, int range,
                                             const std::map<Word, double>& values,
                                             std::string label = {});
  static LocallyConstantPotential from_function(const Sft& sft, int range, const WindowFn& fn,
                                                std::string label = {});
  /// Range-1 potential with value values[s] on symbol s.
  static LocallyConstantPotential from_symbol_values(const Sft& sft, std::vector<double> values,
                                                     std::string label = {});
  static LocallyConstantPotential constant(const Sft& sft, double c, std::string label = {});

  const Sft& sft() const noexcept { return sft_; }
  int range() const noexcept { return range_; }
  const std::string& label() const noexcept { return label_; }
  void set_label(std::string label) { label_ = std::move(label); }

  double value(std::span<const Symbol> window) const;
  double value_at_code(std::size_t code) const noexcept { return dense_[code]; }
  std::size_t window_modulus() const noexcept { return dense_.size(); }

  double min_value() const noexcept { return min_; }
  double max_value() const noexcept { return max_; }

  /// (window, value) pairs over admissible windows in lexicographic order.
  std::vector<std::pair<Word, double>> entries() const;

  /// Same function viewed as a potential of a longer range.
  LocallyConstantPotential lift(int new_range) const;

  LocallyConstantPotential operator-() const { return scaled(-1.0); }
  LocallyConstantPotential scaled(double c) const;
  LocallyConstantPotential shifted(double c) const;

  friend LocallyConstantPotential operator+(const LocallyConstantPotential& a,
                                            const LocallyConstantPotential& b);
  friend LocallyConstantPotential operator-(const LocallyConstantPotential& a,
                                            const LocallyConstantPotential& b);
  friend LocallyConstantPotential operator*(double c, const LocallyConstantPotential& a) {
    return a.scaled(c);
  }

 private:
  LocallyConstantPotential(Sft sft, int range, std::vector<double> dense, std::string label);
  void refresh_bounds();

  Sft sft_;
  int range_;
  std::vector<double> dense_;
  std::string label_;
  double min_ = 0.0;
  double max_ = 0.0;
};

using Potential = LocallyConstantPotential;

/// phi + h - h∘σ for a range-1 transfer function h; the result has range
/// max(range(phi), 2).
Potential add_coboundary(const Potential& phi, const std::vector<double>& h);

/// S_n(pot) on the cylinder of `word`; requires |word| >= n + range - 1.
double cylinder_birkhoff(const Potential& pot, std::span<const Symbol> word, int n);

/// A closed admissible path that is not a repetition of a shorter one.
class Cycle {
 public:
  Cycle(const Sft& sft, Word states);

  const Word& states() const noexcept { return states_; }
  int period() const noexcept { return static_cast<int>(states_.size()); }
  /// The rotation starting at the lexicographically smallest position.
  Cycle canonical() const;
  std::string to_string(int alphabet_size) const { return word_to_string(states_, alphabet_size); }

  bool operator==(const Cycle& other) const noexcept { return states_ == other.states_; }

 private:
  explicit Cycle(Word states) : states_(std::move(states)) {}
  Word states_;
};

/// Birkhoff sum over one period of the periodic orbit (cycle)^∞.
double periodic_birkhoff(const Potential& pot, const Cycle& cycle);

/// Every simple cycle of period <= max_period, once up to rotation, ordered
/// by (period, word).
std::vector<Cycle> enumerate_simple_cycles(const Sft& sft, int max_period,
                                           std::size_t cap = default_enumeration_cap());

/// m-block presentation of an SFT with potentials pushed to range 1.
struct RecodedSystem {
  Sft sft;
  std::vector<Word> blocks;  // new symbol i is the original word blocks[i]
  std::vector<Potential> potentials;
  int block = 1;

  /// Transfers a potential on the original system (range <= block).
  Potential recode(const Potential& pot) const;
};

RecodedSystem higher_block_recode(const Sft& sft, const std::vector<Potential>& potentials, int m,
                                  std::size_t cap = default_enumeration_cap());

struct PermutedSystem {
  Sft sft;
  std::vector<Potential> potentials;
  std::vector<Symbol> permutation;  // old symbol s becomes permutation[s]

  Potential relabel(const Potential& pot) const;
};

PermutedSystem permute_symbols(const Sft& sft, const std::vector<Potential>& potentials,
                               const std::vector<Symbol>& permutation);

/// Depth-first lexicographic walk over admissible words carrying cumulative
/// Birkhoff sums of a set of potentials.
///
/// At depth L the visitor may read S_j(p) for j <= L - range(p) + 1 through
/// WordWalker::birkhoff. The visitor returns false to prune the subtree. The
/// walk throws CapExceeded once more than `cap` nodes have been visited.
class WordWalker {
 public:
  WordWalker(const Sft& sft, std::vector<const Potential*> potentials,
             std::size_t cap = default_enumeration_cap());

  template <class Visit>
  void walk(int max_depth, Visit&& visit) {
    prepare(max_depth);
    visited_ = 0;
    for (Symbol s = 0; s < sft_.alphabet_size(); ++s) descend(0, s, max_depth, visit);
  }

  int depth() const noexcept { return depth_; }
  std::span<const Symbol> word() const noexcept {
    return {word_.data(), static_cast<std::size_t>(depth_)};
  }
  double birkhoff(std::size_t p, int n) const noexcept {
    return cum_[p * stride_ + static_cast<std::size_t>(n)];
  }
  int range(std::size_t p) const noexcept { return ranges_[p]; }
  std::size_t visited() const noexcept { return visited_; }

 private:
  void prepare(int max_depth);
  void push(int level, Symbol s);

  template <class Visit>
  void descend(int level, Symbol s, int max_depth, Visit& visit) {
    push(level, s);
    if (!visit(*this)) return;
    if (level + 1 >= max_depth) return;
    for (Symbol t : sft_.successors(s)) {
      descend(level + 1, t, max_depth, visit);
      depth_ = level + 1;
    }
  }

  const Sft& sft_;
  std::vector<const Potential*> pots_;
  std::vector<int> ranges_;
  std::size_t cap_;
  std::size_t visited_ = 0;
  int depth_ = 0;
  std::size_t stride_ = 0;
  std::vector<Symbol> word_;
  std::vector<double> cum_;
  std::vector<std::size_t> codes_;
};

}  // namespace thermoform
