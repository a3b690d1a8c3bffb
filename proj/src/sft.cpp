#include "thermoform/sft.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>

namespace thermoform {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptyRowOrColumn: return "EmptyRowOrColumn";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::WordTooShort: return "WordTooShort";
    case ErrorCode::InadmissibleWord: return "InadmissibleWord";
    case ErrorCode::InadmissibleCycle: return "InadmissibleCycle";
    case ErrorCode::NotABijection: return "NotABijection";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::RangeMismatch: return "RangeMismatch";
    case ErrorCode::ReducibleSupport: return "ReducibleSupport";
    case ErrorCode::NotIrreducible: return "NotIrreducible";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NonFiniteObjective: return "NonFiniteObjective";
    case ErrorCode::NonPositiveScaling: return "NonPositiveScaling";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::EmptySum: return "EmptySum";
    case ErrorCode::NonConvexF: return "NonConvexF";
    case ErrorCode::NonConvexWithoutAcknowledgement: return "NonConvexWithoutAcknowledgement";
    case ErrorCode::EmptySubgraph: return "EmptySubgraph";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

std::size_t default_enumeration_cap() {
  if (const char* env = std::getenv("THERMOFORM_CAP")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return kDefaultEnumerationCap;
}

namespace {

std::size_t ipow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) {
    if (r > std::numeric_limits<std::size_t>::max() / base)
      throw Error(ErrorCode::CapExceeded, "window table too large");
    r *= base;
  }
  return r;
}

// Strong connectivity: everything reachable from 0 forwards and backwards.
bool strongly_connected(int k, const std::vector<std::uint8_t>& adj) {
  auto reach = [&](bool forward) {
    std::vector<char> seen(static_cast<std::size_t>(k), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int v = 0; v < k; ++v) {
        const bool edge = forward ? adj[static_cast<std::size_t>(u * k + v)] != 0
                                  : adj[static_cast<std::size_t>(v * k + u)] != 0;
        if (edge && !seen[static_cast<std::size_t>(v)]) {
          seen[static_cast<std::size_t>(v)] = 1;
          stack.push_back(v);
        }
      }
    }
    return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
  };
  return reach(true) && reach(false);
}

bool has_positive_power(int k, const std::vector<std::uint8_t>& adj) {
  // Wielandt: a primitive k×k matrix has A^{k²-2k+2} > 0.
  const int limit = std::max(1, k * k - 2 * k + 2);
  const auto n = static_cast<std::size_t>(k);
  std::vector<std::uint8_t> power = adj;
  for (int p = 1; p <= limit; ++p) {
    if (std::all_of(power.begin(), power.end(), [](std::uint8_t x) { return x != 0; })) return true;
    std::vector<std::uint8_t> next(n * n, 0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t m = 0; m < n; ++m)
        if (power[i * n + m])
          for (std::size_t j = 0; j < n; ++j)
            if (adj[m * n + j]) next[i * n + j] = 1;
    power = std::move(next);
  }
  return false;
}

}  // namespace

Sft::Sft(int alphabet_size, const std::vector<std::vector<int>>& adjacency) : k_(alphabet_size) {
  if (alphabet_size < 1) throw Error(ErrorCode::InvalidArgument, "alphabet size must be positive");
  if (adjacency.size() != static_cast<std::size_t>(k_))
    throw Error(ErrorCode::InvalidArgument, "adjacency must have one row per symbol");
  const auto n = static_cast<std::size_t>(k_);
  adj_.assign(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (adjacency[i].size() != n)
      throw Error(ErrorCode::InvalidArgument, "adjacency row " + std::to_string(i) + " has wrong length");
    for (std::size_t j = 0; j < n; ++j) {
      const int a = adjacency[i][j];
      if (a != 0 && a != 1) throw Error(ErrorCode::InvalidArgument, "adjacency entries must be 0 or 1");
      adj_[i * n + j] = static_cast<std::uint8_t>(a);
      edges_ += static_cast<std::size_t>(a);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    bool row = false;
    bool col = false;
    for (std::size_t j = 0; j < n; ++j) {
      row = row || adj_[i * n + j];
      col = col || adj_[j * n + i];
    }
    if (!row) throw Error(ErrorCode::EmptyRowOrColumn, "symbol " + std::to_string(i) + " has no successor");
    if (!col) throw Error(ErrorCode::EmptyRowOrColumn, "symbol " + std::to_string(i) + " has no predecessor");
  }
  succ_.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (adj_[i * n + j]) succ_[i].push_back(static_cast<Symbol>(j));
  irreducible_ = strongly_connected(k_, adj_);
  primitive_ = irreducible_ && has_positive_power(k_, adj_);
}

std::vector<std::vector<int>> Sft::adjacency() const {
  std::vector<std::vector<int>> rows(static_cast<std::size_t>(k_), std::vector<int>(static_cast<std::size_t>(k_)));
  for (int i = 0; i < k_; ++i)
    for (int j = 0; j < k_; ++j) rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = allowed(i, j) ? 1 : 0;
  return rows;
}

bool Sft::admissible(std::span<const Symbol> word) const {
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (word[i] < 0 || word[i] >= k_) return false;
    if (i > 0 && !allowed(word[i - 1], word[i])) return false;
  }
  return true;
}

double Sft::word_count(int n) const {
  if (n < 1) return 0.0;
  const auto k = static_cast<std::size_t>(k_);
  std::vector<double> v(k, 1.0);
  for (int step = 1; step < n; ++step) {
    std::vector<double> next(k, 0.0);
    for (std::size_t i = 0; i < k; ++i)
      for (Symbol j : succ_[i]) next[i] += v[static_cast<std::size_t>(j)];
    v = std::move(next);
  }
  return std::accumulate(v.begin(), v.end(), 0.0);
}

Sft validate_sft(int alphabet_size, const std::vector<std::vector<int>>& adjacency) {
  return Sft(alphabet_size, adjacency);
}

namespace fixtures {
Sft full2() { return Sft(2, {{1, 1}, {1, 1}}); }
Sft golden() { return Sft(2, {{1, 1}, {1, 0}}); }
Sft cycle2() { return Sft(2, {{0, 1}, {1, 0}}); }
}  // namespace fixtures

std::string word_to_string(std::span<const Symbol> word, int alphabet_size) {
  std::string out;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (alphabet_size > 10 && i > 0) out += ',';
    if (alphabet_size <= 10)
      out += static_cast<char>('0' + word[i]);
    else
      out += std::to_string(word[i]);
  }
  return out;
}

Word parse_word(std::string_view text, int alphabet_size) {
  Word word;
  auto check = [&](long v) {
    if (v < 0 || v >= alphabet_size)
      throw Error(ErrorCode::InvalidArgument, "symbol out of range in word '" + std::string(text) + "'");
    word.push_back(static_cast<Symbol>(v));
  };
  if (alphabet_size <= 10) {
    for (char c : text) {
      if (c < '0' || c > '9') throw Error(ErrorCode::InvalidArgument, "bad symbol in word '" + std::string(text) + "'");
      check(c - '0');
    }
  } else {
    std::stringstream ss{std::string(text)};
    std::string item;
    while (std::getline(ss, item, ',')) {
      char* end = nullptr;
      const long v = std::strtol(item.c_str(), &end, 10);
      if (item.empty() || *end != '\0')
        throw Error(ErrorCode::InvalidArgument, "bad symbol in word '" + std::string(text) + "'");
      check(v);
    }
  }
  if (word.empty()) throw Error(ErrorCode::InvalidArgument, "empty word");
  return word;
}

std::vector<Word> enumerate_words(const Sft& sft, int n, std::size_t cap) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "word length must be positive");
  if (sft.word_count(n) > static_cast<double>(cap))
    throw Error(ErrorCode::CapExceeded, "more than " + std::to_string(cap) + " words of length " + std::to_string(n));
  std::vector<Word> out;
  WordWalker walker(sft, {}, std::numeric_limits<std::size_t>::max());
  walker.walk(n, [&](const WordWalker& w) {
    if (w.depth() == n) out.emplace_back(w.word().begin(), w.word().end());
    return true;
  });
  return out;
}

// ---------------------------------------------------------------------------
// LocallyConstantPotential

LocallyConstantPotential::LocallyConstantPotential(Sft sft, int range, std::vector<double> dense,
                                                   std::string label)
    : sft_(std::move(sft)), range_(range), dense_(std::move(dense)), label_(std::move(label)) {
  refresh_bounds();
}

void LocallyConstantPotential::refresh_bounds() {
  min_ = std::numeric_limits<double>::infinity();
  max_ = -std::numeric_limits<double>::infinity();
  for (double v : dense_) {
    if (std::isnan(v)) continue;
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "potential values must be finite");
    min_ = std::min(min_, v);
    max_ = std::max(max_, v);
  }
}

LocallyConstantPotential LocallyConstantPotential::from_function(const Sft& sft, int range,
                                                                 const WindowFn& fn, std::string label) {
  if (range < 1) throw Error(ErrorCode::InvalidArgument, "potential range must be positive");
  const std::size_t mod = ipow(static_cast<std::size_t>(sft.alphabet_size()), range);
  std::vector<double> dense(mod, std::numeric_limits<double>::quiet_NaN());
  const std::size_t k = static_cast<std::size_t>(sft.alphabet_size());
  for (const Word& w : enumerate_words(sft, range)) {
    std::size_t code = 0;
    for (Symbol s : w) code = code * k + static_cast<std::size_t>(s);
    const double v = fn(w);
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "potential values must be finite");
    dense[code] = v;
  }
  return LocallyConstantPotential(sft, range, std::move(dense), std::move(label));
}

LocallyConstantPotential LocallyConstantPotential::from_table(const Sft& sft, int range,
                                                              const std::map<Word, double>& values,
                                                              std::string label) {
  for (const auto& [w, v] : values) {
    if (static_cast<int>(w.size()) != range)
      throw Error(ErrorCode::RangeMismatch, "table key '" + word_to_string(w, sft.alphabet_size()) +
                                                "' does not have length " + std::to_string(range));
    if (!sft.admissible(w))
      throw Error(ErrorCode::InadmissibleWord,
                  "table key '" + word_to_string(w, sft.alphabet_size()) + "' is not admissible");
  }
  return from_function(
      sft, range,
      [&](std::span<const Symbol> w) {
        const auto it = values.find(Word(w.begin(), w.end()));
        if (it == values.end())
          throw Error(ErrorCode::InvalidArgument,
                      "potential table has no entry for '" + word_to_string(w, sft.alphabet_size()) + "'");
        return it->second;
      },
      std::move(label));
}

LocallyConstantPotential LocallyConstantPotential::from_symbol_values(const Sft& sft, std::vector<double> values,
                                                                      std::string label) {
  if (values.size() != static_cast<std::size_t>(sft.alphabet_size()))
    throw Error(ErrorCode::RangeMismatch, "need one value per symbol");
  return from_function(
      sft, 1, [&](std::span<const Symbol> w) { return values[static_cast<std::size_t>(w[0])]; },
      std::move(label));
}

LocallyConstantPotential LocallyConstantPotential::constant(const Sft& sft, double c, std::string label) {
  return from_function(sft, 1, [c](std::span<const Symbol>) { return c; }, std::move(label));
}

double LocallyConstantPotential::value(std::span<const Symbol> window) const {
  if (static_cast<int>(window.size()) != range_)
    throw Error(ErrorCode::RangeMismatch, "window length differs from potential range");
  const std::size_t k = static_cast<std::size_t>(sft_.alphabet_size());
  std::size_t code = 0;
  for (Symbol s : window) {
    if (s < 0 || s >= sft_.alphabet_size()) throw Error(ErrorCode::InadmissibleWord, "symbol out of range");
    code = code * k + static_cast<std::size_t>(s);
  }
  const double v = dense_[code];
  if (std::isnan(v)) throw Error(ErrorCode::InadmissibleWord, "window is not admissible");
  return v;
}

std::vector<std::pair<Word, double>> LocallyConstantPotential::entries() const {
  std::vector<std::pair<Word, double>> out;
  for (Word& w : enumerate_words(sft_, range_)) {
    const double v = value(w);
    out.emplace_back(std::move(w), v);
  }
  return out;
}

LocallyConstantPotential LocallyConstantPotential::lift(int new_range) const {
  if (new_range < range_) throw Error(ErrorCode::RangeMismatch, "cannot lift to a shorter range");
  if (new_range == range_) return *this;
  return from_function(
      sft_, new_range, [this](std::span<const Symbol> w) { return value(w.first(static_cast<std::size_t>(range_))); },
      label_);
}

LocallyConstantPotential LocallyConstantPotential::scaled(double c) const {
  auto dense = dense_;
  for (double& v : dense)
    if (!std::isnan(v)) v *= c;
  return LocallyConstantPotential(sft_, range_, std::move(dense), label_);
}

LocallyConstantPotential LocallyConstantPotential::shifted(double c) const {
  auto dense = dense_;
  for (double& v : dense)
    if (!std::isnan(v)) v += c;
  return LocallyConstantPotential(sft_, range_, std::move(dense), label_);
}

namespace {
LocallyConstantPotential combine(const LocallyConstantPotential& a, const LocallyConstantPotential& b, double sign) {
  if (!(a.sft() == b.sft())) throw Error(ErrorCode::RangeMismatch, "potentials live on different shifts");
  const int r = std::max(a.range(), b.range());
  const auto la = a.lift(r);
  const auto lb = b.lift(r);
  return LocallyConstantPotential::from_function(
      a.sft(), r, [&](std::span<const Symbol> w) { return la.value(w) + sign * lb.value(w); });
}
}  // namespace

LocallyConstantPotential operator+(const LocallyConstantPotential& a, const LocallyConstantPotential& b) {
  return combine(a, b, 1.0);
}

LocallyConstantPotential operator-(const LocallyConstantPotential& a, const LocallyConstantPotential& b) {
  return combine(a, b, -1.0);
}

Potential add_coboundary(const Potential& phi, const std::vector<double>& h) {
  const Sft& sft = phi.sft();
  if (h.size() != static_cast<std::size_t>(sft.alphabet_size()))
    throw Error(ErrorCode::RangeMismatch, "transfer function needs one value per symbol");
  const int r = std::max(phi.range(), 2);
  const auto lifted = phi.lift(r);
  return Potential::from_function(
      sft, r,
      [&](std::span<const Symbol> w) {
        return lifted.value(w) + h[static_cast<std::size_t>(w[0])] - h[static_cast<std::size_t>(w[1])];
      },
      phi.label());
}

double cylinder_birkhoff(const Potential& pot, std::span<const Symbol> word, int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "n must be positive");
  const std::size_t need = static_cast<std::size_t>(n + pot.range() - 1);
  if (word.size() < need)
    throw Error(ErrorCode::WordTooShort, "need at least " + std::to_string(need) + " symbols");
  if (!pot.sft().admissible(word)) throw Error(ErrorCode::InadmissibleWord, "word is not admissible");
  double sum = 0.0;
  for (int i = 0; i < n; ++i)
    sum += pot.value(word.subspan(static_cast<std::size_t>(i), static_cast<std::size_t>(pot.range())));
  return sum;
}

// ---------------------------------------------------------------------------
// Cycles

Cycle::Cycle(const Sft& sft, Word states) : states_(std::move(states)) {
  const std::size_t p = states_.size();
  if (p == 0) throw Error(ErrorCode::InadmissibleCycle, "empty cycle");
  for (std::size_t i = 0; i < p; ++i) {
    const Symbol a = states_[i];
    const Symbol b = states_[(i + 1) % p];
    if (a < 0 || a >= sft.alphabet_size() || b < 0 || b >= sft.alphabet_size() || !sft.allowed(a, b))
      throw Error(ErrorCode::InadmissibleCycle,
                  "cycle '" + word_to_string(states_, sft.alphabet_size()) + "' uses a forbidden transition");
  }
  for (std::size_t d = 1; d < p; ++d) {
    if (p % d != 0) continue;
    bool repeats = true;
    for (std::size_t i = 0; i < p && repeats; ++i) repeats = states_[i] == states_[i % d];
    if (repeats) throw Error(ErrorCode::InadmissibleCycle, "cycle repeats a shorter cycle");
  }
}

Cycle Cycle::canonical() const {
  const std::size_t p = states_.size();
  Word best = states_;
  for (std::size_t r = 1; r < p; ++r) {
    Word rot(p);
    for (std::size_t i = 0; i < p; ++i) rot[i] = states_[(i + r) % p];
    if (rot < best) best = std::move(rot);
  }
  return Cycle(std::move(best));
}

double periodic_birkhoff(const Potential& pot, const Cycle& cycle) {
  // Re-validate against the potential's shift.
  const Cycle checked(pot.sft(), cycle.states());
  const auto& s = checked.states();
  const std::size_t p = s.size();
  const std::size_t r = static_cast<std::size_t>(pot.range());
  Word window(r);
  double sum = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < r; ++j) window[j] = s[(i + j) % p];
    sum += pot.value(window);
  }
  return sum;
}

std::vector<Cycle> enumerate_simple_cycles(const Sft& sft, int max_period, std::size_t cap) {
  if (max_period < 1) throw Error(ErrorCode::InvalidArgument, "max_period must be positive");
  const int k = sft.alphabet_size();
  std::vector<Cycle> out;
  std::size_t visited = 0;
  Word path;
  std::vector<char> on_path(static_cast<std::size_t>(k), 0);
  // Each cycle is rooted at its smallest symbol, so it is found exactly once.
  std::function<void(Symbol, Symbol)> extend = [&](Symbol root, Symbol u) {
    if (++visited > cap) throw Error(ErrorCode::CapExceeded, "simple-cycle search exceeded cap");
    for (Symbol v : sft.successors(u)) {
      if (v == root) {
        out.emplace_back(sft, path);
      } else if (v > root && !on_path[static_cast<std::size_t>(v)] &&
                 static_cast<int>(path.size()) < max_period) {
        path.push_back(v);
        on_path[static_cast<std::size_t>(v)] = 1;
        extend(root, v);
        on_path[static_cast<std::size_t>(v)] = 0;
        path.pop_back();
      }
    }
  };
  for (Symbol root = 0; root < k; ++root) {
    path = {root};
    on_path[static_cast<std::size_t>(root)] = 1;
    extend(root, root);
    on_path[static_cast<std::size_t>(root)] = 0;
  }
  std::sort(out.begin(), out.end(), [](const Cycle& a, const Cycle& b) {
    if (a.period() != b.period()) return a.period() < b.period();
    return a.states() < b.states();
  });
  return out;
}

// ---------------------------------------------------------------------------
// Recoding and relabeling

Potential RecodedSystem::recode(const Potential& pot) const {
  if (pot.range() > block)
    throw Error(ErrorCode::RangeMismatch, "potential range exceeds the block length");
  return Potential::from_function(
      sft, 1,
      [&](std::span<const Symbol> w) {
        const Word& original = blocks[static_cast<std::size_t>(w[0])];
        return pot.value(std::span<const Symbol>(original).first(static_cast<std::size_t>(pot.range())));
      },
      pot.label());
}

RecodedSystem higher_block_recode(const Sft& sft, const std::vector<Potential>& potentials, int m,
                                  std::size_t cap) {
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "block length must be positive");
  for (const auto& p : potentials) {
    if (p.range() > m) throw Error(ErrorCode::RangeMismatch, "block length below potential range");
    if (!(p.sft() == sft)) throw Error(ErrorCode::RangeMismatch, "potential lives on a different shift");
  }
  std::vector<Word> blocks = enumerate_words(sft, m, cap);
  const std::size_t n = blocks.size();
  std::vector<std::vector<int>> adj(n, std::vector<int>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      // Overlap in m-1 symbols; for m = 1 that is vacuous and the original edge decides.
      adj[i][j] = (m == 1 ? sft.allowed(blocks[i][0], blocks[j][0])
                          : std::equal(blocks[i].begin() + 1, blocks[i].end(), blocks[j].begin()))
                      ? 1
                      : 0;
  RecodedSystem out{Sft(static_cast<int>(n), adj), std::move(blocks), {}, m};
  for (const auto& p : potentials) out.potentials.push_back(out.recode(p));
  return out;
}

Potential PermutedSystem::relabel(const Potential& pot) const {
  std::vector<Symbol> inverse(permutation.size());
  for (std::size_t s = 0; s < permutation.size(); ++s) inverse[static_cast<std::size_t>(permutation[s])] = static_cast<Symbol>(s);
  return Potential::from_function(
      sft, pot.range(),
      [&](std::span<const Symbol> w) {
        Word original(w.size());
        for (std::size_t i = 0; i < w.size(); ++i) original[i] = inverse[static_cast<std::size_t>(w[i])];
        return pot.value(original);
      },
      pot.label());
}

PermutedSystem permute_symbols(const Sft& sft, const std::vector<Potential>& potentials,
                               const std::vector<Symbol>& permutation) {
  const int k = sft.alphabet_size();
  if (permutation.size() != static_cast<std::size_t>(k))
    throw Error(ErrorCode::NotABijection, "permutation must have one entry per symbol");
  std::vector<char> hit(static_cast<std::size_t>(k), 0);
  for (Symbol s : permutation) {
    if (s < 0 || s >= k || hit[static_cast<std::size_t>(s)])
      throw Error(ErrorCode::NotABijection, "permutation is not a bijection on the alphabet");
    hit[static_cast<std::size_t>(s)] = 1;
  }
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(k), std::vector<int>(static_cast<std::size_t>(k), 0));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      adj[static_cast<std::size_t>(permutation[static_cast<std::size_t>(i)])]
         [static_cast<std::size_t>(permutation[static_cast<std::size_t>(j)])] = sft.allowed(i, j) ? 1 : 0;
  PermutedSystem out{Sft(k, adj), {}, permutation};
  for (const auto& p : potentials) out.potentials.push_back(out.relabel(p));
  return out;
}

// ---------------------------------------------------------------------------
// WordWalker

WordWalker::WordWalker(const Sft& sft, std::vector<const Potential*> potentials, std::size_t cap)
    : sft_(sft), pots_(std::move(potentials)), cap_(cap) {
  for (const Potential* p : pots_) {
    if (!(p->sft() == sft)) throw Error(ErrorCode::RangeMismatch, "potential lives on a different shift");
    ranges_.push_back(p->range());
  }
}

void WordWalker::prepare(int max_depth) {
  stride_ = static_cast<std::size_t>(max_depth) + 1;
  word_.assign(stride_, 0);
  cum_.assign(pots_.size() * stride_, 0.0);
  codes_.assign(pots_.size() * stride_, 0);
  depth_ = 0;
}

void WordWalker::push(int level, Symbol s) {
  if (++visited_ > cap_)
    throw Error(ErrorCode::CapExceeded, "word enumeration exceeded cap of " + std::to_string(cap_));
  word_[static_cast<std::size_t>(level)] = s;
  depth_ = level + 1;
  const std::size_t k = static_cast<std::size_t>(sft_.alphabet_size());
  for (std::size_t p = 0; p < pots_.size(); ++p) {
    const Potential& pot = *pots_[p];
    const std::size_t base = p * stride_;
    const std::size_t prev = level > 0 ? codes_[base + static_cast<std::size_t>(level - 1)] : 0;
    const std::size_t code = (prev * k + static_cast<std::size_t>(s)) % pot.window_modulus();
    codes_[base + static_cast<std::size_t>(level)] = code;
    const int windows = depth_ - ranges_[p] + 1;
    if (windows >= 1)
      cum_[base + static_cast<std::size_t>(windows)] =
          cum_[base + static_cast<std::size_t>(windows - 1)] + pot.value_at_code(code);
  }
}

}  // namespace thermoform
