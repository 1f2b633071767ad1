#include "shiftlab/shift.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include "shiftlab/errors.hpp"

namespace shiftlab {

double log_big(const BigInt& value) {
  if (value <= 0) throw std::domain_error("log_big: argument must be positive");
  const auto bits = boost::multiprecision::msb(value);
  if (bits <= 52) return std::log(value.convert_to<double>());
  const BigInt top = value >> (bits - 52);
  return std::log(top.convert_to<double>()) +
         static_cast<double>(bits - 52) * std::numbers::ln2;
}

Cylinder::Cylinder(std::vector<Entry> entries) : entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end());
  entries_.erase(std::unique(entries_.begin(), entries_.end()), entries_.end());
  for (std::size_t i = 1; i < entries_.size(); ++i) {
    if (entries_[i - 1].first == entries_[i].first) {
      throw std::invalid_argument("cylinder: conflicting symbols at one coordinate");
    }
  }
}

Cylinder Cylinder::restriction_of(const Configuration& x,
                                  const std::vector<GroupElement>& domain) {
  std::vector<Entry> entries;
  entries.reserve(domain.size());
  for (const auto& g : domain) entries.emplace_back(g, x.symbol_at(g));
  return Cylinder(std::move(entries));
}

std::vector<GroupElement> Cylinder::support() const {
  std::vector<GroupElement> out;
  out.reserve(entries_.size());
  for (const auto& [g, s] : entries_) out.push_back(g);
  return out;
}

std::optional<Symbol> Cylinder::at(const GroupElement& g) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), g,
                             [](const Entry& e, const GroupElement& v) { return e.first < v; });
  if (it == entries_.end() || !(it->first == g)) return std::nullopt;
  return it->second;
}

Cylinder Cylinder::translated(const AmenableGroup& group, const GroupElement& g) const {
  std::vector<Entry> entries;
  entries.reserve(entries_.size());
  for (const auto& [h, s] : entries_) entries.emplace_back(group.multiply(h, g), s);
  return Cylinder(std::move(entries));
}

bool Cylinder::consistent_with(const Cylinder& other) const {
  auto a = entries_.begin();
  auto b = other.entries_.begin();
  while (a != entries_.end() && b != other.entries_.end()) {
    if (a->first < b->first) {
      ++a;
    } else if (b->first < a->first) {
      ++b;
    } else {
      if (a->second != b->second) return false;
      ++a;
      ++b;
    }
  }
  return true;
}

Cylinder Cylinder::merged(const Cylinder& other) const {
  if (!consistent_with(other)) {
    throw std::invalid_argument("cylinder merge: conflicting assignments");
  }
  std::vector<Entry> entries = entries_;
  entries.insert(entries.end(), other.entries_.begin(), other.entries_.end());
  return Cylinder(std::move(entries));
}

Cylinder Cylinder::restricted(const std::vector<GroupElement>& domain) const {
  std::vector<GroupElement> dom = domain;
  std::sort(dom.begin(), dom.end());
  std::vector<Entry> entries;
  for (const auto& e : entries_) {
    if (std::binary_search(dom.begin(), dom.end(), e.first)) entries.push_back(e);
  }
  return Cylinder(std::move(entries));
}

bool Cylinder::covers(const Cylinder& finer) const {
  return std::includes(finer.entries_.begin(), finer.entries_.end(),
                       entries_.begin(), entries_.end());
}

bool Cylinder::matches(const Configuration& x) const {
  for (const auto& [g, s] : entries_) {
    if (x.symbol_at(g) != s) return false;
  }
  return true;
}

Configuration::Configuration(std::shared_ptr<const SymbolSource> source)
    : source_(std::move(source)) {
  if (!source_) throw std::invalid_argument("configuration: null source");
  offset_ = source_->group().identity();
}

Configuration act(const GroupElement& g, const Configuration& x) {
  return Configuration(x.source_, x.group().multiply(g, x.offset_));
}

PeriodicSource::PeriodicSource(AmenableGroup group, std::vector<std::int64_t> periods,
                               std::vector<Symbol> pattern)
    : group_(group), periods_(std::move(periods)), pattern_(std::move(pattern)) {
  if (periods_.size() != static_cast<std::size_t>(group_.dim())) {
    throw std::invalid_argument("periodic source: one period per coordinate required");
  }
  std::int64_t cells = 1;
  for (std::size_t i = 0; i < periods_.size(); ++i) {
    if (periods_[i] < 1) throw std::invalid_argument("periodic source: periods must be >= 1");
    period_[i] = periods_[i];
    cells *= periods_[i];
  }
  if (pattern_.size() != static_cast<std::size_t>(cells)) {
    throw std::invalid_argument("periodic source: pattern size must equal the period box");
  }
}

Symbol PeriodicSource::symbol_at(const GroupElement& g) const {
  std::int64_t idx = 0;
  for (int i = 0; i < 3; ++i) {
    const std::int64_t r = ((g.v[i] % period_[i]) + period_[i]) % period_[i];
    idx = idx * period_[i] + r;
  }
  return pattern_[static_cast<std::size_t>(idx)];
}

WindowSource::WindowSource(AmenableGroup group, const Cylinder& cells, Symbol background)
    : group_(group), background_(background) {
  for (const auto& [g, s] : cells.entries()) cells_.emplace(g, s);
}

Symbol WindowSource::symbol_at(const GroupElement& g) const {
  auto it = cells_.find(g);
  return it == cells_.end() ? background_ : it->second;
}

Subshift::Subshift(AmenableGroup group, int alphabet_size, std::vector<Cylinder> forbidden_patterns)
    : group_(group), alphabet_size_(alphabet_size), forbidden_(std::move(forbidden_patterns)) {
  if (alphabet_size_ < 2) throw std::invalid_argument("subshift: alphabet size must be >= 2");
  for (const auto& f : forbidden_) {
    if (f.empty()) throw std::invalid_argument("subshift: forbidden pattern with empty support");
    for (const auto& [g, s] : f.entries()) {
      if (g.kind != group_.kind()) {
        throw std::invalid_argument("subshift: forbidden pattern from another group");
      }
      if (s < 0 || s >= alphabet_size_) {
        throw std::invalid_argument("subshift: forbidden symbol outside alphabet");
      }
    }
  }
}

bool Subshift::admits(const Cylinder& pattern) const {
  for (const auto& f : forbidden_) {
    const GroupElement h0_inv = group_.inverse(f.entries().front().first);
    for (const auto& cell : pattern.entries()) {
      const GroupElement g = group_.multiply(h0_inv, cell.first);
      bool embeds = true;
      for (const auto& [h, sym] : f.entries()) {
        const auto got = pattern.at(group_.multiply(h, g));
        if (!got || *got != sym) {
          embeds = false;
          break;
        }
      }
      if (embeds) return false;
    }
  }
  return true;
}

Configuration periodic_configuration(const Subshift& shift, std::vector<std::int64_t> periods,
                                     std::vector<Symbol> pattern) {
  for (const Symbol s : pattern) {
    if (s < 0 || s >= shift.alphabet_size()) {
      throw std::invalid_argument("periodic configuration: symbol outside alphabet");
    }
  }
  const AmenableGroup& group = shift.group();
  auto source = std::make_shared<PeriodicSource>(group, periods, std::move(pattern));
  Configuration x(source);

  // One fundamental box of translates decides admissibility everywhere. The
  // Heisenberg product twists the last coordinate by a*b', so the middle
  // coordinate must range over lcm(p1, p2) instead of p1.
  std::array<std::int64_t, 3> box{1, 1, 1};
  const auto& p = source->periods();
  for (std::size_t i = 0; i < p.size(); ++i) box[i] = p[i];
  if (group.kind() == GroupKind::Heisenberg) box[1] = std::lcm(box[1], box[2]);
  if (box[0] > (std::int64_t{1} << 40) / std::max<std::int64_t>(box[1] * box[2], 1) ||
      box[0] * box[1] * box[2] > 10'000'000) {
    throw ResourceLimitError("periodic configuration: validation box too large");
  }

  for (std::int64_t a = 0; a < box[0]; ++a) {
    for (std::int64_t b = 0; b < box[1]; ++b) {
      for (std::int64_t c = 0; c < box[2]; ++c) {
        const GroupElement g = group.element(a, b, c);
        for (const auto& f : shift.forbidden_patterns()) {
          bool embeds = true;
          for (const auto& [h, sym] : f.entries()) {
            if (x.symbol_at(group.multiply(h, g)) != sym) {
              embeds = false;
              break;
            }
          }
          if (embeds) {
            throw std::invalid_argument("periodic configuration: forbidden pattern embedded");
          }
        }
      }
    }
  }
  return x;
}

Configuration window_configuration(const AmenableGroup& group, const Cylinder& cells,
                                   Symbol background) {
  return Configuration(std::make_shared<WindowSource>(group, cells, background));
}

MetricValue metric_distance(const Configuration& x, const Configuration& y, std::int64_t depth) {
  if (depth < 1) throw std::invalid_argument("metric distance: depth must be >= 1");
  const AmenableGroup& group = x.group();
  for (std::int64_t i = 1; i <= depth; ++i) {
    const GroupElement g = group.element_at(i);
    if (x.symbol_at(g) != y.symbol_at(g)) {
      return MetricValue{std::ldexp(1.0, static_cast<int>(-i)), false};
    }
  }
  return MetricValue{0.0, true};
}

int bowen_depth(double epsilon) {
  if (!(epsilon > 0.0) || epsilon > 1.0) {
    throw std::domain_error("bowen depth: epsilon must lie in (0, 1]");
  }
  return static_cast<int>(std::floor(std::log2(1.0 / epsilon)));
}

std::vector<GroupElement> bowen_domain(const AmenableGroup& group,
                                       const std::vector<GroupElement>& folner_set,
                                       double epsilon) {
  const int depth = bowen_depth(epsilon);
  std::vector<GroupElement> out;
  out.reserve(static_cast<std::size_t>(depth) * folner_set.size());
  for (int i = 1; i <= depth; ++i) {
    const GroupElement gi = group.element_at(i);
    for (const auto& f : folner_set) out.push_back(group.multiply(gi, f));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

BowenBall bowen_ball(const Configuration& x, const std::vector<GroupElement>& folner_set,
                     double epsilon) {
  auto domain = bowen_domain(x.group(), folner_set, epsilon);
  auto cylinder = Cylinder::restriction_of(x, domain);
  return BowenBall{x, folner_set, epsilon, std::move(domain), std::move(cylinder)};
}

namespace {

std::vector<GroupElement> sorted_window(const std::vector<GroupElement>& window) {
  std::vector<GroupElement> w = window;
  std::sort(w.begin(), w.end());
  w.erase(std::unique(w.begin(), w.end()), w.end());
  return w;
}

struct EmbeddedConstraint {
  // (window position, required symbol), sorted by position.
  std::vector<std::pair<std::int32_t, Symbol>> cells;
};

// Translates of forbidden patterns that fit inside the window, grouped by the
// largest window position they mention, so backtracking checks each exactly
// once, as soon as it is fully assigned.
std::vector<std::vector<EmbeddedConstraint>> embedded_constraints(
    const Subshift& shift, const std::vector<GroupElement>& window) {
  const AmenableGroup& group = shift.group();
  std::vector<std::vector<EmbeddedConstraint>> groups(window.size());
  for (const auto& f : shift.forbidden_patterns()) {
    const GroupElement h0_inv = group.inverse(f.entries().front().first);
    for (const auto& w : window) {
      const GroupElement g = group.multiply(h0_inv, w);
      EmbeddedConstraint c;
      c.cells.reserve(f.size());
      bool inside = true;
      for (const auto& [h, sym] : f.entries()) {
        const GroupElement pos = group.multiply(h, g);
        auto it = std::lower_bound(window.begin(), window.end(), pos);
        if (it == window.end() || !(*it == pos)) {
          inside = false;
          break;
        }
        c.cells.emplace_back(static_cast<std::int32_t>(it - window.begin()), sym);
      }
      if (!inside) continue;
      std::sort(c.cells.begin(), c.cells.end());
      groups[static_cast<std::size_t>(c.cells.back().first)].push_back(std::move(c));
    }
  }
  return groups;
}

// Depth-first enumeration of admissible assignments; leaf(word) fires once
// per complete admissible word.
template <typename Leaf>
void for_each_admissible(const Subshift& shift, const std::vector<GroupElement>& window,
                         const std::vector<std::optional<Symbol>>& pinned, Leaf&& leaf) {
  const auto groups = embedded_constraints(shift, window);
  const int k = shift.alphabet_size();
  std::vector<Symbol> word(window.size(), 0);
  auto step = [&](auto&& self, std::size_t j) -> void {
    if (j == window.size()) {
      leaf(word);
      return;
    }
    const Symbol lo = pinned[j] ? *pinned[j] : 0;
    const Symbol hi = pinned[j] ? *pinned[j] : static_cast<Symbol>(k - 1);
    for (Symbol s = lo; s <= hi; ++s) {
      word[j] = s;
      bool ok = true;
      for (const auto& c : groups[j]) {
        bool embeds = true;
        for (const auto& [pos, sym] : c.cells) {
          if (word[static_cast<std::size_t>(pos)] != sym) {
            embeds = false;
            break;
          }
        }
        if (embeds) {
          ok = false;
          break;
        }
      }
      if (ok) self(self, j + 1);
    }
  };
  step(step, 0);
}

// Forbidden supports normalized to words over {0,...,len-1}; empty optional
// when some support is not a contiguous run of integers.
std::optional<std::vector<std::vector<std::optional<Symbol>>>> contiguous_forbidden_words(
    const Subshift& shift) {
  std::vector<std::vector<std::optional<Symbol>>> words;
  for (const auto& f : shift.forbidden_patterns()) {
    const auto& ent = f.entries();
    const std::int64_t lo = ent.front().first.v[0];
    const std::int64_t hi = ent.back().first.v[0];
    if (hi - lo + 1 != static_cast<std::int64_t>(ent.size())) return std::nullopt;
    std::vector<std::optional<Symbol>> word(ent.size());
    for (const auto& [g, s] : ent) word[static_cast<std::size_t>(g.v[0] - lo)] = s;
    words.push_back(std::move(word));
  }
  return words;
}

}  // namespace

std::int64_t pattern_count(const Subshift& shift, const std::vector<GroupElement>& window,
                           std::int64_t cap) {
  const auto w = sorted_window(window);
  if (shift.is_full_shift()) {
    std::int64_t count = 1;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (count > cap / shift.alphabet_size()) {
        throw ResourceLimitError("pattern count exceeds cap");
      }
      count *= shift.alphabet_size();
    }
    return count;
  }
  std::int64_t count = 0;
  std::vector<std::optional<Symbol>> pinned(w.size());
  for_each_admissible(shift, w, pinned, [&](const std::vector<Symbol>&) {
    if (++count > cap) throw ResourceLimitError("pattern count exceeds cap");
  });
  return count;
}

bool has_contiguous_z_forbidden(const Subshift& shift) {
  if (shift.group().kind() != GroupKind::Z) return false;
  return contiguous_forbidden_words(shift).has_value();
}

BigInt transfer_matrix_count(const Subshift& shift, std::int64_t n) {
  if (shift.group().kind() != GroupKind::Z) {
    throw std::invalid_argument("transfer matrix: subshift must live over Z");
  }
  if (n < 0) throw std::invalid_argument("transfer matrix: negative length");
  if (n == 0) return 1;
  const auto words = contiguous_forbidden_words(shift);
  if (!words) {
    throw std::invalid_argument("transfer matrix: forbidden supports must be contiguous");
  }
  const int k = shift.alphabet_size();
  if (words->empty()) return boost::multiprecision::pow(BigInt(k), static_cast<unsigned>(n));

  std::size_t max_len = 1;
  for (const auto& word : *words) max_len = std::max(max_len, word.size());

  // A word is clean when no forbidden word matches any of its substrings.
  auto clean = [&](const std::vector<Symbol>& word) {
    for (const auto& fw : *words) {
      if (fw.size() > word.size()) continue;
      for (std::size_t start = 0; start + fw.size() <= word.size(); ++start) {
        bool embeds = true;
        for (std::size_t i = 0; i < fw.size(); ++i) {
          if (fw[i] && word[start + i] != *fw[i]) {
            embeds = false;
            break;
          }
        }
        if (embeds) return false;
      }
    }
    return true;
  };

  const std::size_t state_len = max_len - 1;
  if (state_len == 0) {
    // Length-1 forbidden words just shrink the alphabet.
    std::vector<bool> allowed(static_cast<std::size_t>(k), true);
    for (const auto& fw : *words) {
      if (fw[0]) allowed[static_cast<std::size_t>(*fw[0])] = false;
    }
    const int a = static_cast<int>(std::count(allowed.begin(), allowed.end(), true));
    return boost::multiprecision::pow(BigInt(a), static_cast<unsigned>(n));
  }

  double state_bound = 1.0;
  for (std::size_t i = 0; i < state_len; ++i) state_bound *= k;
  if (state_bound > 2e6) throw ResourceLimitError("transfer matrix: state space too large");

  // Enumerate clean words of length state_len as states.
  std::vector<std::vector<Symbol>> states;
  std::map<std::vector<Symbol>, std::size_t> state_index;
  std::vector<Symbol> cur(state_len, 0);
  auto gen = [&](auto&& self, std::size_t j) -> void {
    if (j == state_len) {
      if (clean(cur)) {
        state_index.emplace(cur, states.size());
        states.push_back(cur);
      }
      return;
    }
    for (Symbol s = 0; s < k; ++s) {
      cur[j] = s;
      self(self, j + 1);
    }
  };
  gen(gen, 0);

  if (n < static_cast<std::int64_t>(state_len)) {
    // Too short for the state DP; count short clean words directly.
    BigInt count = 0;
    std::vector<Symbol> word(static_cast<std::size_t>(n), 0);
    auto walk = [&](auto&& self, std::size_t j) -> void {
      if (j == word.size()) {
        if (clean(word)) ++count;
        return;
      }
      for (Symbol s = 0; s < k; ++s) {
        word[j] = s;
        self(self, j + 1);
      }
    };
    walk(walk, 0);
    return count;
  }
  if (n == static_cast<std::int64_t>(state_len)) return BigInt(states.size());

  // transitions[s][a] = successor state index after appending symbol a, or -1.
  std::vector<std::vector<std::int64_t>> transitions(
      states.size(), std::vector<std::int64_t>(static_cast<std::size_t>(k), -1));
  std::vector<Symbol> extended(state_len + 1);
  for (std::size_t si = 0; si < states.size(); ++si) {
    std::copy(states[si].begin(), states[si].end(), extended.begin());
    for (Symbol a = 0; a < k; ++a) {
      extended[state_len] = a;
      if (!clean(extended)) continue;
      std::vector<Symbol> next(extended.begin() + 1, extended.end());
      auto it = state_index.find(next);
      if (it != state_index.end()) {
        transitions[si][static_cast<std::size_t>(a)] = static_cast<std::int64_t>(it->second);
      }
    }
  }

  std::vector<BigInt> dp(states.size(), 1);
  for (std::int64_t step = 0; step < n - static_cast<std::int64_t>(state_len); ++step) {
    std::vector<BigInt> next(states.size(), 0);
    for (std::size_t si = 0; si < states.size(); ++si) {
      if (dp[si] == 0) continue;
      for (Symbol a = 0; a < k; ++a) {
        const std::int64_t t = transitions[si][static_cast<std::size_t>(a)];
        if (t >= 0) next[static_cast<std::size_t>(t)] += dp[si];
      }
    }
    dp.swap(next);
  }
  BigInt total = 0;
  for (const auto& v : dp) total += v;
  return total;
}

double log_pattern_count(const Subshift& shift, const std::vector<GroupElement>& window,
                         std::int64_t cap) {
  const auto w = sorted_window(window);
  if (w.empty()) return 0.0;
  if (shift.is_full_shift()) {
    return static_cast<double>(w.size()) * std::log(static_cast<double>(shift.alphabet_size()));
  }
  if (has_contiguous_z_forbidden(shift) &&
      w.back().v[0] - w.front().v[0] + 1 == static_cast<std::int64_t>(w.size())) {
    const BigInt count = transfer_matrix_count(shift, static_cast<std::int64_t>(w.size()));
    if (count == 0) throw std::domain_error("log pattern count: empty subshift window");
    return log_big(count);
  }
  const std::int64_t count = pattern_count(shift, w, cap);
  if (count == 0) throw std::domain_error("log pattern count: empty subshift window");
  return std::log(static_cast<double>(count));
}

std::vector<Cylinder> admissible_patterns(const Subshift& shift,
                                          const std::vector<GroupElement>& window,
                                          const Cylinder& fixed, std::int64_t cap) {
  const auto w = sorted_window(window);
  std::vector<std::optional<Symbol>> pinned(w.size());
  for (const auto& [g, s] : fixed.entries()) {
    auto it = std::lower_bound(w.begin(), w.end(), g);
    if (it == w.end() || !(*it == g)) {
      throw std::invalid_argument("admissible patterns: fixed support outside window");
    }
    if (s < 0 || s >= shift.alphabet_size()) {
      throw std::invalid_argument("admissible patterns: fixed symbol outside alphabet");
    }
    pinned[static_cast<std::size_t>(it - w.begin())] = s;
  }
  std::vector<Cylinder> out;
  for_each_admissible(shift, w, pinned, [&](const std::vector<Symbol>& word) {
    if (static_cast<std::int64_t>(out.size()) >= cap) {
      throw ResourceLimitError("admissible patterns exceed cap");
    }
    std::vector<Cylinder::Entry> entries;
    entries.reserve(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) entries.emplace_back(w[i], word[i]);
    out.push_back(Cylinder(std::move(entries)));
  });
  return out;
}

void for_each_admissible_pattern(const Subshift& shift,
                                 const std::vector<GroupElement>& window,
                                 const std::function<void(const std::vector<Symbol>&)>& visit) {
  const auto w = sorted_window(window);
  const std::vector<std::optional<Symbol>> pinned(w.size());
  for_each_admissible(shift, w, pinned, visit);
}

}  // namespace shiftlab
