#include "shiftlab/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>

#include "shiftlab/errors.hpp"
#include "shiftlab/prf.hpp"

namespace shiftlab {

namespace {

using Matrix = std::vector<std::vector<double>>;

Matrix mat_mul(const Matrix& a, const Matrix& b) {
  const std::size_t k = a.size();
  Matrix out(k, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t l = 0; l < k; ++l) {
      const double v = a[i][l];
      if (v == 0.0) continue;
      for (std::size_t j = 0; j < k; ++j) out[i][j] += v * b[l][j];
    }
  }
  return out;
}

Matrix mat_pow(const Matrix& base, std::int64_t e) {
  if (e < 1) throw std::invalid_argument("matrix power: exponent must be >= 1");
  Matrix result = base;
  Matrix sq = base;
  --e;
  while (e > 0) {
    if (e & 1) result = mat_mul(result, sq);
    sq = mat_mul(sq, sq);
    e >>= 1;
  }
  return result;
}

// Solve pi P = pi, sum pi = 1 by Gaussian elimination with partial pivoting.
std::vector<double> solve_stationary(const Matrix& p) {
  const std::size_t k = p.size();
  std::vector<std::vector<double>> aug(k, std::vector<double>(k + 1, 0.0));
  for (std::size_t r = 0; r + 1 < k; ++r) {
    for (std::size_t c = 0; c < k; ++c) aug[r][c] = p[c][r] - (r == c ? 1.0 : 0.0);
  }
  for (std::size_t c = 0; c < k; ++c) aug[k - 1][c] = 1.0;
  aug[k - 1][k] = 1.0;

  for (std::size_t col = 0; col < k; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < k; ++r) {
      if (std::abs(aug[r][col]) > std::abs(aug[pivot][col])) pivot = r;
    }
    if (std::abs(aug[pivot][col]) < 1e-14) {
      throw std::invalid_argument("markov measure: transition matrix is not irreducible");
    }
    std::swap(aug[col], aug[pivot]);
    for (std::size_t r = 0; r < k; ++r) {
      if (r == col) continue;
      const double f = aug[r][col] / aug[col][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c <= k; ++c) aug[r][c] -= f * aug[col][c];
    }
  }
  std::vector<double> pi(k);
  for (std::size_t i = 0; i < k; ++i) pi[i] = aug[i][k] / aug[i][i];
  return pi;
}

double xlogx(double v) { return v > 0.0 ? v * std::log(v) : 0.0; }

Symbol draw_from(const std::vector<double>& law, double u) {
  double acc = 0.0;
  for (std::size_t a = 0; a + 1 < law.size(); ++a) {
    acc += law[a];
    if (u < acc) return static_cast<Symbol>(a);
  }
  return static_cast<Symbol>(law.size() - 1);
}

class BernoulliSource final : public SymbolSource {
 public:
  BernoulliSource(AmenableGroup group, std::vector<double> p, std::uint64_t seed)
      : group_(group), p_(std::move(p)), seed_(seed) {}

  const AmenableGroup& group() const override { return group_; }
  Symbol symbol_at(const GroupElement& g) const override {
    const auto idx = static_cast<std::uint64_t>(group_.index_of(g));
    return draw_from(p_, prf_uniform(seed_, idx));
  }

 private:
  AmenableGroup group_;
  std::vector<double> p_;
  std::uint64_t seed_;
};

// Stationary chain on Z: coordinate 0 from the stationary law, positive
// coordinates by the forward chain, negative ones by the reversed chain.
// Walks are cached so repeated queries are O(1) and consistent.
class MarkovZSource final : public SymbolSource {
 public:
  MarkovZSource(Matrix transition, std::vector<double> pi, std::uint64_t seed)
      : group_(GroupKind::Z), fwd_rows_(std::move(transition)), pi_(std::move(pi)), seed_(seed) {
    const std::size_t k = pi_.size();
    bwd_rows_.assign(k, std::vector<double>(k, 0.0));
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = 0; b < k; ++b) bwd_rows_[a][b] = pi_[b] * fwd_rows_[b][a] / pi_[a];
    }
  }

  const AmenableGroup& group() const override { return group_; }

  Symbol symbol_at(const GroupElement& g) const override {
    const std::int64_t m = g.v[0];
    if (m > kCoordinateCap || m < -kCoordinateCap) {
      throw ResourceLimitError("markov sample: coordinate beyond cached-walk cap");
    }
    std::lock_guard<std::mutex> lock(mutex_);
    if (fwd_.empty()) fwd_.push_back(draw_from(pi_, unit(0)));
    if (m >= 0) {
      while (static_cast<std::int64_t>(fwd_.size()) <= m) {
        const Symbol prev = fwd_.back();
        fwd_.push_back(draw_from(fwd_rows_[static_cast<std::size_t>(prev)],
                                 unit(static_cast<std::int64_t>(fwd_.size()))));
      }
      return fwd_[static_cast<std::size_t>(m)];
    }
    const std::int64_t need = -m - 1;
    while (static_cast<std::int64_t>(bwd_.size()) <= need) {
      const Symbol prev = bwd_.empty() ? fwd_.front() : bwd_.back();
      bwd_.push_back(draw_from(bwd_rows_[static_cast<std::size_t>(prev)],
                               unit(-static_cast<std::int64_t>(bwd_.size()) - 1)));
    }
    return bwd_[static_cast<std::size_t>(need)];
  }

 private:
  static constexpr std::int64_t kCoordinateCap = 10'000'000;

  double unit(std::int64_t coord) const {
    const auto idx = static_cast<std::uint64_t>(group_.index_of(group_.element(coord)));
    return prf_uniform(seed_, idx);
  }

  AmenableGroup group_;
  Matrix fwd_rows_;
  Matrix bwd_rows_;
  std::vector<double> pi_;
  std::uint64_t seed_;
  mutable std::mutex mutex_;
  mutable std::vector<Symbol> fwd_;
  mutable std::vector<Symbol> bwd_;
};

}  // namespace

InvariantMeasure InvariantMeasure::bernoulli(AmenableGroup group, std::vector<double> p) {
  if (p.size() < 2) throw std::invalid_argument("bernoulli measure: need at least 2 symbols");
  double sum = 0.0;
  for (const double v : p) {
    if (v < 0.0) throw std::invalid_argument("bernoulli measure: negative probability");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw std::invalid_argument("bernoulli measure: probabilities must sum to 1");
  }
  InvariantMeasure mu;
  mu.kind_ = Kind::Bernoulli;
  mu.group_ = group;
  mu.alphabet_size_ = static_cast<int>(p.size());
  mu.p_ = std::move(p);
  return mu;
}

InvariantMeasure InvariantMeasure::markov(std::vector<std::vector<double>> transition,
                                          std::optional<std::vector<double>> stationary) {
  const std::size_t k = transition.size();
  if (k < 2) throw std::invalid_argument("markov measure: need at least 2 states");
  for (const auto& row : transition) {
    if (row.size() != k) throw std::invalid_argument("markov measure: matrix must be square");
    double sum = 0.0;
    for (const double v : row) {
      if (v < 0.0) throw std::invalid_argument("markov measure: negative transition probability");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      throw std::invalid_argument("markov measure: rows must sum to 1");
    }
  }
  std::vector<double> pi = stationary ? *stationary : solve_stationary(transition);
  if (pi.size() != k) throw std::invalid_argument("markov measure: stationary vector size mismatch");
  double sum = 0.0;
  for (const double v : pi) {
    if (v <= 0.0) {
      throw std::invalid_argument("markov measure: stationary vector must be strictly positive");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-10) {
    throw std::invalid_argument("markov measure: stationary vector must sum to 1");
  }
  for (std::size_t j = 0; j < k; ++j) {
    double v = 0.0;
    for (std::size_t i = 0; i < k; ++i) v += pi[i] * transition[i][j];
    if (std::abs(v - pi[j]) > 1e-10) {
      throw std::invalid_argument("markov measure: vector is not stationary for the matrix");
    }
  }
  InvariantMeasure mu;
  mu.kind_ = Kind::Markov;
  mu.group_ = AmenableGroup(GroupKind::Z);
  mu.alphabet_size_ = static_cast<int>(k);
  mu.transition_ = std::move(transition);
  mu.stationary_ = std::move(pi);
  return mu;
}

const std::vector<double>& InvariantMeasure::probabilities() const {
  if (kind_ != Kind::Bernoulli) throw std::logic_error("probabilities: not a bernoulli measure");
  return p_;
}

const std::vector<std::vector<double>>& InvariantMeasure::transition() const {
  if (kind_ != Kind::Markov) throw std::logic_error("transition: not a markov measure");
  return transition_;
}

const std::vector<double>& InvariantMeasure::stationary() const {
  if (kind_ != Kind::Markov) throw std::logic_error("stationary: not a markov measure");
  return stationary_;
}

namespace {

void require_symbols(const Cylinder& c, int alphabet_size) {
  for (const auto& [g, s] : c.entries()) {
    if (s < 0 || s >= alphabet_size) {
      throw std::domain_error("cylinder mass: symbol outside alphabet");
    }
  }
}

}  // namespace

double InvariantMeasure::cylinder_mass(const Cylinder& c) const {
  require_symbols(c, alphabet_size_);
  if (kind_ == Kind::Bernoulli) {
    double mass = 1.0;
    for (const auto& [g, s] : c.entries()) mass *= p_[static_cast<std::size_t>(s)];
    return mass;
  }
  const auto& entries = c.entries();
  if (entries.empty()) return 1.0;
  std::map<std::int64_t, Matrix> powers;
  double mass = stationary_[static_cast<std::size_t>(entries.front().second)];
  for (std::size_t i = 0; i + 1 < entries.size(); ++i) {
    const std::int64_t gap = entries[i + 1].first.v[0] - entries[i].first.v[0];
    const auto a = static_cast<std::size_t>(entries[i].second);
    const auto b = static_cast<std::size_t>(entries[i + 1].second);
    if (gap == 1) {
      mass *= transition_[a][b];
    } else {
      auto it = powers.find(gap);
      if (it == powers.end()) it = powers.emplace(gap, mat_pow(transition_, gap)).first;
      mass *= it->second[a][b];
    }
  }
  return mass;
}

double InvariantMeasure::log_cylinder_mass(const Cylinder& c) const {
  require_symbols(c, alphabet_size_);
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  if (kind_ == Kind::Bernoulli) {
    std::vector<std::int64_t> counts(static_cast<std::size_t>(alphabet_size_), 0);
    for (const auto& [g, s] : c.entries()) ++counts[static_cast<std::size_t>(s)];
    double out = 0.0;
    for (std::size_t a = 0; a < counts.size(); ++a) {
      if (counts[a] == 0) continue;
      if (p_[a] == 0.0) return kNegInf;
      out += static_cast<double>(counts[a]) * std::log(p_[a]);
    }
    return out;
  }
  const auto& entries = c.entries();
  if (entries.empty()) return 0.0;
  if (stationary_[static_cast<std::size_t>(entries.front().second)] == 0.0) return kNegInf;
  double out = std::log(stationary_[static_cast<std::size_t>(entries.front().second)]);
  // Group repeated (gap, from, to) steps so the common contiguous case sums
  // count * ln p with one log per distinct transition.
  std::map<std::tuple<std::int64_t, Symbol, Symbol>, std::int64_t> counts;
  for (std::size_t i = 0; i + 1 < entries.size(); ++i) {
    const std::int64_t gap = entries[i + 1].first.v[0] - entries[i].first.v[0];
    ++counts[{gap, entries[i].second, entries[i + 1].second}];
  }
  std::map<std::int64_t, Matrix> powers;
  for (const auto& [key, count] : counts) {
    const auto& [gap, a, b] = key;
    double step;
    if (gap == 1) {
      step = transition_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
    } else {
      auto it = powers.find(gap);
      if (it == powers.end()) it = powers.emplace(gap, mat_pow(transition_, gap)).first;
      step = it->second[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
    }
    if (step == 0.0) return kNegInf;
    out += static_cast<double>(count) * std::log(step);
  }
  return out;
}

double InvariantMeasure::entropy_closed_form() const {
  double h = 0.0;
  if (kind_ == Kind::Bernoulli) {
    for (const double v : p_) h -= xlogx(v);
    return h;
  }
  for (std::size_t i = 0; i < stationary_.size(); ++i) {
    for (const double v : transition_[i]) h -= stationary_[i] * xlogx(v);
  }
  return h;
}

Configuration InvariantMeasure::sample_configuration(std::uint64_t seed) const {
  if (kind_ == Kind::Bernoulli) {
    return Configuration(std::make_shared<BernoulliSource>(group_, p_, seed));
  }
  return Configuration(std::make_shared<MarkovZSource>(transition_, stationary_, seed));
}

Partition Partition::zero_coordinate(const AmenableGroup& group, int alphabet_size) {
  if (alphabet_size < 2) throw std::invalid_argument("partition: alphabet size must be >= 2");
  std::vector<Cylinder> atoms;
  atoms.reserve(static_cast<std::size_t>(alphabet_size));
  for (Symbol a = 0; a < alphabet_size; ++a) {
    atoms.push_back(Cylinder({{group.identity(), a}}));
  }
  Partition p;
  p.atoms_ = std::move(atoms);
  return p;
}

Partition Partition::from_atoms(std::vector<Cylinder> atoms) {
  if (atoms.empty()) throw std::invalid_argument("partition: no atoms");
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (atoms[i].empty()) throw std::invalid_argument("partition: empty-support atom");
    for (std::size_t j = i + 1; j < atoms.size(); ++j) {
      if (atoms[i].consistent_with(atoms[j])) {
        throw std::invalid_argument("partition: atoms overlap");
      }
    }
  }
  Partition p;
  p.atoms_ = std::move(atoms);
  return p;
}

std::size_t Partition::atom_index_of(const Configuration& x) const {
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (atoms_[i].matches(x)) return i;
  }
  throw std::domain_error("partition: configuration matches no atom");
}

bool Partition::is_zero_coordinate(const AmenableGroup& group, int alphabet_size) const {
  if (atoms_.size() != static_cast<std::size_t>(alphabet_size)) return false;
  for (Symbol a = 0; a < alphabet_size; ++a) {
    const auto& atom = atoms_[static_cast<std::size_t>(a)];
    if (atom.size() != 1 || !(atom.entries().front().first == group.identity()) ||
        atom.entries().front().second != a) {
      return false;
    }
  }
  return true;
}

double partition_entropy(const InvariantMeasure& mu, const Partition& partition,
                         const std::vector<GroupElement>& folner_set, std::int64_t atom_cap) {
  std::vector<GroupElement> fs = folner_set;
  std::sort(fs.begin(), fs.end());
  fs.erase(std::unique(fs.begin(), fs.end()), fs.end());
  if (fs.empty()) return 0.0;

  if (partition.is_zero_coordinate(mu.group(), mu.alphabet_size())) {
    if (mu.kind() == InvariantMeasure::Kind::Bernoulli) {
      return static_cast<double>(fs.size()) * mu.entropy_closed_form();
    }
    // Chain rule over sorted coordinates: H(pi) plus one conditional term per
    // gap, H(X_{t+d} | X_t) computed from the d-step transition matrix.
    const auto& pi = mu.stationary();
    double h = 0.0;
    for (const double v : pi) h -= xlogx(v);
    std::map<std::int64_t, double> step_entropy;
    for (std::size_t i = 0; i + 1 < fs.size(); ++i) {
      const std::int64_t gap = fs[i + 1].v[0] - fs[i].v[0];
      auto it = step_entropy.find(gap);
      if (it == step_entropy.end()) {
        const Matrix m = mat_pow(mu.transition(), gap);
        double hs = 0.0;
        for (std::size_t a = 0; a < pi.size(); ++a) {
          for (const double v : m[a]) hs -= pi[a] * xlogx(v);
        }
        it = step_entropy.emplace(gap, hs).first;
      }
      h += it->second;
    }
    return h;
  }

  const AmenableGroup& group = mu.group();
  double h = 0.0;
  std::int64_t atom_count = 0;
  // Joined atoms are merges of translated atoms, one choice per set element;
  // disjointness of the partition makes distinct choices disjoint events.
  auto rec = [&](auto&& self, std::size_t j, const Cylinder& cur) -> void {
    if (j == fs.size()) {
      if (++atom_count > atom_cap) throw ResourceLimitError("partition entropy: atom cap exceeded");
      const double mass = mu.cylinder_mass(cur);
      h -= xlogx(mass);
      return;
    }
    for (const auto& atom : partition.atoms()) {
      const Cylinder t = atom.translated(group, fs[j]);
      if (cur.consistent_with(t)) self(self, j + 1, cur.merged(t));
    }
  };
  rec(rec, 0, Cylinder());
  return h;
}

}  // namespace shiftlab
