#include "shiftlab/generic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>

#include "shiftlab/errors.hpp"

namespace shiftlab {

namespace {

constexpr int kMaxEmpiricalDepth = 6;  // keys pack one byte per prefix slot

void validate_spec(const NeighborhoodSpec& spec) {
  if (spec.m < 1) throw std::invalid_argument("neighborhood: m must be >= 1");
  if (spec.depth < 1) throw std::invalid_argument("neighborhood: depth must be >= 1");
  if (!(spec.tolerance() > 0.0)) {
    throw std::invalid_argument("neighborhood: tolerance must be positive");
  }
}

std::vector<GroupElement> enumeration_prefix(const AmenableGroup& group, int depth) {
  std::vector<GroupElement> prefix;
  prefix.reserve(static_cast<std::size_t>(depth));
  for (int i = 1; i <= depth; ++i) prefix.push_back(group.element_at(i));
  return prefix;
}

double positive_infinity() { return std::numeric_limits<double>::infinity(); }

}  // namespace

EmpiricalMeasure::EmpiricalMeasure(const Configuration& x,
                                   const std::vector<GroupElement>& folner_set, int depth)
    : group_(x.group()),
      window_size_(static_cast<std::int64_t>(folner_set.size())),
      depth_(depth) {
  if (depth < 1) throw std::invalid_argument("empirical measure: depth must be >= 1");
  if (depth > kMaxEmpiricalDepth) {
    throw UnimplementedError("empirical measure: test depth beyond 6 is not supported");
  }
  if (folner_set.empty()) throw std::invalid_argument("empirical measure: empty window");
  const auto prefix = enumeration_prefix(group_, depth);
  std::vector<Symbol> word(static_cast<std::size_t>(depth), 0);
  for (const auto& g : folner_set) {
    for (int i = 0; i < depth; ++i) {
      const Symbol s = x.symbol_at(group_.multiply(prefix[static_cast<std::size_t>(i)], g));
      if (s < 0 || s > 255) {
        throw UnimplementedError("empirical measure: symbols beyond one byte are not supported");
      }
      word[static_cast<std::size_t>(i)] = s;
    }
    for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << depth); ++mask) {
      std::uint64_t key = mask;
      for (int i = 0; i < depth; ++i) {
        if (mask >> i & 1u) {
          key |= static_cast<std::uint64_t>(word[static_cast<std::size_t>(i)]) << (8 + 8 * i);
        }
      }
      ++counts_[key];
    }
  }
}

std::int64_t EmpiricalMeasure::count(const Cylinder& cylinder) const {
  std::uint32_t mask = 0;
  std::uint64_t key = 0;
  for (const auto& [g, s] : cylinder.entries()) {
    const std::int64_t index = group_.index_of(g);
    if (index < 1 || index > depth_) {
      throw std::invalid_argument("empirical measure: cylinder support outside the test prefix");
    }
    if (s < 0 || s > 255) return 0;  // never observed
    mask |= std::uint32_t{1} << (index - 1);
    key |= static_cast<std::uint64_t>(s) << (8 + 8 * (index - 1));
  }
  if (mask == 0) return window_size_;
  key |= mask;
  const auto it = counts_.find(key);
  return it == counts_.end() ? 0 : it->second;
}

double EmpiricalMeasure::frequency(const Cylinder& cylinder) const {
  return static_cast<double>(count(cylinder)) / static_cast<double>(window_size_);
}

EmpiricalMeasure empirical_measure(const Configuration& x,
                                   const std::vector<GroupElement>& folner_set, int depth) {
  return EmpiricalMeasure(x, folner_set, depth);
}

double weak_star_distance(const EmpiricalMeasure& empirical, const InvariantMeasure& mu) {
  if (empirical.group().kind() != mu.group().kind()) {
    throw std::invalid_argument("weak-star distance: group kinds differ");
  }
  const int depth = empirical.depth();
  const int k = mu.alphabet_size();
  if ((std::pow(static_cast<double>(k) + 1.0, depth) - 1.0) > 1e6) {
    throw ResourceLimitError("weak-star distance: test family too large");
  }
  const auto prefix = enumeration_prefix(empirical.group(), depth);
  double distance = 0.0;
  std::vector<std::size_t> positions;
  std::vector<Symbol> assignment;
  for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << depth); ++mask) {
    positions.clear();
    for (int i = 0; i < depth; ++i) {
      if (mask >> i & 1u) positions.push_back(static_cast<std::size_t>(i));
    }
    assignment.assign(positions.size(), 0);
    while (true) {
      std::vector<Cylinder::Entry> entries;
      entries.reserve(positions.size());
      for (std::size_t j = 0; j < positions.size(); ++j) {
        entries.emplace_back(prefix[positions[j]], assignment[j]);
      }
      const Cylinder c(std::move(entries));
      distance = std::max(distance,
                          std::abs(empirical.frequency(c) - mu.cylinder_mass(c)));
      std::size_t j = 0;
      for (; j < assignment.size(); ++j) {
        if (++assignment[j] < k) break;
        assignment[j] = 0;
      }
      if (j == assignment.size()) break;
    }
  }
  return distance;
}

NeighborhoodSpec NeighborhoodSpec::standard(int m) {
  if (m < 1) throw std::invalid_argument("neighborhood: m must be >= 1");
  NeighborhoodSpec spec;
  spec.m = m;
  spec.depth = std::min(m, 4);
  return spec;
}

bool in_neighborhood(const Configuration& x, const InvariantMeasure& mu,
                     const std::vector<GroupElement>& folner_set,
                     const NeighborhoodSpec& spec) {
  validate_spec(spec);
  const EmpiricalMeasure empirical(x, folner_set, spec.depth);
  return weak_star_distance(empirical, mu) <= spec.tolerance();
}

namespace {

TypicalWordCount finish_count(BigInt count, std::int64_t n) {
  TypicalWordCount out;
  out.rate = count > 0 ? log_big(count) / static_cast<double>(n) : -positive_infinity();
  out.count = std::move(count);
  return out;
}

// Exact binomial type classes: words are classified by their zero count.
TypicalWordCount binomial_typical_count(const InvariantMeasure& mu, std::int64_t n,
                                        double tol) {
  const auto& p = mu.probabilities();
  BigInt total = 0;
  BigInt binom = 1;  // C(n, 0)
  for (std::int64_t j = 0; j <= n; ++j) {
    const double f0 = static_cast<double>(j) / static_cast<double>(n);
    const double f1 = static_cast<double>(n - j) / static_cast<double>(n);
    if (std::abs(f0 - p[0]) <= tol && std::abs(f1 - p[1]) <= tol) total += binom;
    binom = binom * (n - j) / (j + 1);
  }
  return finish_count(std::move(total), n);
}

TypicalWordCount enumerated_typical_count(const Subshift& shift, const InvariantMeasure& mu,
                                          std::int64_t n, const NeighborhoodSpec& spec,
                                          double epsilon) {
  if (n > 24) {
    throw UnimplementedError("typical words: enumeration supports n <= 24 only");
  }
  const auto& group = shift.group();
  const int k = shift.alphabet_size();
  const int depth = spec.depth;
  const double tol = spec.tolerance();
  if (depth > kMaxEmpiricalDepth) {
    throw UnimplementedError("typical words: test depth beyond 6 is not supported");
  }
  std::vector<GroupElement> folner;
  folner.reserve(static_cast<std::size_t>(n));
  for (std::int64_t o = 0; o < n; ++o) folner.push_back(GroupElement{{o, 0, 0}, GroupKind::Z});

  const int eps_depth = bowen_depth(epsilon);
  const int window_depth = std::max(depth, std::max(eps_depth, 1));
  const auto window = bowen_domain(group, folner, std::ldexp(1.0, -window_depth));
  const auto trace_domain = bowen_domain(group, folner, epsilon);
  if (static_cast<double>(window.size()) * std::log2(static_cast<double>(k)) > 24.0) {
    throw UnimplementedError("typical words: window too large to enumerate");
  }
  double tuple_space = 1.0;
  for (int i = 0; i < depth; ++i) tuple_space *= static_cast<double>(k);
  if (tuple_space > 65536.0) {
    throw UnimplementedError("typical words: tuple table too large to enumerate");
  }
  const std::size_t n_tuples = static_cast<std::size_t>(tuple_space);

  // The window over Z is one contiguous interval; positions index by offset.
  const std::int64_t base = window.front().v[0];
  const auto prefix = enumeration_prefix(group, depth);
  std::vector<std::int64_t> prefix_offset(static_cast<std::size_t>(depth));
  for (int i = 0; i < depth; ++i) prefix_offset[static_cast<std::size_t>(i)] = prefix[static_cast<std::size_t>(i)].v[0];

  // Test cylinders indexed by (support mask, symbols); each stores its mass
  // and the depth-tuples it matches.
  struct TestCell {
    double mass = 0.0;
    std::vector<std::int32_t> tuples;
  };
  std::vector<TestCell> cells;
  std::vector<std::size_t> mask_base(std::size_t{1} << depth, 0);
  for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << depth); ++mask) {
    mask_base[mask] = cells.size();
    std::size_t combos = 1;
    for (int i = 0; i < depth; ++i) {
      if (mask >> i & 1u) combos *= static_cast<std::size_t>(k);
    }
    cells.resize(cells.size() + combos);
  }
  {
    std::vector<Symbol> digits(static_cast<std::size_t>(depth), 0);
    for (std::size_t t = 0; t < n_tuples; ++t) {
      std::size_t rest = t;
      for (int i = 0; i < depth; ++i) {
        digits[static_cast<std::size_t>(i)] = static_cast<Symbol>(rest % static_cast<std::size_t>(k));
        rest /= static_cast<std::size_t>(k);
      }
      for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << depth); ++mask) {
        std::size_t id = mask_base[mask];
        std::size_t stride = 1;
        for (int i = 0; i < depth; ++i) {
          if (mask >> i & 1u) {
            id += stride * static_cast<std::size_t>(digits[static_cast<std::size_t>(i)]);
            stride *= static_cast<std::size_t>(k);
          }
        }
        cells[id].tuples.push_back(static_cast<std::int32_t>(t));
      }
    }
  }
  for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << depth); ++mask) {
    std::vector<std::size_t> positions;
    for (int i = 0; i < depth; ++i) {
      if (mask >> i & 1u) positions.push_back(static_cast<std::size_t>(i));
    }
    std::vector<Symbol> assignment(positions.size(), 0);
    while (true) {
      std::size_t id = mask_base[mask];
      std::size_t stride = 1;
      std::vector<Cylinder::Entry> entries;
      for (std::size_t j = 0, pi = 0; j < static_cast<std::size_t>(depth); ++j) {
        if (mask >> j & 1u) {
          id += stride * static_cast<std::size_t>(assignment[pi]);
          stride *= static_cast<std::size_t>(k);
          entries.emplace_back(prefix[j], assignment[pi]);
          ++pi;
        }
      }
      cells[id].mass = mu.cylinder_mass(Cylinder(std::move(entries)));
      std::size_t j = 0;
      for (; j < assignment.size(); ++j) {
        if (++assignment[j] < k) break;
        assignment[j] = 0;
      }
      if (j == assignment.size()) break;
    }
  }

  std::vector<std::size_t> trace_positions;
  trace_positions.reserve(trace_domain.size());
  for (const auto& g : trace_domain) {
    trace_positions.push_back(static_cast<std::size_t>(g.v[0] - base));
  }

  std::vector<std::int64_t> tuple_count(n_tuples, 0);
  std::vector<std::int32_t> touched;
  std::set<std::vector<Symbol>> traces;
  std::vector<Symbol> trace(trace_positions.size());
  for_each_admissible_pattern(shift, window, [&](const std::vector<Symbol>& word) {
    for (std::int64_t o = 0; o < n; ++o) {
      std::size_t t = 0;
      std::size_t stride = 1;
      for (int i = 0; i < depth; ++i) {
        const auto pos = static_cast<std::size_t>(o + prefix_offset[static_cast<std::size_t>(i)] - base);
        t += stride * static_cast<std::size_t>(word[pos]);
        stride *= static_cast<std::size_t>(k);
      }
      if (tuple_count[t]++ == 0) touched.push_back(static_cast<std::int32_t>(t));
    }
    bool member = true;
    for (const auto& cell : cells) {
      std::int64_t cnt = 0;
      for (const std::int32_t t : cell.tuples) cnt += tuple_count[static_cast<std::size_t>(t)];
      const double freq = static_cast<double>(cnt) / static_cast<double>(n);
      if (std::abs(freq - cell.mass) > tol) {
        member = false;
        break;
      }
    }
    if (member) {
      for (std::size_t j = 0; j < trace_positions.size(); ++j) trace[j] = word[trace_positions[j]];
      traces.insert(trace);
    }
    for (const std::int32_t t : touched) tuple_count[static_cast<std::size_t>(t)] = 0;
    touched.clear();
  });
  return finish_count(BigInt(traces.size()), n);
}

}  // namespace

TypicalWordCount count_typical_words(const Subshift& shift, const InvariantMeasure& mu,
                                     std::int64_t n, const NeighborhoodSpec& spec,
                                     double epsilon) {
  validate_spec(spec);
  if (shift.group().kind() != GroupKind::Z) {
    throw UnimplementedError("typical words: only implemented over Z");
  }
  if (mu.kind() != InvariantMeasure::Kind::Bernoulli) {
    throw UnimplementedError("typical words: only Bernoulli measures are supported");
  }
  if (mu.alphabet_size() != shift.alphabet_size()) {
    throw std::invalid_argument("typical words: alphabet sizes differ");
  }
  if (n < 1) throw std::invalid_argument("typical words: n must be >= 1");
  if (epsilon == 0.5 && spec.depth == 1 && shift.is_full_shift() && mu.alphabet_size() == 2) {
    return binomial_typical_count(mu, n, spec.tolerance());
  }
  return enumerated_typical_count(shift, mu, n, spec, epsilon);
}

Trajectory make_trajectory(std::vector<std::int64_t> orders, std::vector<double> values) {
  if (orders.empty() || orders.size() != values.size()) {
    throw std::invalid_argument("trajectory: need matching nonempty samples");
  }
  for (std::size_t i = 1; i < orders.size(); ++i) {
    if (orders[i] <= orders[i - 1]) {
      throw std::invalid_argument("trajectory: orders must be strictly increasing");
    }
  }
  Trajectory out;
  out.window = (orders.size() + 1) / 2;
  out.final_value = values.back();
  double sum = 0.0;
  for (const double v : values) sum += v;
  out.running_mean = sum / static_cast<double>(values.size());
  double lo = positive_infinity();
  double hi = -positive_infinity();
  for (std::size_t i = values.size() - out.window; i < values.size(); ++i) {
    lo = std::min(lo, values[i]);
    hi = std::max(hi, values[i]);
  }
  out.last_window_oscillation = hi - lo;
  out.orders = std::move(orders);
  out.values = std::move(values);
  return out;
}

double smb_value(const Configuration& x, const InvariantMeasure& mu, const Partition& partition,
                 const std::vector<GroupElement>& folner_set) {
  if (x.group().kind() != mu.group().kind()) {
    throw std::invalid_argument("smb: configuration and measure groups differ");
  }
  if (folner_set.empty()) throw std::invalid_argument("smb: empty window");
  Cylinder joint;
  if (partition.is_zero_coordinate(x.group(), mu.alphabet_size())) {
    joint = Cylinder::restriction_of(x, folner_set);
  } else {
    std::vector<Cylinder::Entry> entries;
    for (const auto& g : folner_set) {
      const auto& atom = partition.atoms()[partition.atom_index_of(act(g, x))];
      const auto shifted = atom.translated(x.group(), g);
      entries.insert(entries.end(), shifted.entries().begin(), shifted.entries().end());
    }
    joint = Cylinder(std::move(entries));
  }
  const double log_mass = mu.log_cylinder_mass(joint);
  if (std::isinf(log_mass)) return positive_infinity();
  return -log_mass / static_cast<double>(folner_set.size());
}

Trajectory smb_trajectory(const Configuration& x, const InvariantMeasure& mu,
                          const Partition& partition, const FolnerSequence& seq,
                          const std::vector<int>& schedule) {
  std::vector<std::int64_t> orders;
  std::vector<double> values;
  orders.reserve(schedule.size());
  values.reserve(schedule.size());
  for (const int n : schedule) {
    orders.push_back(n);
    values.push_back(smb_value(x, mu, partition, seq.set(n)));
  }
  return make_trajectory(std::move(orders), std::move(values));
}

double brin_katok_value(const Configuration& x, const InvariantMeasure& mu, double delta,
                        const std::vector<GroupElement>& folner_set) {
  if (x.group().kind() != mu.group().kind()) {
    throw std::invalid_argument("brin-katok: configuration and measure groups differ");
  }
  if (folner_set.empty()) throw std::invalid_argument("brin-katok: empty window");
  const auto ball = bowen_ball(x, folner_set, delta);
  const double log_mass = mu.log_cylinder_mass(ball.cylinder);
  if (std::isinf(log_mass)) return positive_infinity();
  return -log_mass / static_cast<double>(folner_set.size());
}

Trajectory brin_katok_trajectory(const Configuration& x, const InvariantMeasure& mu,
                                 double delta, const FolnerSequence& seq,
                                 const std::vector<int>& schedule) {
  std::vector<std::int64_t> orders;
  std::vector<double> values;
  orders.reserve(schedule.size());
  values.reserve(schedule.size());
  for (const int n : schedule) {
    orders.push_back(n);
    values.push_back(brin_katok_value(x, mu, delta, seq.set(n)));
  }
  return make_trajectory(std::move(orders), std::move(values));
}

StirlingReport stirling_bound(std::int64_t n, double q, int a) {
  if (n < 1) throw std::invalid_argument("stirling bound: n must be >= 1");
  if (!(q > 0.0 && q < 1.0)) throw std::domain_error("stirling bound: q must lie in (0, 1)");
  if (a < 2) throw std::invalid_argument("stirling bound: alphabet must have >= 2 symbols");
  const auto j_max = static_cast<std::int64_t>(std::floor(q * static_cast<double>(n)));
  StirlingReport report;
  BigInt binom = 1;  // C(n, 0)
  BigInt power = 1;  // (a-1)^0
  for (std::int64_t j = 0; j <= j_max; ++j) {
    report.exact_count += binom * power;
    binom = binom * (n - j) / (j + 1);
    power *= a - 1;
  }
  report.growth_exponent = q + q * std::log(static_cast<double>(a - 1)) - q * std::log(q) -
                           (1.0 - q) * std::log(1.0 - q);
  const double exponent = report.growth_exponent * static_cast<double>(n);
  report.bound = std::exp(exponent);
  const double count_d = report.exact_count.convert_to<double>();
  if (std::isinf(count_d) || std::isinf(report.bound)) {
    report.holds = log_big(report.exact_count) <= exponent;
  } else {
    report.holds = count_d <= report.bound;
  }
  return report;
}

GenericCertificate generic_point_certificate(const Configuration& x, const InvariantMeasure& mu,
                                             const FolnerSequence& seq, int m_max,
                                             const std::vector<int>& schedule) {
  if (m_max < 1) throw std::invalid_argument("certificate: m_max must be >= 1");
  if (schedule.empty()) throw std::invalid_argument("certificate: empty schedule");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (schedule[i] < 1 || (i > 0 && schedule[i] <= schedule[i - 1])) {
      throw std::invalid_argument("certificate: schedule must be strictly increasing");
    }
  }
  if (x.group().kind() != seq.group().kind()) {
    throw std::invalid_argument("certificate: configuration and sequence groups differ");
  }
  GenericCertificate cert;
  cert.schedule = schedule;
  cert.rows.resize(static_cast<std::size_t>(m_max));
  for (int m = 1; m <= m_max; ++m) {
    auto& row = cert.rows[static_cast<std::size_t>(m - 1)];
    row.m = m;
    row.depth = NeighborhoodSpec::standard(m).depth;
    row.member.resize(schedule.size(), false);
  }
  // Distances depend on the test depth only, and depths repeat at m >= 4;
  // compute each (n, depth) distance once.
  for (std::size_t ni = 0; ni < schedule.size(); ++ni) {
    const auto folner = seq.set(schedule[ni]);
    double distance_at_depth[5] = {0, 0, 0, 0, 0};
    const int max_depth = std::min(m_max, 4);
    for (int d = 1; d <= max_depth; ++d) {
      distance_at_depth[d] = weak_star_distance(EmpiricalMeasure(x, folner, d), mu);
    }
    for (int m = 1; m <= m_max; ++m) {
      auto& row = cert.rows[static_cast<std::size_t>(m - 1)];
      row.member[ni] = distance_at_depth[row.depth] <= 1.0 / m;
    }
  }
  for (auto& row : cert.rows) {
    std::size_t first = row.member.size();
    for (std::size_t i = row.member.size(); i-- > 0;) {
      if (!row.member[i]) break;
      first = i;
    }
    row.witnessed = first < row.member.size();
    row.threshold = row.witnessed ? schedule[first] : 0;
  }
  return cert;
}

}  // namespace shiftlab
