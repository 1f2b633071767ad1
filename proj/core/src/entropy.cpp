#include "shiftlab/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <queue>
#include <stdexcept>
#include <utility>

#include "shiftlab/errors.hpp"

namespace shiftlab {

SubsetSpec SubsetSpec::whole_space() {
  SubsetSpec z;
  z.kind_ = Kind::WholeSpace;
  return z;
}

SubsetSpec SubsetSpec::cylinder_union(std::vector<Cylinder> cylinders) {
  if (cylinders.empty()) {
    throw std::invalid_argument("subset spec: cylinder union needs at least one cylinder");
  }
  SubsetSpec z;
  z.kind_ = Kind::CylinderUnion;
  z.cylinders_ = std::move(cylinders);
  return z;
}

SubsetSpec SubsetSpec::point_list(std::vector<Configuration> points,
                                  std::vector<GroupElement> domain) {
  if (points.empty()) {
    throw std::invalid_argument("subset spec: point list needs at least one point");
  }
  SubsetSpec z;
  z.kind_ = Kind::PointList;
  z.points_ = std::move(points);
  z.point_domain_ = std::move(domain);
  return z;
}

namespace {

std::vector<GroupElement> sorted_union(std::vector<GroupElement> a,
                                       const std::vector<GroupElement>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

// Positions of the sorted subset inside the sorted superset.
std::vector<std::size_t> subset_positions(const std::vector<GroupElement>& sub,
                                          const std::vector<GroupElement>& super) {
  std::vector<std::size_t> pos;
  pos.reserve(sub.size());
  for (const auto& g : sub) {
    auto it = std::lower_bound(super.begin(), super.end(), g);
    if (it == super.end() || !(*it == g)) {
      throw std::logic_error("cover instance: ball domain escapes the universe domain");
    }
    pos.push_back(static_cast<std::size_t>(it - super.begin()));
  }
  return pos;
}

void require_group(const Subshift& shift, const GroupElement& g, const char* what) {
  if (g.kind != shift.group().kind()) {
    throw std::invalid_argument(std::string("cover instance: ") + what +
                                " lives over a different group");
  }
}

// Target cylinders of the instance: the subset resolved on the union of all
// ball domains. Each target has full support there.
std::vector<Cylinder> build_universe(const Subshift& shift, const SubsetSpec& subset,
                                     const std::vector<GroupElement>& domain,
                                     std::int64_t cap) {
  std::vector<Cylinder> cylinders;
  switch (subset.kind()) {
    case SubsetSpec::Kind::WholeSpace:
      return admissible_patterns(shift, domain, Cylinder(), cap);
    case SubsetSpec::Kind::CylinderUnion:
      cylinders = subset.cylinders();
      break;
    case SubsetSpec::Kind::PointList:
      for (const auto& g : subset.point_domain()) require_group(shift, g, "point domain");
      cylinders.reserve(subset.points().size());
      for (const auto& x : subset.points()) {
        if (x.group().kind() != shift.group().kind()) {
          throw std::invalid_argument("cover instance: point lives over a different group");
        }
        cylinders.push_back(Cylinder::restriction_of(x, subset.point_domain()));
      }
      break;
  }
  std::vector<Cylinder> out;
  for (const auto& c : cylinders) {
    // A pinned symbol outside the alphabet makes the cylinder empty in this
    // shift; it contributes no targets.
    bool empty_here = false;
    for (const auto& [g, sym] : c.entries()) {
      require_group(shift, g, "subset cylinder");
      if (sym < 0 || sym >= shift.alphabet_size()) {
        empty_here = true;
        break;
      }
    }
    if (empty_here) continue;
    const auto window = sorted_union(c.support(), domain);
    auto extensions =
        admissible_patterns(shift, window, c, cap - static_cast<std::int64_t>(out.size()));
    for (auto& e : extensions) out.push_back(e.restricted(domain));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

CoverSolution greedy_cover(const CoverInstance& instance, double s) {
  CoverSolution sol;
  sol.s = s;
  const std::size_t n_targets = instance.universe.size();
  if (n_targets == 0) {
    sol.exact = true;
    return sol;
  }
  std::vector<double> weight(instance.candidates.size());
  for (std::size_t i = 0; i < weight.size(); ++i) {
    weight[i] = candidate_weight(instance.candidates[i], s);
  }
  std::vector<char> covered(n_targets, 0);
  std::size_t remaining = n_targets;
  const auto uncovered_count = [&](std::size_t c) {
    std::size_t cnt = 0;
    for (const std::int32_t t : instance.coverage[c]) {
      cnt += static_cast<std::size_t>(!covered[static_cast<std::size_t>(t)]);
    }
    return cnt;
  };
  // Lazy evaluation: stored scores are stale lower bounds (a score only grows
  // as coverage shrinks), so a popped entry whose recomputed score still beats
  // the heap top is the true minimum. Ties fall to the smaller index, i.e. the
  // (order, ball) presort of the candidates.
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap;
  for (std::size_t c = 0; c < instance.candidates.size(); ++c) {
    if (instance.coverage[c].empty()) continue;
    heap.emplace(weight[c] / static_cast<double>(instance.coverage[c].size()), c);
  }
  while (remaining > 0) {
    if (heap.empty()) throw std::logic_error("greedy cover: universe not coverable");
    const std::size_t c = heap.top().second;
    heap.pop();
    const std::size_t cnt = uncovered_count(c);
    if (cnt == 0) continue;
    const Entry fresh{weight[c] / static_cast<double>(cnt), c};
    if (!heap.empty() && heap.top() < fresh) {
      heap.push(fresh);
      continue;
    }
    for (const std::int32_t t : instance.coverage[c]) covered[static_cast<std::size_t>(t)] = 1;
    remaining -= cnt;
    sol.chosen.push_back(c);
    sol.total_cost += weight[c];
  }
  return sol;
}

CoverSolution exact_cover(const CoverInstance& instance, double s, std::int64_t node_cap) {
  CoverSolution best = greedy_cover(instance, s);
  best.exact = true;
  const std::size_t n_targets = instance.universe.size();
  if (n_targets == 0) return best;

  std::vector<double> weight(instance.candidates.size());
  for (std::size_t i = 0; i < weight.size(); ++i) {
    weight[i] = candidate_weight(instance.candidates[i], s);
  }
  std::vector<std::vector<std::int32_t>> coverers(n_targets);
  for (std::size_t c = 0; c < instance.coverage.size(); ++c) {
    for (const std::int32_t t : instance.coverage[c]) {
      coverers[static_cast<std::size_t>(t)].push_back(static_cast<std::int32_t>(c));
    }
  }
  // Fractional share bound: any cover charges target t at least
  // min over covering c of weight(c) / |coverage(c)|.
  std::vector<double> share(n_targets, 0.0);
  for (std::size_t t = 0; t < n_targets; ++t) {
    if (coverers[t].empty()) throw std::logic_error("exact cover: universe not coverable");
    std::sort(coverers[t].begin(), coverers[t].end(), [&](std::int32_t a, std::int32_t b) {
      const double wa = weight[static_cast<std::size_t>(a)];
      const double wb = weight[static_cast<std::size_t>(b)];
      return wa != wb ? wa < wb : a < b;
    });
    double m = std::numeric_limits<double>::infinity();
    for (const std::int32_t c : coverers[t]) {
      const auto ci = static_cast<std::size_t>(c);
      m = std::min(m, weight[ci] / static_cast<double>(instance.coverage[ci].size()));
    }
    share[t] = m;
  }
  std::vector<std::int32_t> covered_count(n_targets, 0);
  std::size_t uncovered = n_targets;
  double lower = 0.0;
  for (std::size_t t = 0; t < n_targets; ++t) lower += share[t];
  double cost = 0.0;
  std::vector<std::size_t> chosen;
  std::int64_t nodes = 0;

  // Branch on an uncovered target of minimal degree; each branch commits one
  // of its covering balls, which is a complete enumeration of covers.
  const std::function<void()> search = [&]() {
    if (++nodes > node_cap) {
      throw ResourceLimitError("exact cover: node cap exceeded");
    }
    if (uncovered == 0) {
      if (cost < best.total_cost) {
        best.total_cost = cost;
        best.chosen = chosen;
      }
      return;
    }
    if (cost + lower >= best.total_cost) return;
    std::size_t pick = n_targets;
    std::size_t pick_degree = std::numeric_limits<std::size_t>::max();
    for (std::size_t t = 0; t < n_targets; ++t) {
      if (covered_count[t] == 0 && coverers[t].size() < pick_degree) {
        pick = t;
        pick_degree = coverers[t].size();
      }
    }
    for (const std::int32_t c : coverers[pick]) {
      const auto ci = static_cast<std::size_t>(c);
      for (const std::int32_t t : instance.coverage[ci]) {
        const auto ti = static_cast<std::size_t>(t);
        if (covered_count[ti]++ == 0) {
          --uncovered;
          lower -= share[ti];
        }
      }
      cost += weight[ci];
      chosen.push_back(ci);
      search();
      chosen.pop_back();
      cost -= weight[ci];
      for (const std::int32_t t : instance.coverage[ci]) {
        const auto ti = static_cast<std::size_t>(t);
        if (--covered_count[ti] == 0) {
          ++uncovered;
          lower += share[ti];
        }
      }
    }
  };
  search();
  return best;
}

}  // namespace

CoverInstance build_cover_instance(const Subshift& shift, const SubsetSpec& subset,
                                   const FolnerSequence& seq, std::int64_t n_lo,
                                   std::int64_t n_hi, double epsilon,
                                   const CoverLimits& limits) {
  if (n_lo < 1 || n_lo > n_hi || n_hi > std::numeric_limits<int>::max()) {
    throw std::invalid_argument("cover instance: need 1 <= n_lo <= n_hi");
  }
  if (seq.group().kind() != shift.group().kind()) {
    throw std::invalid_argument("cover instance: sequence and shift groups differ");
  }
  CoverInstance instance;
  instance.epsilon = epsilon;
  instance.n_lo = n_lo;
  instance.n_hi = n_hi;

  std::vector<std::vector<GroupElement>> domains;
  std::vector<GroupElement> full_domain;
  for (std::int64_t n = n_lo; n <= n_hi; ++n) {
    auto d = bowen_domain(shift.group(), seq.set(static_cast<int>(n)), epsilon);
    full_domain = sorted_union(std::move(full_domain), d);
    domains.push_back(std::move(d));
  }
  instance.universe = build_universe(shift, subset, full_domain, limits.universe_cap);

  for (std::size_t oi = 0; oi < domains.size(); ++oi) {
    const std::int64_t n = n_lo + static_cast<std::int64_t>(oi);
    const auto remaining =
        limits.candidate_cap - static_cast<std::int64_t>(instance.candidates.size());
    if (remaining <= 0) throw ResourceLimitError("cover instance: candidate cap exceeded");
    auto patterns = admissible_patterns(shift, domains[oi], Cylinder(), remaining);

    // Bucket targets by their trace on this order's domain; a ball covers
    // exactly the targets whose trace equals its own pattern.
    const auto positions = subset_positions(domains[oi], full_domain);
    std::map<std::vector<Symbol>, std::vector<std::int32_t>> buckets;
    std::vector<Symbol> key(positions.size());
    for (std::size_t t = 0; t < instance.universe.size(); ++t) {
      const auto& entries = instance.universe[t].entries();
      for (std::size_t j = 0; j < positions.size(); ++j) key[j] = entries[positions[j]].second;
      buckets[key].push_back(static_cast<std::int32_t>(t));
    }
    const std::int64_t card = seq.cardinality(static_cast<int>(n));
    for (auto& ball : patterns) {
      key.clear();
      for (const auto& cell : ball.entries()) key.push_back(cell.second);
      const auto it = buckets.find(key);
      if (it == buckets.end()) continue;  // covers nothing, never useful
      instance.candidates.push_back(CoverCandidate{std::move(ball), n, card});
      instance.coverage.push_back(it->second);
    }
  }
  return instance;
}

double candidate_weight(const CoverCandidate& candidate, double s) {
  return std::exp(-s * static_cast<double>(candidate.folner_cardinality));
}

CoverSolution solve_cover(const CoverInstance& instance, double s, CoverSolver solver,
                          const CoverLimits& limits) {
  if (!(s >= 0.0)) throw std::domain_error("cover: exponent s must be >= 0");
  return solver == CoverSolver::Greedy ? greedy_cover(instance, s)
                                       : exact_cover(instance, s, limits.node_cap);
}

CoverSolution caratheodory_cost(const Subshift& shift, const SubsetSpec& subset,
                                const FolnerSequence& seq, std::int64_t n_lo, std::int64_t n_hi,
                                double epsilon, double s, CoverSolver solver,
                                const CoverLimits& limits) {
  const auto instance = build_cover_instance(shift, subset, seq, n_lo, n_hi, epsilon, limits);
  return solve_cover(instance, s, solver, limits);
}

EntropyEstimate bowen_entropy_estimate(const Subshift& shift, const SubsetSpec& subset,
                                       const FolnerSequence& seq, double epsilon,
                                       std::int64_t n_lo, std::int64_t n_hi, CoverSolver solver,
                                       const CoverLimits& limits, double s_tolerance) {
  if (!(s_tolerance > 0.0)) throw std::domain_error("entropy estimate: tolerance must be > 0");
  EntropyEstimate est;
  est.epsilon = epsilon;
  est.n_lo = n_lo;
  est.n_hi = n_hi;
  est.method = solver == CoverSolver::Greedy ? "cover-bisection-greedy" : "cover-bisection-exact";
  const auto instance = build_cover_instance(shift, subset, seq, n_lo, n_hi, epsilon, limits);
  const auto cost_at = [&](double s) {
    const double cost = solve_cover(instance, s, solver, limits).total_cost;
    est.cost_trace.emplace_back(s, cost);
    return cost;
  };
  double lo = 0.0;
  if (cost_at(lo) <= 1.0) {
    est.value = 0.0;
    return est;
  }
  double hi = std::log(static_cast<double>(shift.alphabet_size())) + 1.0;
  while (cost_at(hi) > 1.0) {
    if (hi > 1024.0) throw std::logic_error("entropy estimate: crossing not bracketed");
    lo = hi;
    hi *= 2.0;
    est.bracket_extended = true;
  }
  while (hi - lo > s_tolerance) {
    const double mid = 0.5 * (lo + hi);
    (cost_at(mid) > 1.0 ? lo : hi) = mid;
  }
  est.value = 0.5 * (lo + hi);
  return est;
}

EntropyEstimate topological_entropy_estimate(const Subshift& shift, const FolnerSequence& seq,
                                             std::int64_t n, double epsilon) {
  if (n < 1 || n > std::numeric_limits<int>::max()) {
    throw std::invalid_argument("entropy estimate: n must be >= 1");
  }
  if (seq.group().kind() != shift.group().kind()) {
    throw std::invalid_argument("entropy estimate: sequence and shift groups differ");
  }
  const auto domain = bowen_domain(shift.group(), seq.set(static_cast<int>(n)), epsilon);
  EntropyEstimate est;
  est.epsilon = epsilon;
  est.n_lo = n;
  est.n_hi = n;
  est.method = "pattern-count";
  est.value =
      log_pattern_count(shift, domain) / static_cast<double>(seq.cardinality(static_cast<int>(n)));
  return est;
}

SeparatedSet separated_set_max(const std::vector<Configuration>& points,
                               const std::vector<GroupElement>& folner_set, double epsilon,
                               SeparationMode mode, std::size_t exact_cap) {
  SeparatedSet out;
  if (points.empty()) return out;
  const auto& group = points.front().group();
  for (const auto& x : points) {
    if (x.group().kind() != group.kind()) {
      throw std::invalid_argument("separated set: points live over different groups");
    }
  }
  const auto domain = bowen_domain(group, folner_set, epsilon);
  std::vector<Cylinder> traces;
  traces.reserve(points.size());
  for (const auto& x : points) traces.push_back(Cylinder::restriction_of(x, domain));

  if (mode == SeparationMode::Greedy) {
    for (std::size_t i = 0; i < traces.size(); ++i) {
      bool fresh = true;
      for (const std::size_t j : out.indices) {
        if (traces[j] == traces[i]) {
          fresh = false;
          break;
        }
      }
      if (fresh) out.indices.push_back(i);
    }
    out.cardinality = out.indices.size();
    return out;
  }

  if (exact_cap > 63) {
    throw std::invalid_argument("separated set: exact cap must be at most 63");
  }
  const std::size_t n = points.size();
  if (n > exact_cap) {
    throw ResourceLimitError("separated set: too many points for exact mode");
  }
  // Maximum independent set in the "agrees on the resolved domain" graph,
  // include-first branch and bound.
  std::vector<std::uint64_t> close_mask(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (traces[i] == traces[j]) {
        close_mask[i] |= std::uint64_t{1} << j;
        close_mask[j] |= std::uint64_t{1} << i;
      }
    }
  }
  std::vector<std::size_t> current, best;
  std::uint64_t chosen_mask = 0;
  const std::function<void(std::size_t)> search = [&](std::size_t idx) {
    if (current.size() + (n - idx) <= best.size()) return;
    if (idx == n) {
      best = current;
      return;
    }
    if ((close_mask[idx] & chosen_mask) == 0) {
      current.push_back(idx);
      chosen_mask |= std::uint64_t{1} << idx;
      search(idx + 1);
      chosen_mask &= ~(std::uint64_t{1} << idx);
      current.pop_back();
    }
    search(idx + 1);
  };
  search(0);
  out.indices = best;
  out.cardinality = best.size();
  return out;
}

}  // namespace shiftlab
