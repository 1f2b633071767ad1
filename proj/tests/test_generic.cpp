#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "doctest.h"
#include "shiftlab/errors.hpp"
#include "shiftlab/folner.hpp"
#include "shiftlab/generic.hpp"
#include "shiftlab/group.hpp"
#include "shiftlab/measure.hpp"
#include "shiftlab/shift.hpp"

using namespace shiftlab;

namespace {

GroupElement ze(std::int64_t m) { return GroupElement{{m, 0, 0}, GroupKind::Z}; }

std::vector<GroupElement> z_range(std::int64_t lo, std::int64_t hi) {
  std::vector<GroupElement> out;
  for (std::int64_t m = lo; m <= hi; ++m) out.push_back(ze(m));
  return out;
}

Subshift full_2_shift() { return Subshift(AmenableGroup(GroupKind::Z), 2); }

Subshift golden_mean() {
  return Subshift(AmenableGroup(GroupKind::Z), 2,
                  {Cylinder({{ze(0), 1}, {ze(1), 1}})});
}

Configuration alternating_01() { return periodic_configuration(full_2_shift(), {2}, {0, 1}); }

Configuration constant_zero() { return periodic_configuration(full_2_shift(), {1}, {0}); }

InvariantMeasure bern(std::vector<double> p) {
  return InvariantMeasure::bernoulli(AmenableGroup(GroupKind::Z), std::move(p));
}

constexpr double kEntropy03 = 0.6108643020548935;
constexpr double kMarkovEntropyRate = 0.38642700791953105;
constexpr double kClaimRate2000 = 0.6248294700520574;

}  // namespace

TEST_SUITE_BEGIN("generic");

TEST_CASE("empirical measures count test cylinders") {
  const auto x = alternating_01();
  const EmpiricalMeasure em(x, z_range(0, 9), 2);
  CHECK(em.window_size() == 10);
  CHECK(em.depth() == 2);

  CHECK(em.count(Cylinder({{ze(0), 0}})) == 5);
  CHECK(em.count(Cylinder({{ze(0), 1}})) == 5);
  CHECK(em.frequency(Cylinder({{ze(0), 0}})) == 0.5);
  // g even sees (0,1) on the prefix {0,1}, g odd sees (1,0)
  CHECK(em.count(Cylinder({{ze(0), 0}, {ze(1), 1}})) == 5);
  CHECK(em.count(Cylinder({{ze(0), 1}, {ze(1), 0}})) == 5);
  CHECK(em.count(Cylinder({{ze(0), 0}, {ze(1), 0}})) == 0);
  CHECK(em.count(Cylinder()) == 10);
  CHECK(em.count(Cylinder({{ze(0), 300}})) == 0);

  // -1 is the third enumerated element, outside a depth-2 prefix
  CHECK_THROWS_AS(em.count(Cylinder({{ze(-1), 0}})), std::invalid_argument);

  CHECK_THROWS_AS(EmpiricalMeasure(x, z_range(0, 9), 0), std::invalid_argument);
  CHECK_THROWS_AS(EmpiricalMeasure(x, {}, 1), std::invalid_argument);
  CHECK_THROWS_AS(EmpiricalMeasure(x, z_range(0, 9), 7), UnimplementedError);

  const auto em1 = empirical_measure(x, z_range(0, 4), 1);
  CHECK(em1.count(Cylinder({{ze(0), 0}})) == 3);
  CHECK(em1.frequency(Cylinder({{ze(0), 0}})) == 0.6);
}

TEST_CASE("weak-star distance takes the worst test deviation") {
  const auto mu = bern({0.5, 0.5});
  const auto x = alternating_01();

  CHECK(weak_star_distance(EmpiricalMeasure(x, z_range(0, 9), 1), mu) == 0.0);
  // the pair (0,1) appears with frequency 1/2 against mass 1/4
  CHECK(weak_star_distance(EmpiricalMeasure(x, z_range(0, 9), 2), mu) == 0.25);

  const auto x0 = constant_zero();
  CHECK(weak_star_distance(EmpiricalMeasure(x0, z_range(0, 9), 1), mu) == 0.5);
  CHECK(weak_star_distance(EmpiricalMeasure(x0, z_range(0, 9), 2), mu) == 0.75);

  // unobserved cylinders deviate by their full mass
  const auto skew = bern({0.9, 0.1});
  const double d = weak_star_distance(EmpiricalMeasure(x0, z_range(0, 9), 1), skew);
  CHECK(d == doctest::Approx(0.1).epsilon(1e-12));

  AmenableGroup h3(GroupKind::Heisenberg);
  const auto mu_h = InvariantMeasure::bernoulli(h3, {0.5, 0.5});
  const auto xh = mu_h.sample_configuration(99);
  const auto fh = FolnerSequence(h3).set(3);
  const double dh = weak_star_distance(EmpiricalMeasure(xh, fh, 2), mu_h);
  CHECK(dh >= 0.0);
  CHECK(dh <= 1.0);

  CHECK_THROWS_AS(weak_star_distance(EmpiricalMeasure(x, z_range(0, 9), 1), mu_h),
                  std::invalid_argument);

  // eleven symbol marks at depth six overflow the test family cap
  std::vector<double> p10(10, 0.1);
  const auto mu10 = bern(p10);
  const auto x10 = mu10.sample_configuration(7);
  CHECK_THROWS_AS(weak_star_distance(EmpiricalMeasure(x10, z_range(0, 9), 6), mu10),
                  ResourceLimitError);
}

TEST_CASE("neighborhood membership respects tolerance and nesting") {
  const auto std1 = NeighborhoodSpec::standard(1);
  CHECK(std1.m == 1);
  CHECK(std1.depth == 1);
  CHECK(std1.tolerance() == 1.0);
  CHECK(NeighborhoodSpec::standard(3).depth == 3);
  CHECK(NeighborhoodSpec::standard(3).tolerance() == doctest::Approx(1.0 / 3.0));
  CHECK(NeighborhoodSpec::standard(9).depth == 4);
  CHECK_THROWS_AS(NeighborhoodSpec::standard(0), std::invalid_argument);

  const auto mu = bern({0.5, 0.5});
  const auto x = alternating_01();
  const auto window = z_range(0, 9);

  // the depth-2 distance is exactly 1/4; membership is inclusive
  NeighborhoodSpec edge;
  edge.m = 1;
  edge.depth = 2;
  edge.tolerance_override = 0.25;
  CHECK(in_neighborhood(x, mu, window, edge));
  edge.tolerance_override = 0.249;
  CHECK_FALSE(in_neighborhood(x, mu, window, edge));
  edge.tolerance_override = 0.0;
  CHECK_THROWS_AS(in_neighborhood(x, mu, window, edge), std::invalid_argument);

  // nesting: membership at m+1 implies membership at m
  const auto mu3 = bern({0.3, 0.7});
  const auto y = mu3.sample_configuration(42);
  const auto big = z_range(0, 499);
  bool prev = in_neighborhood(y, mu3, big, NeighborhoodSpec::standard(1));
  CHECK(prev);
  for (int m = 2; m <= 5; ++m) {
    const bool cur = in_neighborhood(y, mu3, big, NeighborhoodSpec::standard(m));
    if (cur) CHECK(prev);
    prev = cur;
  }

  const auto x0 = constant_zero();
  CHECK(in_neighborhood(x0, mu, window, NeighborhoodSpec::standard(1)));
  CHECK_FALSE(in_neighborhood(x0, mu, window, NeighborhoodSpec::standard(2)));
}

TEST_CASE("typical word counts match the binomial law") {
  const auto shift = full_2_shift();

  NeighborhoodSpec vac;
  vac.m = 1;
  vac.depth = 1;
  const auto all = count_typical_words(shift, bern({0.5, 0.5}), 10, vac);
  CHECK(all.count == 1024);
  CHECK(all.rate == doctest::Approx(std::log(2.0)).epsilon(1e-14));

  NeighborhoodSpec tenth;
  tenth.m = 1;
  tenth.depth = 1;
  tenth.tolerance_override = 0.1;
  const auto mid = count_typical_words(shift, bern({0.5, 0.5}), 10, tenth);
  CHECK(mid.count == 672);  // C(10,4)+C(10,5)+C(10,6)

  // exhaustive word check against the type-class sum
  const auto mu3 = bern({0.3, 0.7});
  const auto brute_side = count_typical_words(shift, mu3, 12, tenth);
  BigInt brute = 0;
  for (std::uint32_t w = 0; w < (1u << 12); ++w) {
    const int ones = std::popcount(w);
    const double f0 = (12.0 - ones) / 12.0;
    const double f1 = ones / 12.0;
    if (std::abs(f0 - 0.3) <= 0.1 && std::abs(f1 - 0.7) <= 0.1) ++brute;
  }
  CHECK(brute_side.count == brute);

  NeighborhoodSpec claim;
  claim.m = 1;
  claim.depth = 1;
  claim.tolerance_override = 0.02;
  const auto big = count_typical_words(shift, mu3, 2000, claim);
  CHECK(big.rate == doctest::Approx(kClaimRate2000).epsilon(1e-12));
  CHECK(std::abs(big.rate - kEntropy03) < 0.05);

  // no frequency hits 1/3 on ten letters
  NeighborhoodSpec sharp;
  sharp.m = 1;
  sharp.depth = 1;
  sharp.tolerance_override = 1e-6;
  const auto none = count_typical_words(shift, bern({1.0 / 3.0, 2.0 / 3.0}), 10, sharp);
  CHECK(none.count == 0);
  CHECK(none.rate == -std::numeric_limits<double>::infinity());

  CHECK_THROWS_AS(count_typical_words(shift, bern({0.5, 0.5}), 0, vac), std::invalid_argument);
  CHECK_THROWS_AS(count_typical_words(shift, bern({0.2, 0.3, 0.5}), 10, vac),
                  std::invalid_argument);
  const auto mu_z2 = InvariantMeasure::bernoulli(AmenableGroup(GroupKind::Z2), {0.5, 0.5});
  const Subshift shift_z2(AmenableGroup(GroupKind::Z2), 2);
  CHECK_THROWS_AS(count_typical_words(shift_z2, mu_z2, 10, vac), UnimplementedError);
  const auto markov = InvariantMeasure::markov({{0.9, 0.1}, {0.5, 0.5}});
  CHECK_THROWS_AS(count_typical_words(shift, markov, 10, vac), UnimplementedError);
}

TEST_CASE("typical word enumeration resolves finer scales") {
  NeighborhoodSpec vac;
  vac.m = 1;
  vac.depth = 1;

  // non-full shift forces enumeration; vacuous tolerance counts all words
  const auto fib = count_typical_words(golden_mean(), bern({0.5, 0.5}), 6, vac);
  CHECK(fib.count == 21);
  CHECK(fib.rate == doctest::Approx(std::log(21.0) / 6.0).epsilon(1e-12));

  // finer scale resolves one extra coordinate: 2^7 traces instead of 2^6
  const auto shift = full_2_shift();
  const auto mu = bern({0.5, 0.5});
  const auto coarse = count_typical_words(shift, mu, 6, vac, 0.5);
  const auto fine = count_typical_words(shift, mu, 6, vac, 0.25);
  CHECK(coarse.count == 64);
  CHECK(fine.count == 128);

  // depth-2 test family over the scale-1/2 traces
  NeighborhoodSpec deep;
  deep.m = 1;
  deep.depth = 2;
  const auto d2 = count_typical_words(shift, mu, 6, deep, 0.5);
  CHECK(d2.count == 64);

  // scales above 1/2 resolve nothing, so the count collapses to 0 or 1
  const auto one = count_typical_words(shift, mu, 4, vac, 0.6);
  CHECK(one.count == 1);
  CHECK(one.rate == 0.0);
  NeighborhoodSpec sharp;
  sharp.m = 1;
  sharp.depth = 1;
  sharp.tolerance_override = 1e-6;
  const auto zero = count_typical_words(shift, bern({1.0 / 3.0, 2.0 / 3.0}), 4, sharp, 0.6);
  CHECK(zero.count == 0);

  CHECK_THROWS_AS(count_typical_words(golden_mean(), bern({0.5, 0.5}), 25, vac),
                  UnimplementedError);
  std::vector<double> p8(8, 0.125);
  const Subshift s8(AmenableGroup(GroupKind::Z), 8);
  const Subshift s8f(AmenableGroup(GroupKind::Z), 8, {Cylinder({{ze(0), 0}, {ze(1), 0}})});
  CHECK_THROWS_AS(count_typical_words(s8f, bern(p8), 9, vac), UnimplementedError);
  NeighborhoodSpec deep6;
  deep6.m = 1;
  deep6.depth = 6;
  CHECK_THROWS_AS(count_typical_words(s8f, bern(p8), 2, deep6), UnimplementedError);
}

TEST_CASE("pointwise entropy values hit the closed forms") {
  AmenableGroup z(GroupKind::Z);
  const auto half = bern({0.5, 0.5});
  const auto zero_part = Partition::zero_coordinate(z, 2);
  const auto window = z_range(0, 9);

  const auto x = alternating_01();
  CHECK(smb_value(x, half, zero_part, window) == -std::log(0.5));

  // explicit singleton atoms take the general path to the same number
  const auto atoms_part =
      Partition::from_atoms({Cylinder({{ze(0), 0}}), Cylinder({{ze(0), 1}})});
  CHECK(smb_value(x, half, atoms_part, window) == smb_value(x, half, zero_part, window));

  // pair partition joins to 7 coordinates over a 6-element window
  const auto pair_part = Partition::from_atoms(
      {Cylinder({{ze(0), 0}, {ze(1), 0}}), Cylinder({{ze(0), 0}, {ze(1), 1}}),
       Cylinder({{ze(0), 1}, {ze(1), 0}}), Cylinder({{ze(0), 1}, {ze(1), 1}})});
  CHECK(smb_value(x, half, pair_part, z_range(0, 5)) ==
        doctest::Approx(7.0 * std::log(2.0) / 6.0).epsilon(1e-12));

  const auto x0 = constant_zero();
  CHECK(smb_value(x0, bern({0.3, 0.7}), zero_part, window) ==
        doctest::Approx(1.2039728043259361).epsilon(1e-12));

  const auto markov = InvariantMeasure::markov({{0.9, 0.1}, {0.5, 0.5}});
  CHECK(smb_value(x0, markov, zero_part, window) ==
        doctest::Approx(-(std::log(5.0 / 6.0) + 9.0 * std::log(0.9)) / 10.0).epsilon(1e-12));

  // an unobservable symbol has zero mass, so the information blows up
  const auto x1 = periodic_configuration(full_2_shift(), {1}, {1});
  const double inf_v = smb_value(x1, bern({1.0, 0.0}), zero_part, window);
  CHECK(std::isinf(inf_v));
  CHECK(inf_v > 0.0);

  // scale 1/2 balls are exactly the window atoms
  const auto mu3 = bern({0.3, 0.7});
  const auto y = mu3.sample_configuration(11);
  CHECK(brin_katok_value(y, mu3, 0.5, window) == smb_value(y, mu3, zero_part, window));

  // scale 1/4 resolves one extra coordinate
  CHECK(brin_katok_value(y, half, 0.25, window) ==
        doctest::Approx(11.0 * std::log(2.0) / 10.0).epsilon(1e-12));

  // scales above 1/2 resolve nothing
  CHECK(brin_katok_value(y, mu3, 0.6, window) == 0.0);

  const auto y2k = mu3.sample_configuration(2026);
  CHECK(std::abs(brin_katok_value(y2k, mu3, 0.5, z_range(0, 1999)) - kEntropy03) < 0.05);

  CHECK_THROWS_AS(smb_value(x, half, zero_part, {}), std::invalid_argument);
  CHECK_THROWS_AS(brin_katok_value(x, half, 0.5, {}), std::invalid_argument);
  const auto mu_z2 = InvariantMeasure::bernoulli(AmenableGroup(GroupKind::Z2), {0.5, 0.5});
  CHECK_THROWS_AS(smb_value(x, mu_z2, zero_part, window), std::invalid_argument);
  CHECK_THROWS_AS(brin_katok_value(x, mu_z2, 0.5, window), std::invalid_argument);
}

TEST_CASE("entropy trajectories track the sampled points") {
  const auto traj = make_trajectory({1, 2, 4, 8}, {1.0, 2.0, 3.0, 5.0});
  CHECK(traj.window == 2);
  CHECK(traj.final_value == 5.0);
  CHECK(traj.running_mean == doctest::Approx(2.75));
  CHECK(traj.last_window_oscillation == 2.0);

  const auto single = make_trajectory({7}, {1.5});
  CHECK(single.window == 1);
  CHECK(single.final_value == 1.5);
  CHECK(single.running_mean == 1.5);
  CHECK(single.last_window_oscillation == 0.0);

  CHECK_THROWS_AS(make_trajectory({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(make_trajectory({1, 2}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(make_trajectory({2, 2}, {1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(make_trajectory({3, 1}, {1.0, 1.0}), std::invalid_argument);

  AmenableGroup z(GroupKind::Z);
  const FolnerSequence seq(z);
  const auto zero_part = Partition::zero_coordinate(z, 2);

  // equal-probability coordinates give the constant value ln 2
  const auto half = bern({0.5, 0.5});
  const auto x = half.sample_configuration(5);
  const auto smb_t = smb_trajectory(x, half, zero_part, seq, {10, 20, 40, 80});
  CHECK(smb_t.orders == std::vector<std::int64_t>{10, 20, 40, 80});
  CHECK(smb_t.final_value == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(smb_t.last_window_oscillation <= 1e-12);

  // scale 1/2 ball trajectories reproduce the window-atom values
  const auto bk_t = brin_katok_trajectory(x, half, 0.5, seq, {10, 20, 40, 80});
  for (std::size_t i = 0; i < bk_t.values.size(); ++i) {
    CHECK(bk_t.values[i] == smb_t.values[i]);
  }

  // sampled Markov information concentrates on the entropy rate
  const auto markov = InvariantMeasure::markov({{0.9, 0.1}, {0.5, 0.5}});
  std::vector<double> vals;
  for (int s = 1; s <= 30; ++s) {
    const auto y = markov.sample_configuration(7700 + static_cast<std::uint64_t>(s));
    vals.push_back(smb_value(y, markov, zero_part, z_range(0, 999)));
  }
  double mean = 0.0;
  for (const double v : vals) mean += v;
  mean /= static_cast<double>(vals.size());
  double var = 0.0;
  for (const double v : vals) var += (v - mean) * (v - mean);
  var /= static_cast<double>(vals.size() - 1);
  const double sd = std::sqrt(var);
  CHECK(std::abs(mean - kMarkovEntropyRate) <=
        3.0 * sd / std::sqrt(static_cast<double>(vals.size())));
}

TEST_CASE("hamming ball counts stay under the growth bound") {
  const auto r2 = stirling_bound(10, 0.2, 2);
  CHECK(r2.exact_count == 56);  // C(10,0)+C(10,1)+C(10,2)
  CHECK(r2.growth_exponent == doctest::Approx(0.7004024235381878).epsilon(1e-12));
  CHECK(r2.bound == doctest::Approx(std::exp(10.0 * r2.growth_exponent)).epsilon(1e-12));
  CHECK(r2.holds);

  const auto r3 = stirling_bound(10, 0.2, 3);
  CHECK(r3.exact_count == 201);
  CHECK(r3.holds);

  for (const std::int64_t n : {std::int64_t{10}, std::int64_t{100}, std::int64_t{1000}}) {
    for (const double q : {0.05, 0.1, 0.2}) {
      for (const int a : {2, 3}) {
        CAPTURE(n);
        CAPTURE(q);
        CAPTURE(a);
        CHECK(stirling_bound(n, q, a).holds);
      }
    }
  }

  // the n=1000, a=3, q=0.2 bound overflows a double and falls back to logs
  const auto huge = stirling_bound(1000, 0.2, 3);
  CHECK(std::isinf(huge.bound));
  CHECK(huge.holds);

  CHECK_THROWS_AS(stirling_bound(0, 0.1, 2), std::invalid_argument);
  CHECK_THROWS_AS(stirling_bound(10, 0.0, 2), std::domain_error);
  CHECK_THROWS_AS(stirling_bound(10, 1.0, 2), std::domain_error);
  CHECK_THROWS_AS(stirling_bound(10, 0.1, 1), std::invalid_argument);
}

TEST_CASE("certificates witness finite-scale genericity") {
  AmenableGroup z(GroupKind::Z);
  const FolnerSequence seq(z);
  const auto half = bern({0.5, 0.5});

  // constant zero only survives the vacuous neighborhood
  const auto cert0 = generic_point_certificate(constant_zero(), half, seq, 3, {10, 100});
  CHECK(cert0.schedule == std::vector<int>{10, 100});
  CHECK(cert0.rows.size() == 3);
  CHECK(cert0.rows[0].m == 1);
  CHECK(cert0.rows[0].depth == 1);
  CHECK(cert0.rows[1].depth == 2);
  CHECK(cert0.rows[2].depth == 3);
  CHECK(cert0.rows[0].witnessed);
  CHECK(cert0.rows[0].threshold == 10);
  CHECK(cert0.rows[0].member == std::vector<bool>{true, true});
  CHECK_FALSE(cert0.rows[1].witnessed);
  CHECK(cert0.rows[1].threshold == 0);
  CHECK(cert0.rows[1].member == std::vector<bool>{false, false});
  CHECK_FALSE(cert0.rows[2].witnessed);

  // the alternating point passes m = 1, 2 and fails the depth-3 triple test
  const auto cert01 =
      generic_point_certificate(alternating_01(), half, seq, 4, {10, 100, 1000});
  CHECK(cert01.rows[0].witnessed);
  CHECK(cert01.rows[0].threshold == 10);
  CHECK(cert01.rows[1].witnessed);
  CHECK(cert01.rows[1].threshold == 10);
  CHECK_FALSE(cert01.rows[2].witnessed);
  CHECK_FALSE(cert01.rows[3].witnessed);

  // certificate rows match a direct distance recomputation
  const auto y = half.sample_configuration(314);
  const std::vector<int> schedule{25, 50, 100};
  const auto cert = generic_point_certificate(y, half, seq, 4, schedule);
  for (const auto& row : cert.rows) {
    std::size_t first = schedule.size();
    for (std::size_t i = 0; i < schedule.size(); ++i) {
      const EmpiricalMeasure em(y, seq.set(schedule[i]), row.depth);
      const bool expect = weak_star_distance(em, half) <= 1.0 / row.m;
      CHECK(row.member[i] == expect);
    }
    for (std::size_t i = schedule.size(); i-- > 0;) {
      if (!row.member[i]) break;
      first = i;
    }
    CHECK(row.witnessed == (first < schedule.size()));
    if (row.witnessed) CHECK(row.threshold == schedule[first]);
  }

  CHECK_THROWS_AS(generic_point_certificate(constant_zero(), half, seq, 0, {10}),
                  std::invalid_argument);
  CHECK_THROWS_AS(generic_point_certificate(constant_zero(), half, seq, 2, {}),
                  std::invalid_argument);
  CHECK_THROWS_AS(generic_point_certificate(constant_zero(), half, seq, 2, {10, 10}),
                  std::invalid_argument);
  CHECK_THROWS_AS(generic_point_certificate(constant_zero(), half, seq, 2, {0, 5}),
                  std::invalid_argument);
  const FolnerSequence seq2(AmenableGroup(GroupKind::Z2));
  CHECK_THROWS_AS(generic_point_certificate(constant_zero(), half, seq2, 2, {10}),
                  std::invalid_argument);
}

TEST_SUITE_END();
