#include <catch2/catch_amalgamated.hpp>

#include "sumrec/dynamics.hpp"
#include "sumrec/prng.hpp"
#include "sumrec/search.hpp"
#include "sumrec/window_set.hpp"

using namespace sumrec;

namespace {

using i64 = std::int64_t;

PointSet mask_of(i64 n, std::vector<i64> points) {
  PointSet e(static_cast<std::size_t>(n), 0);
  for (i64 p : points) e.at(static_cast<std::size_t>(p)) = 1;
  return e;
}

PointSet full_mask(i64 n) { return PointSet(static_cast<std::size_t>(n), 1); }

FiniteMPS random_permutation_system(SplitMix64& rng, i64 n) {
  std::vector<i64> perm(static_cast<std::size_t>(n));
  for (i64 i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
  for (i64 i = n - 1; i > 0; --i)
    std::swap(perm[static_cast<std::size_t>(i)],
              perm[static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(i) + 1))]);
  return FiniteMPS(std::vector<Rational>(static_cast<std::size_t>(n), Rational(1, n)), perm);
}

}  // namespace

TEST_CASE("finite system construction validates invariants") {
  CHECK_NOTHROW(FiniteMPS::cyclic(6));
  // weights must sum to one
  CHECK_THROWS_AS(FiniteMPS({Rational(1, 2), Rational(1, 3)}, {1, 0}), std::invalid_argument);
  // bijection required
  CHECK_THROWS_AS(FiniteMPS({Rational(1, 2), Rational(1, 2)}, {0, 0}), std::invalid_argument);
  // measure preservation required
  CHECK_THROWS_AS(FiniteMPS({Rational(2, 3), Rational(1, 3)}, {1, 0}), std::invalid_argument);
  CHECK_NOTHROW(FiniteMPS({Rational(2, 3), Rational(1, 3)}, {0, 1}));
}

TEST_CASE("intersection_measure on the six-point rotation") {
  const FiniteMPS z6 = FiniteMPS::cyclic(6);
  const PointSet e = mask_of(6, {0});
  CHECK(intersection_measure(z6, e, {6}, 2) == std::vector<Rational>{Rational(1, 6)});
  CHECK(intersection_measure(z6, e, {2}, 1) == std::vector<Rational>{Rational(0)});
  CHECK(intersection_measure(z6, full_mask(6), {1, 2, 5}, 3) ==
        std::vector<Rational>{Rational(1), Rational(1), Rational(1)});
}

TEST_CASE("staged_recurrence_times on a full set picks the least admissible terms") {
  const FiniteMPS z4 = FiniteMPS::cyclic(4);
  const StagedRecurrence r = staged_recurrence_times(z4, full_mask(4), WindowSet::full(100), 2, 3);
  REQUIRE(r.completed);
  CHECK(r.terms == std::vector<i64>{1, 3, 7});  // each beyond k times the previous
  CHECK(r.final_measure == Rational(1));
  for (const PointSet& st : r.stages) CHECK(st == full_mask(4));
}

TEST_CASE("staged_recurrence_times on the twelve-point rotation with identity returns") {
  const FiniteMPS z12 = FiniteMPS::cyclic(12);
  const PointSet e = mask_of(12, {0, 1, 2, 3, 4, 5});
  const WindowSet s = WindowSet::from_predicate(100, [](i64 i) { return i % 12 == 0; });
  const StagedRecurrence r = staged_recurrence_times(z12, e, s, 3, 2);
  REQUIRE(r.completed);
  CHECK(r.terms == std::vector<i64>{12, 48});  // 48 is the least multiple beyond 3*12
  CHECK(r.stages.back() == e);
  CHECK(r.final_measure == Rational(1, 2));
}

TEST_CASE("staged_recurrence_times reports an unextendable start") {
  const FiniteMPS z2 = FiniteMPS::cyclic(2);
  const WindowSet odds = WindowSet::from_predicate(9, [](i64 i) { return i % 2 == 1; });
  const StagedRecurrence r = staged_recurrence_times(z2, mask_of(2, {0}), odds, 1, 1);
  CHECK_FALSE(r.completed);
  CHECK(r.terms.empty());
  CHECK_THROWS_AS(staged_recurrence_times(z2, mask_of(2, {}), odds, 1, 1), std::invalid_argument);
}

TEST_CASE("staged_recurrence_times staged sets always match the sum-family meet") {
  SplitMix64 rng(67);
  for (int it = 0; it < 30; ++it) {
    const i64 n = 4 + static_cast<i64>(rng.below(8));
    const FiniteMPS sys = random_permutation_system(rng, n);
    PointSet e(static_cast<std::size_t>(n), 0);
    for (i64 x = 0; x < n; ++x) e[static_cast<std::size_t>(x)] = rng.chance(2, 3);
    if (sys.measure(e) == Rational(0)) continue;
    const StagedRecurrence r = staged_recurrence_times(sys, e, WindowSet::full(40), 2, 2);
    if (!r.completed) continue;
    CHECK(r.final_measure > Rational(0));
    CHECK(r.final_measure == sys.measure(r.stages.back()));
    CHECK(r.terms[1] > 2 * r.terms[0]);
  }
}

TEST_CASE("top_recurrence_witness on periodic words") {
  const ShiftContext two = ShiftContext::periodic(BinaryWord::from_string("10"), 2);
  const Cylinder head_one{{{0, true}}};
  CHECK(top_recurrence_witness(two, head_one, WindowSet::from_members(10, {2}), 5) == 2);

  const ShiftContext three = ShiftContext::periodic(BinaryWord::from_string("100"), 3);
  CHECK(top_recurrence_witness(three, head_one, WindowSet::from_members(10, {1, 2}), 1) ==
        std::nullopt);

  const Cylinder whole{};
  CHECK(top_recurrence_witness(three, whole, WindowSet::from_members(10, {5, 7}), 2) == 5);

  const ShiftContext loose = ShiftContext::aperiodic(BinaryWord::from_string("10"));
  CHECK_THROWS_AS(top_recurrence_witness(loose, head_one, WindowSet::full(5), 1),
                  std::invalid_argument);
}

TEST_CASE("shift context validates the declared period") {
  CHECK_THROWS_AS(ShiftContext::periodic(BinaryWord::from_string("1011"), 2),
                  std::invalid_argument);
  CHECK_THROWS_AS(ShiftContext::periodic(BinaryWord::from_string("1"), 2), std::invalid_argument);
  const ShiftContext ok = ShiftContext::periodic(BinaryWord::from_string("1010"), 2);
  CHECK(ok.bit(7) == false);
  CHECK(ok.bit(100) == true);
}

TEST_CASE("ball_agreement_length") {
  CHECK(ball_agreement_length(Rational(1, 4)) == 2);
  CHECK(ball_agreement_length(Rational(1, 2)) == 1);
  CHECK(ball_agreement_length(Rational(3, 8)) == 2);
  CHECK(ball_agreement_length(Rational(1)) == 0);
  CHECK(ball_agreement_length(Rational(5)) == 0);
  CHECK_THROWS_AS(ball_agreement_length(Rational(0)), std::invalid_argument);
}

TEST_CASE("metric_d basics") {
  const BinaryWord a = BinaryWord::from_string("10");
  const BinaryWord b = BinaryWord::from_string("01");
  const MetricInterval d = metric_d(a, b);
  CHECK(d.lo == Rational(3, 4));
  CHECK(d.hi == Rational(1));

  const MetricInterval same = metric_d(a, a);
  CHECK(same.lo == Rational(0));
  CHECK(same.hi == Rational(1, 4));

  CHECK_THROWS_AS(metric_d(a, BinaryWord::from_string("011")), std::invalid_argument);
}

TEST_CASE("metric_d is symmetric and satisfies the triangle bound") {
  SplitMix64 rng(71);
  for (int it = 0; it < 200; ++it) {
    const i64 len = 1 + static_cast<i64>(rng.below(20));
    BinaryWord w[3] = {BinaryWord(len), BinaryWord(len), BinaryWord(len)};
    for (auto& word : w)
      for (i64 i = 1; i <= len; ++i) word.set(i, rng.chance(1, 2));
    const MetricInterval ab = metric_d(w[0], w[1]);
    const MetricInterval ba = metric_d(w[1], w[0]);
    CHECK(ab.lo == ba.lo);
    CHECK(ab.hi == ba.hi);
    const MetricInterval ac = metric_d(w[0], w[2]);
    const MetricInterval cb = metric_d(w[2], w[1]);
    CHECK(ab.lo <= ac.hi + cb.hi);  // true distances satisfy the triangle inequality
  }
}

TEST_CASE("rotation metric is exact on the periodic orbit") {
  const ShiftContext ctx = ShiftContext::periodic(BinaryWord::from_string("10"), 2);
  CHECK(rotation_metric(ctx, 0, 0) == Rational(0));
  CHECK(rotation_metric(ctx, 0, 1) == Rational(1));  // alternating words disagree everywhere

  const ShiftContext four = ShiftContext::periodic(BinaryWord::from_string("1000"), 4);
  CHECK(rotation_metric(four, 0, 1) == Rational(9, 15));
  CHECK(orbit_ball_phases(four, 0, Rational(1, 4)) == std::vector<i64>{0});
}

TEST_CASE("nested_ball_step follows the recurrence scale") {
  const ShiftContext two = ShiftContext::periodic(BinaryWord::from_string("10"), 2);
  const auto step = nested_ball_step(two, 0, Rational(1, 4), WindowSet::from_members(10, {2}), 1, 0);
  REQUIRE(step.has_value());
  CHECK(step->b == 2);  // the period always works
  CHECK(step->phases == std::vector<i64>{0});

  const ShiftContext four = ShiftContext::periodic(BinaryWord::from_string("1000"), 4);
  CHECK(nested_ball_step(four, 0, Rational(1, 4), WindowSet::from_members(10, {2}), 1, 0) ==
        std::nullopt);

  // whole-space ball: any b beyond the floor works
  const auto wide = nested_ball_step(four, 0, Rational(2), WindowSet::from_members(10, {3, 5}), 2, 3);
  REQUIRE(wide.has_value());
  CHECK(wide->b == 5);
  CHECK(wide->phases.size() == 4);

  // iterating: survivors of one level feed the next
  const auto next = nested_set_step(two, step->phases, WindowSet::from_members(20, {4, 6}), 1, 2);
  REQUIRE(next.has_value());
  CHECK(next->b == 4);
}

TEST_CASE("positive intersection measure matches windowed witnesses on rotations") {
  SplitMix64 rng(73);
  for (int it = 0; it < 25; ++it) {
    const i64 n = 3 + static_cast<i64>(rng.below(10));
    const FiniteMPS sys = FiniteMPS::cyclic(n);
    PointSet e(static_cast<std::size_t>(n), 0);
    for (i64 x = 0; x < n; ++x) e[static_cast<std::size_t>(x)] = rng.chance(1, 2);
    const i64 shift = 1 + static_cast<i64>(rng.below(static_cast<std::uint64_t>(2 * n)));
    const i64 k = 1 + static_cast<i64>(rng.below(3));
    const bool positive = intersection_measure(sys, e, {shift}, k)[0] > Rational(0);

    const i64 horizon = n * (k + 3) * 2;
    const WindowSet a = WindowSet::from_predicate(
        horizon, [&](i64 i) { return e[static_cast<std::size_t>(i % n)] != 0; });
    const WindowSet s = WindowSet::from_members(horizon, {shift});
    CHECK(positive == k_intersective_witness(a, s, k).has_value());
  }
}
