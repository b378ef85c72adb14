#include <catch2/catch_amalgamated.hpp>

#include "sumrec/prng.hpp"
#include "sumrec/sparse.hpp"
#include "sumrec/window_set.hpp"

using namespace sumrec;

namespace {

using i64 = std::int64_t;

// Oracle: removal by direct definition scan over every gap t, independent of
// the pair walk in y_set.
WindowSet y_by_definition(const WindowSet& a, const SparseParams& p) {
  std::vector<i64> kept;
  a.for_each_member([&](i64 x) {
    bool removed = false;
    for (i64 t = p.M; x + t <= a.horizon() && !removed; ++t)
      if (x >= p.nt.eval(t) && a.contains(x + t)) removed = true;
    if (!removed) kept.push_back(x);
  });
  return WindowSet::from_members(a.horizon(), std::move(kept));
}

}  // namespace

TEST_CASE("stage lengths") {
  CHECK(stage_length(1) == 4);
  CHECK(stage_length(2) == 20);
  CHECK(stage_length(3) == 84);
  CHECK(stage_length(8) == 87380);
}

TEST_CASE("sparse_f examples") {
  CHECK(sparse_f(20) == WindowSet::from_members(20, {1, 4, 16, 20}));
  CHECK(sparse_f(1) == WindowSet::from_members(1, {1}));
  for (i64 k = 1; k <= 10; ++k)
    CHECK(sparse_f(stage_length(k)).size() == std::int64_t{1} << k);
}

TEST_CASE("stage words are the sparse-set prefixes") {
  CHECK(stage_word(1).str() == "1001");
  CHECK(stage_word(2).str() == "10010000000000010001");
  for (i64 k = 1; k <= 6; ++k) {
    CHECK(stage_word(k).length() == stage_length(k));
    CHECK(stage_word(k).ones_count() == std::int64_t{1} << k);
  }
  CHECK_THROWS_AS(stage_word(0), std::invalid_argument);
  CHECK_THROWS_AS(stage_word(13), std::invalid_argument);
}

TEST_CASE("fs_count formula matches enumeration") {
  CHECK(fs_count(84) == 7);
  CHECK(fs_count(4) == 1);
  CHECK(fs_count(20) == 3);
  CHECK(fs_count(16) == 2);

  CHECK_THROWS_AS(fs_count(3), std::invalid_argument);    // below the first generator
  CHECK_THROWS_AS(fs_count(8), std::invalid_argument);    // base-4 digit 2
  CHECK_THROWS_AS(fs_count(21), std::invalid_argument);   // unit digit
  CHECK_THROWS_AS(fs_count(32), std::invalid_argument);   // 200 in base 4

  // exhaustive: the count of any element is its rank in the enumeration
  const std::vector<i64> elements = gen_fs(powers_of_four(65536), stage_length(8)).members();
  REQUIRE(elements.size() == 255);
  for (std::size_t i = 0; i < elements.size(); ++i)
    CHECK(fs_count(elements[i]) == static_cast<i64>(i) + 1);
}

TEST_CASE("banach_bound_check at horizon 4^8") {
  const auto rows = banach_bound_check(65536, {1, 4, 64});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].bound == Rational(1));
  CHECK(rows[0].observed == Rational(1));
  CHECK(rows[0].ok);
  CHECK(rows[1].exponent == 1);
  CHECK(rows[1].bound == Rational(2, 4));
  CHECK(rows[1].observed == Rational(1, 4));  // half-open windows split gap-4 pairs
  CHECK(rows[2].exponent == 3);
  CHECK(rows[2].bound == Rational(8, 64));
  CHECK(rows[2].observed == Rational(4, 64));
  CHECK(rows[2].witness == 1);
  for (const auto& row : rows) CHECK(row.ok);

  const auto with_one = banach_bound_check(65536, {4}, true);
  CHECK(with_one[0].observed == Rational(2, 4));  // {1, 4} share a window
  CHECK(with_one[0].witness == 1);
  CHECK(with_one[0].ok);
}

TEST_CASE("threshold rules") {
  CHECK(NtRule::parse("t").eval(37) == 37);
  CHECK(NtRule::parse("const:100").eval(5) == 100);
  CHECK(NtRule::parse("linear:2,3").eval(10) == 23);
  CHECK(NtRule::parse("geom:5,2").eval(4) == 40);
  CHECK(NtRule::table(10, {7, 8, 9}).eval(11) == 8);
  CHECK(NtRule::table(10, {7, 8, 9}).eval(50) == 9);
  CHECK(NtRule::parse("t").max_over(17, 5460) == 5460);
  CHECK_THROWS_AS(NtRule::parse("nope"), std::invalid_argument);
  CHECK_THROWS_AS(NtRule::parse("geom:1"), std::invalid_argument);
}

TEST_CASE("sparse parameters derive the stage index") {
  CHECK(SparseParams(17, NtRule::linear(), 1024).ell() == 2);
  CHECK(SparseParams(2, NtRule::linear(), 1024).ell() == 1);
  CHECK(SparseParams(4, NtRule::linear(), 1024).ell() == 2);   // L_1 = 4 <= M
  CHECK(SparseParams(84, NtRule::linear(), 1024).ell() == 4);  // L_3 = 84 <= M
  for (i64 m : {1, 3, 19, 20, 21, 83, 85}) {
    const i64 ell = SparseParams(m, NtRule::linear(), 64).ell();
    CHECK(stage_length(ell - 1) <= m);
    CHECK(m < stage_length(ell));
  }
  CHECK_THROWS_AS(SparseParams(0, NtRule::linear(), 64), std::invalid_argument);
}

TEST_CASE("y_set examples") {
  const WindowSet f64 = sparse_f(64);
  const WindowSet y = y_set(f64, SparseParams(2, NtRule::constant(1), 64));
  CHECK(y == WindowSet::from_members(64, {64}));  // every earlier element sees a later one
  CHECK(y.count_in(1, 20) == 0);

  const SparseParams lazy(2, NtRule::constant(65), 64);
  CHECK(y_set(f64, lazy) == f64);  // thresholds beyond the horizon remove nothing

  CHECK_THROWS_AS(y_set(WindowSet::from_members(64, {2}), lazy), std::invalid_argument);
  CHECK_THROWS_AS(y_set(sparse_f(32), lazy), std::invalid_argument);
}

TEST_CASE("y_set agrees with the definition scan and is idempotent") {
  SplitMix64 rng(79);
  const i64 h = stage_length(6);
  const WindowSet f = sparse_f(h);
  for (int it = 0; it < 12; ++it) {
    // random subset of the host with random threshold rules
    std::vector<i64> members;
    f.for_each_member([&](i64 m) {
      if (rng.chance(4, 5)) members.push_back(m);
    });
    const WindowSet a = WindowSet::from_members(h, std::move(members));
    const NtRule rules[] = {NtRule::constant(1 + static_cast<i64>(rng.below(200))),
                            NtRule::linear(1 + static_cast<i64>(rng.below(3)),
                                           static_cast<i64>(rng.below(50))),
                            NtRule::geometric(1 + static_cast<i64>(rng.below(20)), 2)};
    const SparseParams p(2 + static_cast<i64>(rng.below(40)), rules[rng.below(3)], h);
    const WindowSet y = y_set(a, p);
    CHECK(y == y_by_definition(a, p));
    CHECK(y_set(y, p) == y);
    CHECK(pair_gap_census(y, p).pass);
  }
}

TEST_CASE("later thresholds keep more of the set") {
  const i64 h = stage_length(5);
  const WindowSet f = sparse_f(h);
  const WindowSet tight = y_set(f, SparseParams(17, NtRule::constant(50), h));
  const WindowSet loose = y_set(f, SparseParams(17, NtRule::constant(500), h));
  loose.for_each_member([&](i64 m) { CHECK((tight.contains(m) || m >= 50)); });
  tight.for_each_member([&](i64 m) { CHECK(loose.contains(m)); });
}

TEST_CASE("pair_gap_census outcomes") {
  const i64 h = 1024;
  const WindowSet f = sparse_f(h);
  const SparseParams eager(2, NtRule::constant(1), h);
  const PairGapCensus none = pair_gap_census(y_set(f, eager), eager);
  CHECK(none.rows.empty());
  CHECK(none.pass);

  const SparseParams mid(2, NtRule::constant(100), h);
  const PairGapCensus some = pair_gap_census(y_set(f, mid), mid);
  CHECK(some.pass);
  CHECK_FALSE(some.rows.empty());
  for (const GapCensusRow& row : some.rows) CHECK(row.gap >= mid.M);  // sub-M gaps stay out

  // wider M shrinks the census domain: gaps below the new M disappear
  const SparseParams wide(40, NtRule::constant(100), h);
  for (const GapCensusRow& row : pair_gap_census(y_set(f, wide), wide).rows)
    CHECK(row.gap >= 40);

  // a set that was not produced by y_set violates freely
  const PairGapCensus raw = pair_gap_census(f, eager);
  CHECK_FALSE(raw.pass);
  CHECK_FALSE(raw.violations.empty());
  CHECK(raw.violations.front().first >= eager.nt.eval(raw.violations.front().second -
                                                      raw.violations.front().first));
}

TEST_CASE("decay_report on the staged removal at horizon 4^8") {
  const i64 h = 65536;
  const SparseParams p(17, NtRule::linear(), h);
  const DecayReport rep = decay_report(sparse_f(h), p);
  REQUIRE(rep.rows.size() == 7);  // L_1 .. L_7 fit below 4^8
  CHECK(rep.ell == 2);
  const std::vector<Rational> expected{Rational(1),      Rational(1),      Rational(7, 8),
                                       Rational(10, 16), Rational(13, 32), Rational(16, 64),
                                       Rational(19, 128)};
  for (std::size_t i = 0; i < expected.size(); ++i) CHECK(rep.rows[i].ratio == expected[i]);

  REQUIRE(rep.bounds.size() == 2);  // N = 4 and N = 5 have stages inside the horizon
  CHECK(rep.bounds[0].exponent == 4);
  CHECK(rep.bounds[0].applicable);
  CHECK(rep.bounds[0].first_grid == stage_length(7));
  CHECK(rep.bounds[0].bound == Rational(8, 16));
  CHECK(rep.bounds[0].ok);
  CHECK(rep.bounds[0].copy_counts_ok);
  CHECK_FALSE(rep.bounds[1].applicable);  // the clean stage-7 copy would end past 4^8
  CHECK(rep.pass);
}

TEST_CASE("decay_report without removals keeps ratio one and no applicable bounds") {
  const i64 h = stage_length(6);
  const SparseParams p(17, NtRule::constant(kSparseHorizonCap + 1), h);
  const DecayReport rep = decay_report(sparse_f(h), p);
  for (const DecayRow& row : rep.rows) CHECK(row.ratio == Rational(1));
  for (const DecayBoundRow& b : rep.bounds) CHECK_FALSE(b.applicable);
  CHECK(rep.pass);
}

TEST_CASE("dropping the unit element shifts the decay curve by exactly one count") {
  const i64 h = stage_length(6);
  const SparseParams p(17, NtRule::linear(), h);
  const WindowSet f = sparse_f(h);
  WindowSet without = WindowSet::from_predicate(h, [&](i64 i) { return i != 1 && f.contains(i); });
  const DecayReport full = decay_report(f, p);
  const DecayReport dropped = decay_report(without, p);
  for (std::size_t i = 0; i < full.rows.size(); ++i) {
    CHECK(dropped.rows[i].f_count == full.rows[i].f_count);
    CHECK(dropped.rows[i].y_count == full.rows[i].y_count - 1);
    CHECK(full.rows[i].ratio - dropped.rows[i].ratio ==
          Rational(1, full.rows[i].f_count));
  }
}

TEST_CASE("generalized generator growth") {
  const GeneralizedReport quad = generalized_generators_check(Rational(2), 100000);
  REQUIRE(quad.generators.size() >= 4);
  CHECK(quad.generators[0] == 4);
  CHECK(quad.generators[1] == 17);
  CHECK(quad.generators[2] == 69);
  CHECK(quad.generators[3] == 277);
  for (std::size_t i = 1; i < quad.generators.size(); ++i)
    CHECK(Rational(quad.generators[i], quad.generators[i - 1]) > Rational(4));
  CHECK(quad.nonincreasing);

  const GeneralizedReport half = generalized_generators_check(Rational(1, 2), 1000000);
  CHECK(half.nonincreasing);
  CHECK(half.rows.back().max_ratio < half.rows.front().max_ratio);
  for (std::size_t i = 1; i < half.generators.size(); ++i)
    CHECK(Rational(half.generators[i], half.generators[i - 1]) > Rational(5, 2));

  CHECK_THROWS_AS(generalized_generators_check(Rational(0), 1000), std::invalid_argument);
  CHECK_THROWS_AS(generalized_generators_check(Rational(1), 1000, {100, 150}),
                  std::invalid_argument);
}
