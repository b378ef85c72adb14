#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sumrec/density.hpp"
#include "sumrec/rational.hpp"
#include "sumrec/window_set.hpp"

namespace sumrec {

/// L_k = 4 + 4^2 + ... + 4^k, the prefix length of the k-th stage of the
/// sparse construction.
inline std::int64_t stage_length(std::int64_t k) {
  std::int64_t s = 0, p = 1;
  for (std::int64_t i = 1; i <= k; ++i) {
    p *= 4;
    s += p;
  }
  return s;
}

constexpr std::int64_t kSparseHorizonCap = 1073741824;  // 4^15: sparse-only pipelines
constexpr std::int64_t kDenseHorizonCap = 16777216;     // 4^12: dense words and scans

/// FS({4^n}) ∪ {1} on [1, horizon].
inline WindowSet sparse_f(std::int64_t horizon) {
  if (horizon < 1 || horizon > kSparseHorizonCap)
    throw std::invalid_argument("sparse_f: horizon outside [1, 4^15]");
  const WindowSet fs = gen_fs(powers_of_four(std::max<std::int64_t>(horizon, 4)), horizon);
  return unite(fs, WindowSet::from_members(horizon, {1}));
}

/// Characteristic word of sparse_f on [1, L_k]. The k-th stage word is
/// defined by this prefix identity; the concatenation recursion only holds up
/// to the extra element 1, which breaks exact self-similarity of the first
/// block.
inline BinaryWord stage_word(std::int64_t k) {
  if (k < 1 || stage_length(k) > kDenseHorizonCap * 2)
    throw std::invalid_argument("stage_word: stage outside the dense cap");
  return to_word(sparse_f(stage_length(k)));
}

/// |FS ∩ [1, x]| by the digit formula sum 2^(i_j - 1) for
/// x = 4^(i_1) + ... + 4^(i_k). The result is cross-checked against a direct
/// enumeration count on every call; these can only disagree if the formula is
/// wrong, which is promoted to a logic error.
inline std::int64_t fs_count(std::int64_t x) {
  if (x < 4) throw std::invalid_argument("fs_count: not an FS element (below 4)");
  if (x > kSparseHorizonCap) throw std::invalid_argument("fs_count: beyond the sparse cap");
  std::int64_t formula = 0;
  std::int64_t rest = x;
  std::int64_t pos = 0;
  while (rest > 0) {
    const std::int64_t digit = rest % 4;
    if (digit >= 2 || (pos == 0 && digit == 1))
      throw std::invalid_argument("fs_count: not an FS element");
    if (digit == 1) formula += std::int64_t{1} << (pos - 1);
    rest /= 4;
    ++pos;
  }
  const std::int64_t direct = gen_fs(powers_of_four(x), x).size();
  if (formula != direct) throw std::logic_error("fs_count: formula disagrees with enumeration");
  return formula;
}

struct WindowBoundRow {
  std::int64_t length = 0;    // window length n
  std::int64_t exponent = 0;  // largest b with 4^b <= n
  Rational bound;             // 2^b / 4^b
  Rational observed;          // max window density, exact
  std::int64_t witness = 0;   // least window start achieving the max
  bool ok = false;
};

/// Exhaustive check of the sliding-window density bound 2^b/4^b for the
/// finite-sums set: every half-open window [M, M+n) is scanned. Violations
/// falsify the construction and are reported, not thrown.
inline std::vector<WindowBoundRow> banach_bound_check(std::int64_t horizon,
                                                      const std::vector<std::int64_t>& lengths,
                                                      bool include_one = false) {
  if (horizon < 4 || horizon > kDenseHorizonCap)
    throw std::invalid_argument("banach_bound_check: horizon outside [4, 4^12]");
  WindowSet a = gen_fs(powers_of_four(horizon), horizon);
  if (include_one) a = unite(a, WindowSet::from_members(horizon, {1}));
  const std::vector<std::int64_t> members = a.members();
  std::vector<WindowBoundRow> rows;
  for (std::int64_t n : lengths) {
    if (n < 1 || n > horizon)
      throw std::invalid_argument("banach_bound_check: window length outside [1, horizon]");
    WindowBoundRow row;
    row.length = n;
    while (std::int64_t{1} << (2 * (row.exponent + 1)) <= n) ++row.exponent;
    row.bound = Rational(std::int64_t{1} << row.exponent, std::int64_t{1} << (2 * row.exponent));
    const auto [count, start] = detail::best_window(members, horizon, n);
    row.observed = Rational(count, n);
    row.witness = start;
    row.ok = row.observed <= row.bound;
    rows.push_back(row);
  }
  return rows;
}

/// Removal thresholds N_t as an explicit table or a small closed form.
/// Values are clamped at the sparse cap + 1; anything beyond the horizon
/// means "no removal at this gap", so the clamp is semantically free.
class NtRule {
public:
  static NtRule constant(std::int64_t c) { return NtRule{Kind::constant, c, 0, 0, {}}; }
  static NtRule linear(std::int64_t slope = 1, std::int64_t offset = 0) {
    return NtRule{Kind::linear, offset, slope, 0, {}};
  }
  static NtRule geometric(std::int64_t base, std::int64_t ratio, std::int64_t anchor = 1) {
    if (base < 1 || ratio < 2) throw std::invalid_argument("NtRule: geometric needs base>=1, ratio>=2");
    return NtRule{Kind::geometric, base, ratio, anchor, {}};
  }
  /// Explicit table: N_t for t = first_t, first_t + 1, ...; gaps beyond the
  /// table reuse the last entry.
  static NtRule table(std::int64_t first_t, std::vector<std::int64_t> values) {
    if (values.empty()) throw std::invalid_argument("NtRule: empty table");
    return NtRule{Kind::table, first_t, 0, 0, std::move(values)};
  }

  /// Parses "t" | "const:<c>" | "linear:<slope>[,<offset>]" |
  /// "geom:<base>,<ratio>[,<anchor>]".
  static NtRule parse(const std::string& spec) {
    const auto num = [](const std::string& s) { return std::stoll(s); };
    if (spec == "t" || spec == "linear") return linear();
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("NtRule: unknown form " + spec);
    const std::string head = spec.substr(0, colon);
    std::vector<std::int64_t> args;
    std::string rest = spec.substr(colon + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      args.push_back(num(rest.substr(0, comma)));
      if (comma == std::string::npos) break;
      rest = rest.substr(comma + 1);
    }
    if (head == "const" && args.size() == 1) return constant(args[0]);
    if (head == "linear" && !args.empty())
      return linear(args[0], args.size() > 1 ? args[1] : 0);
    if (head == "geom" && args.size() >= 2)
      return geometric(args[0], args[1], args.size() > 2 ? args[2] : 1);
    throw std::invalid_argument("NtRule: unknown form " + spec);
  }

  std::int64_t eval(std::int64_t t) const {
    switch (kind_) {
      case Kind::constant:
        return c0_;
      case Kind::linear: {
        const __int128 v = static_cast<__int128>(c1_) * t + c0_;
        return clamp(v);
      }
      case Kind::geometric: {
        __int128 v = c0_;
        for (std::int64_t i = anchor_; i < t && v <= kSparseHorizonCap; ++i) v *= c1_;
        return clamp(v);
      }
      default: {
        const std::int64_t idx = std::clamp<std::int64_t>(
            t - c0_, 0, static_cast<std::int64_t>(table_.size()) - 1);
        return table_[static_cast<std::size_t>(idx)];
      }
    }
  }

  /// max N_t over t in [lo, hi]; closed forms here are nondecreasing in t.
  std::int64_t max_over(std::int64_t lo, std::int64_t hi) const {
    if (lo > hi) throw std::invalid_argument("NtRule: empty range");
    if (kind_ == Kind::table) {
      std::int64_t best = 0;
      for (std::int64_t t = lo; t <= hi; ++t) best = std::max(best, eval(t));
      return best;
    }
    return std::max(eval(lo), eval(hi));
  }

  std::string str() const {
    switch (kind_) {
      case Kind::constant: return "const:" + std::to_string(c0_);
      case Kind::linear:
        return "linear:" + std::to_string(c1_) + "," + std::to_string(c0_);
      case Kind::geometric:
        return "geom:" + std::to_string(c0_) + "," + std::to_string(c1_) + "," +
               std::to_string(anchor_);
      default: return "table[" + std::to_string(table_.size()) + "]";
    }
  }

private:
  enum class Kind { constant, linear, geometric, table };
  NtRule(Kind kind, std::int64_t c0, std::int64_t c1, std::int64_t anchor,
         std::vector<std::int64_t> table)
      : kind_(kind), c0_(c0), c1_(c1), anchor_(anchor), table_(std::move(table)) {}
  static std::int64_t clamp(__int128 v) {
    if (v < 1) return 1;
    if (v > kSparseHorizonCap) return kSparseHorizonCap + 1;
    return static_cast<std::int64_t>(v);
  }

  Kind kind_;
  std::int64_t c0_, c1_, anchor_;
  std::vector<std::int64_t> table_;
};

/// Parameters of the removal construction. ell is derived: the least k whose
/// stage length exceeds M, so stage ell-1 still fits inside a gap-M window.
struct SparseParams {
  std::int64_t M = 2;
  NtRule nt = NtRule::linear();
  std::int64_t horizon = 0;

  SparseParams(std::int64_t m, NtRule rule, std::int64_t h)
      : M(m), nt(std::move(rule)), horizon(h) {
    if (m < 1) throw std::invalid_argument("SparseParams: M must be positive");
    if (h < 1 || h > kSparseHorizonCap)
      throw std::invalid_argument("SparseParams: horizon outside [1, 4^15]");
  }

  std::int64_t ell() const {
    std::int64_t k = 1;
    while (stage_length(k) <= M) ++k;
    return k;
  }
};

/// Y = A minus every a that sees a later element of A at gap t >= M while
/// sitting at or beyond the threshold N_t.
inline WindowSet y_set(const WindowSet& a, const SparseParams& params) {
  if (a.horizon() != params.horizon)
    throw std::invalid_argument("y_set: set horizon disagrees with the parameters");
  const WindowSet f = sparse_f(a.horizon());
  const std::vector<std::int64_t> members = a.members();
  for (std::int64_t m : members)
    if (!f.contains(m)) throw std::invalid_argument("y_set: A must sit inside the sparse host");
  std::vector<std::int64_t> kept;
  for (std::size_t i = 0; i < members.size(); ++i) {
    bool removed = false;
    for (std::size_t j = i + 1; j < members.size(); ++j) {
      const std::int64_t t = members[j] - members[i];
      if (t >= params.M && members[i] >= params.nt.eval(t)) {
        removed = true;
        break;
      }
    }
    if (!removed) kept.push_back(members[i]);
  }
  return WindowSet::from_members(a.horizon(), std::move(kept));
}

struct GapCensusRow {
  std::int64_t gap = 0;
  std::int64_t pairs = 0;
};

struct PairGapCensus {
  std::vector<GapCensusRow> rows;  // gaps >= M with surviving pairs
  std::vector<std::pair<std::int64_t, std::int64_t>> violations;  // (y, y+t) with y >= N_t
  bool pass = true;
};

/// Census of the surviving pairs of Y at each gap t >= M. Every such pair
/// must sit below its threshold: y < N_t. A violation falsifies the removal
/// construction.
inline PairGapCensus pair_gap_census(const WindowSet& y, const SparseParams& params) {
  const std::vector<std::int64_t> members = y.members();
  std::vector<std::pair<std::int64_t, std::int64_t>> pairs;  // (gap, y)
  for (std::size_t i = 0; i < members.size(); ++i)
    for (std::size_t j = i + 1; j < members.size(); ++j) {
      const std::int64_t t = members[j] - members[i];
      if (t >= params.M) pairs.emplace_back(t, members[i]);
    }
  std::sort(pairs.begin(), pairs.end());
  PairGapCensus census;
  for (const auto& [gap, lo] : pairs) {
    if (census.rows.empty() || census.rows.back().gap != gap)
      census.rows.push_back({gap, 0});
    ++census.rows.back().pairs;
    if (lo >= params.nt.eval(gap)) {
      census.violations.emplace_back(lo, lo + gap);
      census.pass = false;
    }
  }
  return census;
}

struct DecayRow {
  std::int64_t grid_n = 0;
  std::int64_t y_count = 0;
  std::int64_t f_count = 0;
  Rational ratio;
};

struct DecayBoundRow {
  std::int64_t exponent = 0;     // the N of the bound 2^(ell+1) / 2^N
  bool applicable = false;       // some grid point lies past a fully-thresholded stage copy
  std::int64_t first_grid = 0;   // least grid point where the bound applies
  Rational bound;
  bool ok = true;                // ratio < bound at every applicable grid point
  bool copy_counts_ok = true;    // every clean copy keeps at most 2^(ell+1) members
};

struct DecayReport {
  std::int64_t ell = 0;
  std::vector<DecayRow> rows;
  std::vector<DecayBoundRow> bounds;
  bool pass = true;
};

namespace detail {

// Sums of distinct powers 4^j, j >= j_min, up to the cap (0 included).
inline std::vector<std::int64_t> high_power_sums(std::int64_t j_min, std::int64_t cap) {
  std::vector<std::int64_t> powers;
  std::int64_t p = 1;
  for (std::int64_t e = 0; p <= cap; ++e) {
    if (e >= j_min) powers.push_back(p);
    if (p > cap / 4) break;
    p *= 4;
  }
  std::vector<std::int64_t> sums{0};
  for (std::int64_t p : powers) {
    const std::size_t n = sums.size();
    for (std::size_t i = 0; i < n; ++i)
      if (sums[i] <= cap - p) sums.push_back(sums[i] + p);
  }
  std::sort(sums.begin(), sums.end());
  return sums;
}

}  // namespace detail

/// Relative density of Y inside the sparse host along the stage grid, plus
/// the decay bounds 2^(ell+1)/2^N. A bound participates only once some grid
/// point lies past a complete stage-(N+2) copy whose start exceeds every
/// threshold N_t active below that stage length; earlier grid points report
/// "not applicable". Each such clean copy is also counted directly: it may
/// keep at most 2^(ell+1) members of Y.
inline DecayReport decay_report(const WindowSet& a, const SparseParams& params,
                                std::vector<std::int64_t> grid = {}) {
  const WindowSet y = y_set(a, params);
  const WindowSet f = sparse_f(params.horizon);
  if (grid.empty())
    for (std::int64_t k = 1; stage_length(k) <= params.horizon; ++k)
      grid.push_back(stage_length(k));

  DecayReport rep;
  rep.ell = params.ell();
  for (std::int64_t n : grid) {
    if (n < 1 || n > params.horizon)
      throw std::invalid_argument("decay_report: grid point outside [1, horizon]");
    DecayRow row;
    row.grid_n = n;
    row.y_count = y.prefix_count(n);
    row.f_count = f.prefix_count(n);
    row.ratio = Rational(row.y_count, row.f_count);
    rep.rows.push_back(row);
  }

  for (std::int64_t big_n = rep.ell + 2; stage_length(big_n + 2) <= params.horizon; ++big_n) {
    DecayBoundRow bound;
    bound.exponent = big_n;
    bound.bound = Rational(std::int64_t{1} << (rep.ell + 1), std::int64_t{1} << big_n);
    const std::int64_t stage = stage_length(big_n + 2);
    const std::int64_t threshold_max = params.nt.max_over(params.M, std::min(stage, params.horizon));
    for (std::int64_t v : detail::high_power_sums(big_n + 3, params.horizon)) {
      if (v < threshold_max || v + stage > params.horizon) continue;
      if (!bound.applicable) {
        bound.applicable = true;
        bound.first_grid = v + stage;
      }
      if (y.count_in(v + 1, v + stage) > (std::int64_t{1} << (rep.ell + 1)))
        bound.copy_counts_ok = false;
    }
    if (bound.applicable) {
      for (const DecayRow& row : rep.rows)
        if (row.grid_n >= bound.first_grid && !(row.ratio < bound.bound)) bound.ok = false;
    }
    rep.pass = rep.pass && bound.ok && bound.copy_counts_ok;
    rep.bounds.push_back(bound);
  }
  return rep;
}

struct GrowthRow {
  std::int64_t length = 0;
  Rational max_ratio;
  std::int64_t witness = 0;
};

struct GeneralizedReport {
  std::vector<std::int64_t> generators;
  std::vector<GrowthRow> rows;
  bool nonincreasing = true;
};

/// Rebuilds the window-density scan over finite sums of a faster-growing
/// generator sequence a_{n+1} = ceil((2+eps) a_n) + 1, a_1 = 4. Window
/// lengths must each divide the next so the partition argument makes the
/// max ratios provably nonincreasing.
inline GeneralizedReport generalized_generators_check(const Rational& eps, std::int64_t horizon,
                                                      std::vector<std::int64_t> lengths = {100, 1000,
                                                                                           10000}) {
  if (!(eps > Rational(0)))
    throw std::invalid_argument("generalized_generators_check: eps must be positive");
  if (horizon < 4 || horizon > kDenseHorizonCap)
    throw std::invalid_argument("generalized_generators_check: horizon outside [4, 4^12]");
  for (std::size_t i = 1; i < lengths.size(); ++i)
    if (lengths[i] <= lengths[i - 1] || lengths[i] % lengths[i - 1] != 0)
      throw std::invalid_argument("generalized_generators_check: lengths must ascend by division");

  GeneralizedReport rep;
  std::int64_t g = 4;
  while (g <= horizon) {
    rep.generators.push_back(g);
    // ceil((2 + p/q) g) + 1 in integers
    const __int128 num = (static_cast<__int128>(2) * eps.den() + eps.num()) * g;
    const __int128 next = (num + eps.den() - 1) / eps.den() + 1;
    if (next > horizon) break;
    g = static_cast<std::int64_t>(next);
  }
  const WindowSet fs = gen_fs(rep.generators, horizon);
  const std::vector<std::int64_t> members = fs.members();
  for (std::int64_t n : lengths) {
    if (n > horizon)
      throw std::invalid_argument("generalized_generators_check: length beyond horizon");
    const auto [count, start] = detail::best_window(members, horizon, n);
    rep.rows.push_back({n, Rational(count, n), start});
  }
  for (std::size_t i = 1; i < rep.rows.size(); ++i)
    if (rep.rows[i].max_ratio > rep.rows[i - 1].max_ratio) rep.nonincreasing = false;
  return rep;
}

}  // namespace sumrec
