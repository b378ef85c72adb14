#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "sumrec/window_set.hpp"

namespace sumrec {

/// A partition of [1, horizon] into color classes.
struct Coloring {
  std::int64_t horizon = 0;
  std::vector<WindowSet> classes;

  static Coloring of(std::int64_t horizon, std::vector<WindowSet> classes) {
    if (classes.empty()) throw std::invalid_argument("Coloring: no classes");
    std::vector<std::int64_t> seen(static_cast<std::size_t>(horizon) + 1, 0);
    for (const WindowSet& c : classes) {
      if (c.horizon() != horizon) throw std::invalid_argument("Coloring: horizon mismatch");
      c.for_each_member([&](std::int64_t m) { ++seen[static_cast<std::size_t>(m)]; });
    }
    for (std::int64_t i = 1; i <= horizon; ++i)
      if (seen[static_cast<std::size_t>(i)] != 1)
        throw std::invalid_argument("Coloring: classes must partition [1, horizon]");
    Coloring col;
    col.horizon = horizon;
    col.classes = std::move(classes);
    return col;
  }

  std::size_t num_classes() const { return classes.size(); }
};

/// Evidence of piecewise-syndetic structure at span n: a fixed offset pattern
/// that recurs along a chain of occurrences each within n of the next. The
/// chain is the finite stand-in for "intervals whose lengths tend to
/// infinity": run_lengths[i] counts the pattern repeats accumulated at
/// run_starts[i], so the list is strictly increasing.
struct PwsWitness {
  std::int64_t gap_bound = 0;               // the span parameter n
  std::vector<std::int64_t> pattern;        // offsets, pattern[0] == 0, within [0, n]
  std::vector<std::int64_t> run_starts;     // chain occurrences, ascending
  std::vector<std::int64_t> run_lengths;    // 1, 2, ..., run_starts.size()
};

/// Largest gap of A measured with sentinels at 0 and horizon+1, so 1 means
/// exactly "A covers the whole window". none only for empty A.
inline std::optional<std::int64_t> syndetic_gap(const WindowSet& a) {
  if (a.empty()) return std::nullopt;
  std::int64_t best = 0, prev = 0;
  a.for_each_member([&](std::int64_t m) {
    best = std::max(best, m - prev);
    prev = m;
  });
  best = std::max(best, a.horizon() + 1 - prev);
  return best;
}

/// Length of the longest block of consecutive integers inside A.
inline std::int64_t max_run(const WindowSet& a) {
  std::int64_t best = 0, run = 0, prev = 0;
  a.for_each_member([&](std::int64_t m) {
    run = (m == prev + 1) ? run + 1 : 1;
    best = std::max(best, run);
    prev = m;
  });
  return best;
}

namespace detail {

// Occurrences of an offset pattern: starts m with m + off in A for every
// offset and the whole span window [m, m+n] inside [1, horizon].
inline std::vector<std::int64_t> pattern_occurrences(const WindowSet& a,
                                                     const std::vector<std::int64_t>& pattern,
                                                     std::int64_t span) {
  std::vector<std::int64_t> out;
  for (std::int64_t m = 1; m + span <= a.horizon(); ++m) {
    bool all = true;
    for (std::int64_t off : pattern)
      if (!a.contains(m + off)) {
        all = false;
        break;
      }
    if (all) out.push_back(m);
  }
  return out;
}

// First maximal chain (successive occurrences within span of each other)
// reaching the requested length; empty if none does.
inline std::vector<std::int64_t> first_long_chain(const std::vector<std::int64_t>& occurrences,
                                                  std::int64_t span, std::int64_t min_len) {
  std::size_t start = 0;
  for (std::size_t i = 0; i <= occurrences.size(); ++i) {
    const bool breaks = i == occurrences.size() || (i > start && occurrences[i] - occurrences[i - 1] > span);
    if (breaks) {
      if (static_cast<std::int64_t>(i - start) >= min_len)
        return {occurrences.begin() + static_cast<std::ptrdiff_t>(start),
                occurrences.begin() + static_cast<std::ptrdiff_t>(i)};
      start = i;
    }
  }
  return {};
}

}  // namespace detail

/// Searches spans [0, n] for the offset pattern of maximal size r >= 2 that
/// recurs along a chain of at least min_runs occurrences. Patterns are
/// canonicalized to start at offset 0; ties break to the lexicographically
/// least offset list. Exhaustive over the 2^n candidate offset sets, so meant
/// for desk-scale spans (n <= ~20).
inline std::optional<PwsWitness> pws_witness(const WindowSet& a, std::int64_t n,
                                             std::int64_t min_runs) {
  if (n < 1 || n >= a.horizon())
    throw std::invalid_argument("pws_witness: span must satisfy 1 <= n < horizon");
  if (min_runs < 1) throw std::invalid_argument("pws_witness: min_runs must be positive");
  if (n > 24) throw std::invalid_argument("pws_witness: span too large for exhaustive scan");

  std::optional<PwsWitness> best;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    std::vector<std::int64_t> pattern{0};
    for (std::int64_t off = 1; off <= n; ++off)
      if (mask >> (off - 1) & 1) pattern.push_back(off);
    if (pattern.size() < 2) continue;
    if (best && pattern.size() < best->pattern.size()) continue;
    if (best && pattern.size() == best->pattern.size() && best->pattern <= pattern) continue;

    const std::vector<std::int64_t> occ = detail::pattern_occurrences(a, pattern, n);
    const std::vector<std::int64_t> chain = detail::first_long_chain(occ, n, min_runs);
    if (chain.empty()) continue;

    PwsWitness w;
    w.gap_bound = n;
    w.pattern = pattern;
    w.run_starts = chain;
    for (std::size_t i = 0; i < chain.size(); ++i)
      w.run_lengths.push_back(static_cast<std::int64_t>(i) + 1);
    best = std::move(w);
  }
  return best;
}

/// Re-verification hook used by tests and callers: a witness is valid iff
/// every listed start hits A at every pattern offset and the chain structure
/// holds.
inline bool pws_witness_valid(const WindowSet& a, const PwsWitness& w) {
  if (w.pattern.size() < 2 || w.pattern.front() != 0) return false;
  for (std::int64_t off : w.pattern)
    if (off < 0 || off > w.gap_bound) return false;
  if (w.run_starts.empty() || w.run_starts.size() != w.run_lengths.size()) return false;
  for (std::size_t i = 0; i < w.run_starts.size(); ++i) {
    for (std::int64_t off : w.pattern)
      if (!a.contains(w.run_starts[i] + off)) return false;
    if (i > 0 && w.run_starts[i] - w.run_starts[i - 1] > w.gap_bound) return false;
    if (i > 0 && w.run_lengths[i] <= w.run_lengths[i - 1]) return false;
  }
  return true;
}

struct PwsColorOptions {
  std::int64_t max_span = 12;
  std::int64_t min_runs = 3;
};

/// Index (1-based) of a class exhibiting piecewise-syndetic structure:
/// sweeps the span upward and returns, at the first span where any class has
/// a witness, the class with the largest pattern (lowest index on ties).
/// Degenerate colorings where no class ever witnesses fall back to the
/// largest class.
inline std::size_t pws_color(const Coloring& coloring, const PwsColorOptions& opts = {}) {
  const std::int64_t span_cap = std::min(opts.max_span, coloring.horizon - 1);
  for (std::int64_t n = 1; n <= span_cap; ++n) {
    std::size_t best_index = 0;
    std::size_t best_size = 0;
    for (std::size_t i = 0; i < coloring.classes.size(); ++i) {
      const auto w = pws_witness(coloring.classes[i], n, opts.min_runs);
      if (w && w->pattern.size() > best_size) {
        best_size = w->pattern.size();
        best_index = i + 1;
      }
    }
    if (best_index) return best_index;
  }
  std::size_t best_index = 1;
  for (std::size_t i = 1; i < coloring.classes.size(); ++i)
    if (coloring.classes[i].size() > coloring.classes[best_index - 1].size()) best_index = i + 1;
  return best_index;
}

}  // namespace sumrec
