#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sumrec/rational.hpp"
#include "sumrec/window_set.hpp"

namespace sumrec {

enum class DensityFunctional { upper_banach, lower, lower_relative };

inline const char* to_string(DensityFunctional f) {
  switch (f) {
    case DensityFunctional::upper_banach: return "upper_banach";
    case DensityFunctional::lower: return "lower";
    default: return "lower_relative";
  }
}

/// Density evaluations over an explicit grid. Every value is an exact
/// count/length rational; the extremum is a finite sup/inf proxy over the
/// grid, never an asymptotic claim. For upper_banach each grid point is a
/// window length and carries the (least) window start achieving the maximum.
struct DensityReport {
  DensityFunctional functional = DensityFunctional::upper_banach;
  std::vector<std::int64_t> grid;
  std::vector<Rational> values;
  Rational extremum;
  std::vector<std::int64_t> witnesses;  // upper_banach only: argmax window starts
};

namespace detail {

// Max of |A ∩ [M, M+L)| over all full windows, with the least argmax M.
// Two-pointer sweep over the sorted members: O(|A| + horizon/step) lookups.
inline std::pair<std::int64_t, std::int64_t> best_window(const std::vector<std::int64_t>& members,
                                                         std::int64_t horizon, std::int64_t len) {
  std::int64_t best = 0, best_m = 1;
  std::size_t lo = 0, hi = 0;
  for (std::int64_t m = 1; m + len - 1 <= horizon; ++m) {
    while (lo < members.size() && members[lo] < m) ++lo;
    while (hi < members.size() && members[hi] < m + len) ++hi;
    const std::int64_t count = static_cast<std::int64_t>(hi - lo);
    if (count > best) {
      best = count;
      best_m = m;
    }
  }
  return {best, best_m};
}

}  // namespace detail

/// Largest window density max_M |A ∩ [M, M+L)| / L over full windows inside
/// [1, horizon]: the finite stand-in for upper Banach density at scale L.
inline DensityReport upper_banach(const WindowSet& a, const std::vector<std::int64_t>& lengths) {
  DensityReport rep;
  rep.functional = DensityFunctional::upper_banach;
  const std::vector<std::int64_t> members = a.members();
  for (std::int64_t len : lengths) {
    if (len < 1 || len > a.horizon())
      throw std::invalid_argument("upper_banach: window length outside [1, horizon]");
    const auto [count, start] = detail::best_window(members, a.horizon(), len);
    rep.grid.push_back(len);
    rep.values.push_back(Rational(count, len));
    rep.witnesses.push_back(start);
  }
  rep.extremum = Rational(0);
  for (const Rational& v : rep.values) rep.extremum = std::max(rep.extremum, v);
  return rep;
}

inline DensityReport upper_banach(const WindowSet& a, std::int64_t length) {
  return upper_banach(a, std::vector<std::int64_t>{length});
}

/// |A ∩ F ∩ [n]| / |F ∩ [n]| along the prefix grid, with the minimum as the
/// liminf proxy. A grid point whose F-prefix is empty is a caller error.
inline DensityReport lower_relative(const WindowSet& a, const WindowSet& f,
                                    const std::vector<std::int64_t>& grid) {
  DensityReport rep;
  rep.functional = DensityFunctional::lower_relative;
  const std::int64_t h = std::min(a.horizon(), f.horizon());
  const WindowSet af = intersect(a, f);
  bool first = true;
  for (std::int64_t n : grid) {
    if (n < 1 || n > h)
      throw std::invalid_argument("lower_relative: grid point outside [1, min horizon]");
    const std::int64_t den = f.prefix_count(n);
    if (den == 0)
      throw std::domain_error("lower_relative: F has no members in [1, " + std::to_string(n) + "]");
    const Rational v(af.prefix_count(n), den);
    rep.grid.push_back(n);
    rep.values.push_back(v);
    if (first || v < rep.extremum) rep.extremum = v;
    first = false;
  }
  return rep;
}

/// Least N such that |A ∩ F ∩ [n]| / |F ∩ [n]| >= target for every
/// n in [N, horizon_cap]. Prefixes where F ∩ [1, n] is empty cannot certify
/// the target and count as failing; if F is empty on the whole cap range the
/// division guard of lower_relative applies.
inline std::optional<std::int64_t> threshold_index(const WindowSet& a, const WindowSet& f,
                                                   const Rational& target,
                                                   std::int64_t horizon_cap) {
  if (target < Rational(0) || target > Rational(1))
    throw std::invalid_argument("threshold_index: target outside [0, 1]");
  const std::int64_t h = std::min({a.horizon(), f.horizon(), horizon_cap});
  if (h < 1 || f.prefix_count(h) == 0)
    throw std::domain_error("threshold_index: F has no members below the cap");
  const WindowSet af = intersect(a, f);
  std::optional<std::int64_t> best;
  // Scan n downward; the answer is the lowest N whose whole suffix is good.
  for (std::int64_t n = h; n >= 1; --n) {
    const std::int64_t den = f.prefix_count(n);
    const bool good = den > 0 && Rational(af.prefix_count(n), den) >= target;
    if (!good) break;
    best = n;
  }
  return best;
}

}  // namespace sumrec
