#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sumrec/configurations.hpp"
#include "sumrec/rational.hpp"
#include "sumrec/window_set.hpp"

namespace sumrec {

/// Point subset of a finite system, as a membership mask over {0, ..., n-1}.
/// This module is the one place with 0-based coordinates, matching the
/// nonnegative-indexing convention of shift spaces; conversions to the
/// 1-based window world are explicit at the call sites.
using PointSet = std::vector<std::uint8_t>;

/// Finite probability space with a weight-preserving bijection.
class FiniteMPS {
public:
  FiniteMPS(std::vector<Rational> weights, std::vector<std::int64_t> map)
      : weights_(std::move(weights)), map_(std::move(map)) {
    if (weights_.empty() || weights_.size() != map_.size())
      throw std::invalid_argument("FiniteMPS: weights and map must be nonempty and aligned");
    Rational total(0);
    for (const Rational& w : weights_) {
      if (w < Rational(0)) throw std::invalid_argument("FiniteMPS: negative weight");
      total += w;
    }
    if (total != Rational(1)) throw std::invalid_argument("FiniteMPS: weights must sum to 1");
    validate_preserving(map_);
  }

  static FiniteMPS cyclic(std::int64_t n) {
    std::vector<Rational> w(static_cast<std::size_t>(n), Rational(1, n));
    std::vector<std::int64_t> m(static_cast<std::size_t>(n));
    for (std::int64_t x = 0; x < n; ++x) m[static_cast<std::size_t>(x)] = (x + 1) % n;
    return FiniteMPS(std::move(w), std::move(m));
  }

  std::int64_t n_points() const { return static_cast<std::int64_t>(map_.size()); }
  const Rational& weight(std::int64_t x) const { return weights_.at(static_cast<std::size_t>(x)); }
  const std::vector<std::int64_t>& forward() const { return map_; }
  const std::vector<Rational>& weights() const { return weights_; }

  /// T^n as a table; the composed map is re-validated as a
  /// weight-preserving bijection before use.
  std::vector<std::int64_t> power(std::int64_t n) const {
    if (n < 0) throw std::invalid_argument("FiniteMPS::power: negative exponent");
    std::vector<std::int64_t> acc(map_.size());
    for (std::size_t x = 0; x < acc.size(); ++x) acc[x] = static_cast<std::int64_t>(x);
    std::vector<std::int64_t> base = map_;
    while (n > 0) {
      if (n & 1) acc = compose(base, acc);
      n >>= 1;
      if (n) base = compose(base, base);
    }
    validate_preserving(acc);
    return acc;
  }

  Rational measure(const PointSet& e) const {
    check_subset(e);
    Rational total(0);
    for (std::size_t x = 0; x < e.size(); ++x)
      if (e[x]) total += weights_[x];
    return total;
  }

  void check_subset(const PointSet& e) const {
    if (static_cast<std::int64_t>(e.size()) != n_points())
      throw std::invalid_argument("FiniteMPS: point set mask has wrong size");
  }

private:
  static std::vector<std::int64_t> compose(const std::vector<std::int64_t>& outer,
                                           const std::vector<std::int64_t>& inner) {
    std::vector<std::int64_t> out(inner.size());
    for (std::size_t x = 0; x < inner.size(); ++x)
      out[x] = outer[static_cast<std::size_t>(inner[x])];
    return out;
  }
  void validate_preserving(const std::vector<std::int64_t>& m) const {
    std::vector<std::uint8_t> seen(m.size(), 0);
    for (std::size_t x = 0; x < m.size(); ++x) {
      const std::int64_t y = m[x];
      if (y < 0 || y >= n_points() || seen[static_cast<std::size_t>(y)])
        throw std::invalid_argument("FiniteMPS: map is not a bijection");
      seen[static_cast<std::size_t>(y)] = 1;
      if (weights_[static_cast<std::size_t>(y)] != weights_[x])
        throw std::invalid_argument("FiniteMPS: map does not preserve weights");
    }
  }

  std::vector<Rational> weights_;
  std::vector<std::int64_t> map_;
};

/// mu(E ∩ T^{-n}E ∩ ... ∩ T^{-kn}E) for each n in n_list, by iterating the
/// n-th power table.
inline std::vector<Rational> intersection_measure(const FiniteMPS& sys, const PointSet& e,
                                                  const std::vector<std::int64_t>& n_list,
                                                  std::int64_t k) {
  sys.check_subset(e);
  if (k < 1) throw std::invalid_argument("intersection_measure: k must be positive");
  std::vector<Rational> out;
  for (std::int64_t n : n_list) {
    const std::vector<std::int64_t> step = sys.power(n);
    Rational total(0);
    for (std::int64_t x = 0; x < sys.n_points(); ++x) {
      std::int64_t y = x;
      bool inside = true;
      for (std::int64_t i = 0; i <= k; ++i) {
        if (!e[static_cast<std::size_t>(y)]) {
          inside = false;
          break;
        }
        y = step[static_cast<std::size_t>(y)];
      }
      if (inside) total += sys.weight(x);
    }
    out.push_back(total);
  }
  return out;
}

namespace detail {

inline PointSet intersect_iterates(const FiniteMPS& sys, const PointSet& e,
                                   const std::vector<std::int64_t>& step, std::int64_t k) {
  PointSet out(e.size(), 0);
  for (std::int64_t x = 0; x < sys.n_points(); ++x) {
    std::int64_t y = x;
    bool inside = true;
    for (std::int64_t i = 0; i <= k; ++i) {
      if (!e[static_cast<std::size_t>(y)]) {
        inside = false;
        break;
      }
      y = step[static_cast<std::size_t>(y)];
    }
    out[static_cast<std::size_t>(x)] = inside ? 1 : 0;
  }
  return out;
}

}  // namespace detail

struct StagedRecurrence {
  std::vector<std::int64_t> terms;  // t_1 < t_2 < ... (partial when incomplete)
  std::vector<PointSet> stages;     // E_1 ⊇ E_2 ⊇ ...
  Rational final_measure;           // mu of the full-family intersection, when completed
  bool completed = false;
};

/// Inductive selection of t_1 < t_2 < ... from S with t_{j+1} > k*t_j and
/// positive measure of the shrinking sets E_j. On completion the result is
/// cross-checked against the whole coefficient-sum family: the measure of
/// the meet of T^{-n}E over every family sum n is recomputed from
/// family_sums and must match the staged construction exactly.
inline StagedRecurrence staged_recurrence_times(const FiniteMPS& sys, const PointSet& e, const WindowSet& s,
                                      std::int64_t k, std::int64_t m) {
  sys.check_subset(e);
  if (k < 1 || m < 1) throw std::invalid_argument("staged_recurrence_times: k and m must be positive");
  if (sys.measure(e) == Rational(0))
    throw std::invalid_argument("staged_recurrence_times: E must have positive measure");

  StagedRecurrence result;
  PointSet current = e;
  std::int64_t prev_t = 0;
  for (std::int64_t j = 0; j < m; ++j) {
    std::optional<std::int64_t> chosen;
    PointSet next;
    s.for_each_member([&](std::int64_t t) {
      if (chosen || t <= k * prev_t) return;
      PointSet candidate = detail::intersect_iterates(sys, current, sys.power(t), k);
      if (sys.measure(candidate) > Rational(0)) {
        chosen = t;
        next = std::move(candidate);
      }
    });
    if (!chosen) return result;  // not extendable at this horizon
    result.terms.push_back(*chosen);
    result.stages.push_back(next);
    current = std::move(next);
    prev_t = *chosen;
  }

  // independent route: intersect over the explicit family sums
  PointSet meet = e;
  for (std::int64_t n : family_sums(result.terms, k, SumConvention::zero_allowed)) {
    const std::vector<std::int64_t> step = sys.power(n);
    PointSet filtered(meet.size(), 0);
    for (std::int64_t x = 0; x < sys.n_points(); ++x)
      filtered[static_cast<std::size_t>(x)] =
          meet[static_cast<std::size_t>(x)] &&
          e[static_cast<std::size_t>(step[static_cast<std::size_t>(x)])];
    meet = std::move(filtered);
  }
  result.final_measure = sys.measure(meet);
  if (meet != current || !(result.final_measure > Rational(0)))
    throw std::logic_error("staged_recurrence_times: staged sets disagree with the family meet");
  result.completed = true;
  return result;
}

/// Long 0/1 word with an optional declared period. Only eventually periodic
/// points get exact orbit closures; everything topological here requires the
/// period.
class ShiftContext {
public:
  static ShiftContext periodic(const BinaryWord& word, std::int64_t period) {
    if (period < 1 || period > 62)
      throw std::invalid_argument("ShiftContext: period must be in [1, 62]");
    if (word.length() < period)
      throw std::invalid_argument("ShiftContext: explicit prefix shorter than the period");
    ShiftContext ctx;
    ctx.bits_.resize(static_cast<std::size_t>(word.length()));
    for (std::int64_t i = 0; i < word.length(); ++i)
      ctx.bits_[static_cast<std::size_t>(i)] = word.bit(i + 1) ? 1 : 0;
    for (std::int64_t i = 0; i < word.length(); ++i)
      if (ctx.bits_[static_cast<std::size_t>(i)] != ctx.bits_[static_cast<std::size_t>(i % period)])
        throw std::invalid_argument("ShiftContext: prefix inconsistent with declared period");
    ctx.period_ = period;
    return ctx;
  }

  static ShiftContext aperiodic(const BinaryWord& word) {
    ShiftContext ctx;
    ctx.bits_.resize(static_cast<std::size_t>(word.length()));
    for (std::int64_t i = 0; i < word.length(); ++i)
      ctx.bits_[static_cast<std::size_t>(i)] = word.bit(i + 1) ? 1 : 0;
    return ctx;
  }

  bool periodic_point() const { return period_.has_value(); }
  std::int64_t period() const {
    if (!period_) throw std::invalid_argument("ShiftContext: operation needs a periodic point");
    return *period_;
  }
  /// Coordinate i (0-based); beyond the explicit prefix only periodic
  /// contexts answer exactly.
  bool bit(std::int64_t i) const {
    if (i < 0) throw std::out_of_range("ShiftContext: negative coordinate");
    if (i < static_cast<std::int64_t>(bits_.size())) return bits_[static_cast<std::size_t>(i)];
    if (!period_)
      throw std::out_of_range("ShiftContext: coordinate beyond the explicit prefix");
    return bits_[static_cast<std::size_t>(i % *period_)];
  }

private:
  std::vector<std::uint8_t> bits_;
  std::optional<std::int64_t> period_;
};

/// Cylinder: finitely many fixed 0-based coordinates.
struct Cylinder {
  std::vector<std::pair<std::int64_t, bool>> fixed;
};

namespace detail {

// Phases r of the periodic orbit whose rotation lies in the cylinder.
inline std::vector<std::int64_t> cylinder_phases(const ShiftContext& ctx, const Cylinder& u) {
  const std::int64_t p = ctx.period();
  std::vector<std::int64_t> out;
  for (std::int64_t r = 0; r < p; ++r) {
    bool inside = true;
    for (const auto& [pos, val] : u.fixed)
      if (ctx.bit((r + pos) % p) != val) {
        inside = false;
        break;
      }
    if (inside) out.push_back(r);
  }
  return out;
}

}  // namespace detail

/// Least n in S with some orbit point inside U ∩ σ^{-n}U ∩ ... ∩ σ^{-kn}U.
/// Exact because the orbit closure of a periodic point is its p rotations.
inline std::optional<std::int64_t> top_recurrence_witness(const ShiftContext& ctx,
                                                          const Cylinder& u, const WindowSet& s,
                                                          std::int64_t k) {
  const std::int64_t p = ctx.period();
  if (k < 1) throw std::invalid_argument("top_recurrence_witness: k must be positive");
  const std::vector<std::int64_t> inside = detail::cylinder_phases(ctx, u);
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(p), 0);
  for (std::int64_t r : inside) mask[static_cast<std::size_t>(r)] = 1;
  std::optional<std::int64_t> found;
  s.for_each_member([&](std::int64_t n) {
    if (found) return;
    for (std::int64_t r = 0; r < p; ++r) {
      bool all = true;
      for (std::int64_t i = 0; i <= k; ++i)
        if (!mask[static_cast<std::size_t>((r + i * n) % p)]) {
          all = false;
          break;
        }
      if (all) {
        found = n;
        return;
      }
    }
  });
  return found;
}

/// Number of leading coordinates that d(., .) < eps forces equal: the least
/// r with 2^-r <= eps. (A disagreement at coordinate i contributes 2^-(i+1),
/// so coordinates 0..r-1 are pinned; coordinate r-1 is sharp only because the
/// ball is open.)
inline std::int64_t ball_agreement_length(const Rational& eps) {
  if (!(eps > Rational(0)))
    throw std::invalid_argument("ball_agreement_length: eps must be positive");
  std::int64_t r = 0;
  __int128 pow = 1;
  while (static_cast<__int128>(eps.num()) * pow < eps.den()) {
    ++r;
    pow <<= 1;
    if (r > 126) throw std::invalid_argument("ball_agreement_length: eps too small");
  }
  return r;
}

/// Interval value of the shift metric on equal-length explicit prefixes: the
/// true distance of any two extensions lies in [lo, hi] = prefix sum plus the
/// unseen-tail bound 2^-L.
struct MetricInterval {
  Rational lo;
  Rational hi;
};

inline MetricInterval metric_d(const BinaryWord& a, const BinaryWord& b) {
  if (a.length() != b.length())
    throw std::invalid_argument("metric_d: words must have equal explicit length");
  const std::int64_t len = a.length();
  if (len > 62) throw std::invalid_argument("metric_d: prefix too long for exact 64-bit sums");
  std::int64_t scaled = 0;  // sum of |a_i - b_i| * 2^(L-1-i), i.e. distance * 2^L
  for (std::int64_t i = 0; i < len; ++i)
    if (a.bit(i + 1) != b.bit(i + 1)) scaled += std::int64_t{1} << (len - 1 - i);
  const std::int64_t denom = std::int64_t{1} << len;
  return {Rational(scaled, denom), Rational(scaled + 1, denom)};
}

/// Exact metric between two rotations of a periodic point: grouping the
/// geometric series by residue gives X / (2^p - 1) with X the one-period
/// disagreement sum.
inline Rational rotation_metric(const ShiftContext& ctx, std::int64_t r, std::int64_t s) {
  const std::int64_t p = ctx.period();
  std::int64_t scaled = 0;
  for (std::int64_t j = 0; j < p; ++j)
    if (ctx.bit((r + j) % p) != ctx.bit((s + j) % p)) scaled += std::int64_t{1} << (p - 1 - j);
  return Rational(scaled, (std::int64_t{1} << p) - 1);
}

/// Orbit phases inside the open ball B(orbit point z, eps).
inline std::vector<std::int64_t> orbit_ball_phases(const ShiftContext& ctx, std::int64_t z_phase,
                                                   const Rational& eps) {
  const std::int64_t p = ctx.period();
  if (z_phase < 0 || z_phase >= p)
    throw std::invalid_argument("orbit_ball_phases: phase outside [0, period)");
  std::vector<std::int64_t> out;
  for (std::int64_t r = 0; r < p; ++r)
    if (rotation_metric(ctx, r, z_phase) < eps) out.push_back(r);
  return out;
}

struct NestedStep {
  std::int64_t b = 0;
  std::vector<std::int64_t> phases;  // orbit points in the nested intersection
};

/// Least b in S beyond the floor with B ∩ σ^{-b}B ∩ ... ∩ σ^{-kb}B nonempty,
/// where B is a set of orbit phases. The surviving phases come back so the
/// next level can nest on them.
inline std::optional<NestedStep> nested_set_step(const ShiftContext& ctx,
                                                 const std::vector<std::int64_t>& phases,
                                                 const WindowSet& s, std::int64_t k,
                                                 std::int64_t floor) {
  const std::int64_t p = ctx.period();
  if (k < 1) throw std::invalid_argument("nested_set_step: k must be positive");
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(p), 0);
  for (std::int64_t r : phases) mask.at(static_cast<std::size_t>(r)) = 1;
  std::optional<NestedStep> found;
  s.for_each_member([&](std::int64_t b) {
    if (found || b <= floor) return;
    std::vector<std::int64_t> surviving;
    for (std::int64_t r = 0; r < p; ++r) {
      bool all = true;
      for (std::int64_t i = 0; i <= k; ++i)
        if (!mask[static_cast<std::size_t>((r + i * b) % p)]) {
          all = false;
          break;
        }
      if (all) surviving.push_back(r);
    }
    if (!surviving.empty()) found = NestedStep{b, std::move(surviving)};
  });
  return found;
}

inline std::optional<NestedStep> nested_ball_step(const ShiftContext& ctx, std::int64_t z_phase,
                                                  const Rational& eps, const WindowSet& s,
                                                  std::int64_t k, std::int64_t floor) {
  return nested_set_step(ctx, orbit_ball_phases(ctx, z_phase, eps), s, k, floor);
}

}  // namespace sumrec
