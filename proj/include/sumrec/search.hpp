#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "sumrec/configurations.hpp"
#include "sumrec/structure.hpp"
#include "sumrec/window_set.hpp"

namespace sumrec {

struct IntersectiveWitness {
  std::int64_t a = 0;
  std::int64_t n = 0;
  friend bool operator==(const IntersectiveWitness&, const IntersectiveWitness&) = default;
};

/// Least (n, a), ordered by n first, with n in S, a in A and a, a+n, ..., a+kn all
/// in A within the horizon.
inline std::optional<IntersectiveWitness> k_intersective_witness(const WindowSet& a,
                                                                 const WindowSet& s,
                                                                 std::int64_t k) {
  if (k < 1) throw std::invalid_argument("k_intersective_witness: k must be positive");
  std::optional<IntersectiveWitness> found;
  const std::vector<std::int64_t> hits = a.members();
  s.for_each_member([&](std::int64_t n) {
    if (found) return;
    for (std::int64_t start : hits) {
      if (start + k * n > a.horizon()) break;
      bool all = true;
      for (std::int64_t i = 1; i <= k; ++i)
        if (!a.contains(start + i * n)) {
          all = false;
          break;
        }
      if (all) {
        found = IntersectiveWitness{start, n};
        return;
      }
    }
  });
  return found;
}

struct ChromaticWitness {
  std::size_t class_index = 0;  // 1-based
  IntersectiveWitness witness;
};

/// First class (ascending index) admitting a k-intersective witness from S.
inline std::optional<ChromaticWitness> chromatic_witness(const Coloring& coloring,
                                                         const WindowSet& s, std::int64_t k) {
  for (std::size_t i = 0; i < coloring.classes.size(); ++i) {
    const auto w = k_intersective_witness(coloring.classes[i], s, k);
    if (w) return ChromaticWitness{i + 1, *w};
  }
  return std::nullopt;
}

struct GreedyStep {
  char kind = 'b';  // 'b' or 'c'
  std::int64_t value = 0;
  std::int64_t intersection_size = 0;
  std::int64_t rejected = 0;
};

struct GreedyTrace {
  std::vector<GreedyStep> steps;
  SumCertificate certificate;
  bool exhausted = false;  // horizon or candidate budget ran out before target_m
};

struct GreedyOptions {
  std::int64_t backtrack_cap = 10000;  // rejected b-candidates tolerated per step
};

namespace detail {

// One greedy accept step: least b in S with b > min_b such that
// D' = D ∩ (D - b) ∩ ... ∩ (D - kb) keeps an element beyond k*b. The c
// candidates come from `pool` (pass D itself for the dense search).
// Returns false when candidates are exhausted.
struct StepOutcome {
  std::int64_t b = 0;
  std::int64_t c = 0;
  WindowSet next;
  std::int64_t rejected = 0;
  std::int64_t pool_skipped = 0;
};

inline std::optional<StepOutcome> greedy_step(const WindowSet& d, const WindowSet& s,
                                              const WindowSet& pool, std::int64_t k,
                                              std::int64_t min_b, std::int64_t cap) {
  StepOutcome out;
  std::optional<StepOutcome> result;
  s.for_each_member([&](std::int64_t b) {
    if (result || b <= min_b || out.rejected > cap) return;
    // screen: find the least pool element beyond k*b alive in the shifted meet
    std::int64_t chosen = 0, skipped = 0;
    pool.for_each_member([&](std::int64_t x) {
      if (chosen || x > d.horizon()) return;
      if (x <= k * b || !d.contains(x)) {
        ++skipped;
        return;
      }
      for (std::int64_t i = 1; i <= k; ++i)
        if (x + i * b > d.horizon() || !d.contains(x + i * b)) {
          ++skipped;
          return;
        }
      chosen = x;
    });
    if (!chosen) {
      ++out.rejected;
      return;
    }
    std::vector<std::int64_t> shifts;
    for (std::int64_t i = 0; i <= k; ++i) shifts.push_back(i * b);
    out.b = b;
    out.c = chosen;
    out.next = intersect_shifts(d, shifts);
    out.pool_skipped = skipped;
    result = out;
  });
  return result;
}

}  // namespace detail

/// The measure-free transcription of the dense sumset construction: keep a
/// shrinking intersection set D, accept the least b from S whose shifted meet
/// still reaches past k*b, take c as the least such survivor, repeat.
/// Certificates are verified before returning; a failed verification would be
/// a logic error, not a data outcome.
inline GreedyTrace greedy_dense_pair(const WindowSet& a, const WindowSet& s,
                                     const CoefficientProfile& profile, std::int64_t target_m,
                                     const GreedyOptions& opts = {}) {
  if (target_m < 1) throw std::invalid_argument("greedy_dense_pair: target_m must be positive");
  GreedyTrace trace;
  WindowSet d = a;
  std::int64_t floor = 0;
  for (std::int64_t j = 0; j < target_m; ++j) {
    const auto step = detail::greedy_step(d, s, d, profile.k, floor, opts.backtrack_cap);
    if (!step) {
      trace.exhausted = true;
      break;
    }
    d = step->next;
    trace.steps.push_back({'b', step->b, d.size(), step->rejected});
    trace.steps.push_back({'c', step->c, d.size(), step->pool_skipped});
    trace.certificate.b_list.push_back(step->b);
    trace.certificate.c_list.push_back(step->c);
    floor = step->c;
  }
  trace.certificate.verified_m = static_cast<std::int64_t>(trace.certificate.b_list.size());
  if (!trace.certificate.b_list.empty()) {
    CoefficientProfile check = profile;
    check.m = trace.certificate.verified_m;
    if (!verify_certificate(a, trace.certificate, check).passed)
      throw std::logic_error("greedy_dense_pair: produced certificate failed verification");
  }
  if (trace.certificate.verified_m < target_m) trace.exhausted = true;
  return trace;
}

enum class PwsSearchStatus { completed, exhausted, not_piecewise_syndetic };

struct PwsGreedyResult {
  PwsSearchStatus status = PwsSearchStatus::not_piecewise_syndetic;
  std::int64_t scale_n = 0;  // span at which the witness was found (0 if none)
  PwsWitness witness;
  GreedyTrace trace;
};

struct PwsGreedyOptions {
  std::int64_t max_span = 12;
  std::int64_t min_runs = 3;
  GreedyOptions greedy = {};
};

/// Same loop as greedy_dense_pair, but the c's are drawn from the recurring
/// pattern starts certified by pws_witness, mirroring the recurrence-based
/// choice in the piecewise-syndetic construction. Absence of any witness up
/// to max_span is reported as its own status, distinct from exhaustion.
inline PwsGreedyResult greedy_pws_pair(const WindowSet& a, const WindowSet& s,
                                       const CoefficientProfile& profile, std::int64_t target_m,
                                       const PwsGreedyOptions& opts = {}) {
  if (target_m < 1) throw std::invalid_argument("greedy_pws_pair: target_m must be positive");
  PwsGreedyResult result;
  for (std::int64_t n = 1; n <= std::min(opts.max_span, a.horizon() - 1); ++n) {
    const auto w = pws_witness(a, n, opts.min_runs);
    if (w) {
      result.witness = *w;
      result.scale_n = n;
      break;
    }
  }
  if (result.scale_n == 0) return result;

  const WindowSet pool = WindowSet::from_members(a.horizon(), result.witness.run_starts);
  WindowSet d = a;
  std::int64_t floor = 0;
  for (std::int64_t j = 0; j < target_m; ++j) {
    const auto step =
        detail::greedy_step(d, s, pool, profile.k, floor, opts.greedy.backtrack_cap);
    if (!step) break;
    d = step->next;
    result.trace.steps.push_back({'b', step->b, d.size(), step->rejected});
    result.trace.steps.push_back({'c', step->c, d.size(), step->pool_skipped});
    result.trace.certificate.b_list.push_back(step->b);
    result.trace.certificate.c_list.push_back(step->c);
    floor = step->c;
  }
  result.trace.certificate.verified_m =
      static_cast<std::int64_t>(result.trace.certificate.b_list.size());
  if (!result.trace.certificate.b_list.empty()) {
    CoefficientProfile check = profile;
    check.m = result.trace.certificate.verified_m;
    if (!verify_certificate(a, result.trace.certificate, check).passed)
      throw std::logic_error("greedy_pws_pair: produced certificate failed verification");
  }
  result.trace.exhausted = result.trace.certificate.verified_m < target_m;
  result.status =
      result.trace.exhausted ? PwsSearchStatus::exhausted : PwsSearchStatus::completed;
  return result;
}

}  // namespace sumrec
