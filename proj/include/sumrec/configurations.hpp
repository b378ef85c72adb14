#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sumrec/window_set.hpp"

namespace sumrec {

/// Coefficient bounds for sum configurations: m terms, coefficients in
/// [0, k] or [1, k] depending on zero_allowed. Both readings occur in the
/// source material; zero_allowed=true is the default since zero-coefficient
/// sums subsume the smaller configurations.
struct CoefficientProfile {
  std::int64_t k = 1;
  std::int64_t m = 1;
  bool zero_allowed = true;
};

/// The three readings of the bounded-coefficient sum family over a term list:
///   zero_allowed          coefficients 0..k over the full list
///   positive_full         coefficients 1..k over the full list
///   positive_subsequences coefficients 1..k over every nonempty subsequence
enum class SumConvention { zero_allowed, positive_full, positive_subsequences };

/// Interleaved prefixes b_1 < c_1 < b_2 < c_2 < ... with every configuration
/// sum checked against the host set up to verified_m terms.
struct SumCertificate {
  std::vector<std::int64_t> b_list;
  std::vector<std::int64_t> c_list;
  std::int64_t verified_m = 0;
  std::string a_id;  // provenance labels for serialized certificates
  std::string s_id;
};

/// Strict alternation b_1 < c_1 < b_2 < c_2 < ..., which the greedy builders
/// guarantee. The verifier itself only needs both lists sorted; it pairs each
/// c with the b's below it.
inline bool certificate_interleaved(const SumCertificate& cert) {
  if (cert.b_list.size() != cert.c_list.size()) return false;
  std::int64_t prev = 0;
  for (std::size_t j = 0; j < cert.b_list.size(); ++j) {
    if (cert.b_list[j] <= prev) return false;
    if (cert.c_list[j] <= cert.b_list[j]) return false;
    prev = cert.c_list[j];
  }
  return true;
}

inline bool certificate_sorted(const SumCertificate& cert) {
  for (const auto* list : {&cert.b_list, &cert.c_list}) {
    std::int64_t prev = 0;
    for (std::int64_t v : *list) {
      if (v <= prev) return false;
      prev = v;
    }
  }
  return true;
}

namespace detail {

inline std::int64_t checked_weighted_sum(const std::vector<std::int64_t>& coeffs,
                                         const std::vector<std::int64_t>& terms,
                                         std::int64_t base) {
  std::int64_t acc = base;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    std::int64_t part = 0;
    if (__builtin_mul_overflow(coeffs[i], terms[i], &part) ||
        __builtin_add_overflow(acc, part, &acc))
      throw std::overflow_error("configuration sum exceeds 64 bits");
  }
  return acc;
}

/// Odometer over coefficient vectors (lexicographic, leftmost significant),
/// lo..hi per slot. Calls fn(coeffs) for every vector.
template <typename Fn>
void for_each_vector(std::size_t slots, std::int64_t lo, std::int64_t hi, Fn&& fn) {
  std::vector<std::int64_t> coeffs(slots, lo);
  while (true) {
    fn(coeffs);
    std::size_t i = slots;
    while (i > 0) {
      --i;
      if (coeffs[i] < hi) {
        ++coeffs[i];
        std::fill(coeffs.begin() + static_cast<std::ptrdiff_t>(i) + 1, coeffs.end(), lo);
        break;
      }
      if (i == 0) return;
    }
    if (slots == 0) return;
  }
}

inline void guard_enumeration_size(std::size_t slots, std::int64_t k) {
  long double total = 1;
  for (std::size_t i = 0; i < slots; ++i) total *= static_cast<long double>(k + 1);
  if (total > 2e7L)
    throw std::invalid_argument("configuration family too large to enumerate exactly");
}

}  // namespace detail

/// All sums i_1 t_{j_1} + ... over the term list under the chosen convention,
/// duplicates collapsed. Terms must be strictly increasing and positive.
inline std::vector<std::int64_t> family_sums(const std::vector<std::int64_t>& t_list, std::int64_t k,
                                         SumConvention conv) {
  if (t_list.empty()) throw std::invalid_argument("family_sums: empty term list");
  if (k < 1) throw std::invalid_argument("family_sums: k must be positive");
  std::int64_t prev = 0;
  for (std::int64_t t : t_list) {
    if (t <= prev) throw std::invalid_argument("family_sums: terms must be strictly increasing");
    prev = t;
  }
  detail::guard_enumeration_size(t_list.size(), k);
  std::vector<std::int64_t> sums;
  if (conv == SumConvention::positive_subsequences) {
    const std::size_t n = t_list.size();
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
      std::vector<std::int64_t> sel;
      for (std::size_t j = 0; j < n; ++j)
        if (mask >> j & 1) sel.push_back(t_list[j]);
      detail::for_each_vector(sel.size(), 1, k, [&](const std::vector<std::int64_t>& coeffs) {
        sums.push_back(detail::checked_weighted_sum(coeffs, sel, 0));
      });
    }
  } else {
    const std::int64_t lo = conv == SumConvention::zero_allowed ? 0 : 1;
    detail::for_each_vector(t_list.size(), lo, k, [&](const std::vector<std::int64_t>& coeffs) {
      sums.push_back(detail::checked_weighted_sum(coeffs, t_list, 0));
    });
  }
  std::sort(sums.begin(), sums.end());
  sums.erase(std::unique(sums.begin(), sums.end()), sums.end());
  return sums;
}

inline std::vector<std::int64_t> family_sums(const std::vector<std::int64_t>& t_list, std::int64_t k,
                                         bool zero_allowed) {
  return family_sums(t_list, k, zero_allowed ? SumConvention::zero_allowed : SumConvention::positive_full);
}

/// Configuration sums for one (b-selection, c): { sum i_j b_j + c } with the
/// profile's coefficient bounds. The selection must sit strictly below c.
inline std::vector<std::int64_t> config_sums(const std::vector<std::int64_t>& b_select,
                                             std::int64_t c, const CoefficientProfile& profile) {
  if (b_select.empty()) throw std::invalid_argument("config_sums: empty selection");
  if (profile.k < 1) throw std::invalid_argument("config_sums: k must be positive");
  std::int64_t prev = 0;
  for (std::int64_t b : b_select) {
    if (b <= prev) throw std::invalid_argument("config_sums: selection must be strictly increasing");
    prev = b;
  }
  if (b_select.back() >= c)
    throw std::invalid_argument("config_sums: interleaving violated (max b must be < c)");
  detail::guard_enumeration_size(b_select.size(), profile.k);
  std::vector<std::int64_t> sums;
  const std::int64_t lo = profile.zero_allowed ? 0 : 1;
  detail::for_each_vector(b_select.size(), lo, profile.k,
                          [&](const std::vector<std::int64_t>& coeffs) {
                            sums.push_back(detail::checked_weighted_sum(coeffs, b_select, c));
                          });
  std::sort(sums.begin(), sums.end());
  sums.erase(std::unique(sums.begin(), sums.end()), sums.end());
  return sums;
}

struct CertificateViolation {
  std::int64_t c = 0;
  std::vector<std::int64_t> b_selection;
  std::vector<std::int64_t> coefficients;
  std::int64_t sum = 0;
};

struct CertificateReport {
  bool passed = true;
  std::int64_t checked = 0;
  std::int64_t untestable = 0;  // sums beyond the horizon: not failures
  std::optional<CertificateViolation> first_violation;
};

/// Exhaustive membership check of every configuration sum of the certificate
/// in A, for all selection sizes up to profile.m. Enumeration order (c
/// ascending, then selection size, then selection, then coefficient vector)
/// fixes which violation is reported first.
inline CertificateReport verify_certificate(const WindowSet& a, const SumCertificate& cert,
                                            const CoefficientProfile& profile) {
  if (!certificate_sorted(cert))
    throw std::invalid_argument("verify_certificate: member lists must be strictly increasing");
  CertificateReport rep;
  const std::int64_t lo = profile.zero_allowed ? 0 : 1;
  for (std::int64_t c : cert.c_list) {
    std::vector<std::int64_t> usable;
    for (std::int64_t b : cert.b_list)
      if (b < c) usable.push_back(b);
    const std::int64_t max_m =
        std::min<std::int64_t>(profile.m, static_cast<std::int64_t>(usable.size()));
    for (std::int64_t m_sel = 1; m_sel <= max_m; ++m_sel) {
      // selections as lexicographic index combinations
      std::vector<std::size_t> idx(static_cast<std::size_t>(m_sel));
      for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
      while (true) {
        std::vector<std::int64_t> sel;
        for (std::size_t i : idx) sel.push_back(usable[i]);
        bool stop = false;
        detail::for_each_vector(sel.size(), lo, profile.k,
                                [&](const std::vector<std::int64_t>& coeffs) {
                                  if (stop) return;
                                  const std::int64_t s = detail::checked_weighted_sum(coeffs, sel, c);
                                  if (s > a.horizon()) {
                                    ++rep.untestable;
                                    return;
                                  }
                                  ++rep.checked;
                                  if (!a.contains(s) && rep.passed) {
                                    rep.passed = false;
                                    rep.first_violation = CertificateViolation{c, sel, coeffs, s};
                                    stop = true;
                                  }
                                });
        if (rep.first_violation) return rep;
        // next combination
        std::size_t i = idx.size();
        bool advanced = false;
        while (i > 0) {
          --i;
          if (idx[i] + (idx.size() - i) < usable.size()) {
            ++idx[i];
            for (std::size_t j = i + 1; j < idx.size(); ++j) idx[j] = idx[j - 1] + 1;
            advanced = true;
            break;
          }
        }
        if (!advanced) break;
      }
    }
  }
  return rep;
}

}  // namespace sumrec
