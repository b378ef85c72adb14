#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace sumrec {

/// A finite window of the naturals: a set of integers inside [1, horizon].
/// Everything downstream (densities, witnesses, certificates) is stated
/// relative to the horizon, never extrapolated past it.
///
/// Storage is either a bitmap ("dense") or a sorted member list ("sparse");
/// the representation is chosen automatically and is invisible to equality
/// and every operation.
class WindowSet {
public:
  WindowSet() : horizon_(0), dense_(false) {}

  static WindowSet from_members(std::int64_t horizon, std::vector<std::int64_t> members) {
    validate(horizon, members);
    WindowSet s;
    s.horizon_ = horizon;
    if (should_be_dense(horizon, static_cast<std::int64_t>(members.size()))) {
      s.dense_ = true;
      s.bits_.assign(static_cast<std::size_t>((horizon + 63) / 64), 0);
      for (std::int64_t m : members) s.bits_[word(m)] |= mask(m);
    } else {
      s.dense_ = false;
      s.members_ = std::move(members);
    }
    return s;
  }

  static WindowSet from_predicate(std::int64_t horizon,
                                  const std::function<bool(std::int64_t)>& pred) {
    std::vector<std::int64_t> m;
    for (std::int64_t i = 1; i <= horizon; ++i)
      if (pred(i)) m.push_back(i);
    return from_members(horizon, std::move(m));
  }

  static WindowSet empty_set(std::int64_t horizon) { return from_members(horizon, {}); }

  static WindowSet full(std::int64_t horizon) {
    std::vector<std::int64_t> m(static_cast<std::size_t>(horizon));
    for (std::int64_t i = 1; i <= horizon; ++i) m[static_cast<std::size_t>(i - 1)] = i;
    return from_members(horizon, std::move(m));
  }

  std::int64_t horizon() const { return horizon_; }
  bool is_dense() const { return dense_; }

  bool contains(std::int64_t x) const {
    if (x < 1 || x > horizon_) return false;
    if (dense_) return (bits_[word(x)] & mask(x)) != 0;
    return std::binary_search(members_.begin(), members_.end(), x);
  }

  std::int64_t size() const {
    if (!dense_) return static_cast<std::int64_t>(members_.size());
    std::int64_t c = 0;
    for (std::uint64_t w : bits_) c += __builtin_popcountll(w);
    return c;
  }

  bool empty() const { return size() == 0; }

  std::vector<std::int64_t> members() const {
    if (!dense_) return members_;
    std::vector<std::int64_t> out;
    out.reserve(static_cast<std::size_t>(size()));
    for_each_member([&](std::int64_t m) { out.push_back(m); });
    return out;
  }

  template <typename Fn>
  void for_each_member(Fn&& fn) const {
    if (!dense_) {
      for (std::int64_t m : members_) fn(m);
      return;
    }
    for (std::size_t w = 0; w < bits_.size(); ++w) {
      std::uint64_t x = bits_[w];
      while (x) {
        const int b = __builtin_ctzll(x);
        fn(static_cast<std::int64_t>(w * 64 + static_cast<std::size_t>(b)) + 1);
        x &= x - 1;
      }
    }
  }

  std::int64_t min_member() const {  // 0 when empty
    if (!dense_) return members_.empty() ? 0 : members_.front();
    for (std::size_t w = 0; w < bits_.size(); ++w)
      if (bits_[w]) return static_cast<std::int64_t>(w * 64) + __builtin_ctzll(bits_[w]) + 1;
    return 0;
  }

  std::int64_t max_member() const {  // 0 when empty
    if (!dense_) return members_.empty() ? 0 : members_.back();
    for (std::size_t w = bits_.size(); w-- > 0;)
      if (bits_[w]) return static_cast<std::int64_t>(w * 64) + 63 - __builtin_clzll(bits_[w]) + 1;
    return 0;
  }

  /// |A ∩ [lo, hi]|, bounds clamped to the window.
  std::int64_t count_in(std::int64_t lo, std::int64_t hi) const {
    lo = std::max<std::int64_t>(lo, 1);
    hi = std::min(hi, horizon_);
    if (lo > hi) return 0;
    if (!dense_) {
      return std::upper_bound(members_.begin(), members_.end(), hi) -
             std::lower_bound(members_.begin(), members_.end(), lo);
    }
    std::int64_t c = 0;
    for (std::int64_t i = lo; i <= hi;) {
      if (i % 64 == 1 && i + 63 <= hi) {
        c += __builtin_popcountll(bits_[word(i)]);
        i += 64;
      } else {
        c += contains(i) ? 1 : 0;
        ++i;
      }
    }
    return c;
  }

  std::int64_t prefix_count(std::int64_t n) const { return count_in(1, n); }

  WindowSet restrict_to(std::int64_t new_horizon) const {
    if (new_horizon < 0) new_horizon = 0;
    std::vector<std::int64_t> m;
    for_each_member([&](std::int64_t x) {
      if (x <= new_horizon) m.push_back(x);
    });
    return from_members(new_horizon, std::move(m));
  }

  friend bool operator==(const WindowSet& a, const WindowSet& b) {
    if (a.horizon_ != b.horizon_ || a.size() != b.size()) return false;
    return a.members() == b.members();
  }
  friend bool operator!=(const WindowSet& a, const WindowSet& b) { return !(a == b); }

private:
  static bool should_be_dense(std::int64_t horizon, std::int64_t count) {
    return horizon > 0 && count > horizon / 64;
  }
  static void validate(std::int64_t horizon, const std::vector<std::int64_t>& members) {
    if (horizon < 0) throw std::invalid_argument("WindowSet: negative horizon");
    std::int64_t prev = 0;
    for (std::int64_t m : members) {
      if (m <= prev) throw std::invalid_argument("WindowSet: members not strictly increasing");
      if (m > horizon) throw std::invalid_argument("WindowSet: member beyond horizon");
      prev = m;
    }
  }
  static std::size_t word(std::int64_t m) { return static_cast<std::size_t>((m - 1) / 64); }
  static std::uint64_t mask(std::int64_t m) { return std::uint64_t{1} << ((m - 1) % 64); }

  std::int64_t horizon_;
  bool dense_;
  std::vector<std::uint64_t> bits_;
  std::vector<std::int64_t> members_;
};

/// Finite 0/1 word, positions 1..length. Position i mirrors integer i of the
/// window it was built from.
class BinaryWord {
public:
  BinaryWord() : length_(0) {}
  explicit BinaryWord(std::int64_t length)
      : length_(length), bits_(static_cast<std::size_t>((length + 63) / 64), 0) {
    if (length < 0) throw std::invalid_argument("BinaryWord: negative length");
  }
  static BinaryWord from_string(const std::string& s) {
    BinaryWord w(static_cast<std::int64_t>(s.size()));
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '1')
        w.set(static_cast<std::int64_t>(i) + 1, true);
      else if (s[i] != '0')
        throw std::invalid_argument("BinaryWord: characters must be 0 or 1");
    }
    return w;
  }

  std::int64_t length() const { return length_; }
  bool bit(std::int64_t i) const {
    check(i);
    return (bits_[static_cast<std::size_t>((i - 1) / 64)] >> ((i - 1) % 64)) & 1;
  }
  void set(std::int64_t i, bool v) {
    check(i);
    const std::uint64_t m = std::uint64_t{1} << ((i - 1) % 64);
    if (v)
      bits_[static_cast<std::size_t>((i - 1) / 64)] |= m;
    else
      bits_[static_cast<std::size_t>((i - 1) / 64)] &= ~m;
  }
  std::int64_t ones_count() const {
    std::int64_t c = 0;
    for (std::uint64_t w : bits_) c += __builtin_popcountll(w);
    return c;
  }
  std::string str() const {
    std::string s(static_cast<std::size_t>(length_), '0');
    for (std::int64_t i = 1; i <= length_; ++i)
      if (bit(i)) s[static_cast<std::size_t>(i - 1)] = '1';
    return s;
  }
  friend bool operator==(const BinaryWord& a, const BinaryWord& b) {
    return a.length_ == b.length_ && a.bits_ == b.bits_;
  }
  friend bool operator!=(const BinaryWord& a, const BinaryWord& b) { return !(a == b); }

private:
  void check(std::int64_t i) const {
    if (i < 1 || i > length_) throw std::out_of_range("BinaryWord: index outside [1, length]");
  }
  std::int64_t length_;
  std::vector<std::uint64_t> bits_;
};

inline BinaryWord to_word(const WindowSet& a) {
  BinaryWord w(a.horizon());
  a.for_each_member([&](std::int64_t m) { w.set(m, true); });
  return w;
}

inline WindowSet from_word(const BinaryWord& w) {
  std::vector<std::int64_t> m;
  for (std::int64_t i = 1; i <= w.length(); ++i)
    if (w.bit(i)) m.push_back(i);
  return WindowSet::from_members(w.length(), std::move(m));
}

/// A - t = {a - t : a in A, a - t >= 1}, horizon shrinks by t (floored at 0).
inline WindowSet shift_back(const WindowSet& a, std::int64_t t) {
  if (t < 0) throw std::invalid_argument("shift_back: t must be nonnegative");
  const std::int64_t h = std::max<std::int64_t>(a.horizon() - t, 0);
  std::vector<std::int64_t> m;
  a.for_each_member([&](std::int64_t x) {
    if (x - t >= 1) m.push_back(x - t);
  });
  return WindowSet::from_members(h, std::move(m));
}

/// Meet of the shifted copies A - n over n in ns; horizon = A.horizon - max(ns).
inline WindowSet intersect_shifts(const WindowSet& a, const std::vector<std::int64_t>& ns) {
  if (ns.empty()) throw std::invalid_argument("intersect_shifts: empty shift list");
  std::int64_t max_n = 0;
  for (std::int64_t n : ns) {
    if (n < 0) throw std::invalid_argument("intersect_shifts: negative shift");
    max_n = std::max(max_n, n);
  }
  const std::int64_t h = std::max<std::int64_t>(a.horizon() - max_n, 0);
  std::vector<std::int64_t> m;
  for (std::int64_t x = 1; x <= h; ++x) {
    bool all = true;
    for (std::int64_t n : ns)
      if (!a.contains(x + n)) {
        all = false;
        break;
      }
    if (all) m.push_back(x);
  }
  return WindowSet::from_members(h, std::move(m));
}

inline WindowSet intersect(const WindowSet& a, const WindowSet& b) {
  const std::int64_t h = std::min(a.horizon(), b.horizon());
  std::vector<std::int64_t> m;
  const WindowSet& smaller = a.size() <= b.size() ? a : b;
  const WindowSet& other = a.size() <= b.size() ? b : a;
  smaller.for_each_member([&](std::int64_t x) {
    if (x <= h && other.contains(x)) m.push_back(x);
  });
  return WindowSet::from_members(h, std::move(m));
}

inline WindowSet unite(const WindowSet& a, const WindowSet& b) {
  const std::int64_t h = std::max(a.horizon(), b.horizon());
  std::vector<std::int64_t> m = a.members();
  std::vector<std::int64_t> mb = b.members();
  std::vector<std::int64_t> out;
  std::set_union(m.begin(), m.end(), mb.begin(), mb.end(), std::back_inserter(out));
  return WindowSet::from_members(h, std::move(out));
}

inline WindowSet complement(const WindowSet& a) {
  std::vector<std::int64_t> m;
  for (std::int64_t i = 1; i <= a.horizon(); ++i)
    if (!a.contains(i)) m.push_back(i);
  return WindowSet::from_members(a.horizon(), std::move(m));
}

/// All finite sums of distinct generators that stay within the horizon.
/// Generators must be strictly increasing positive integers.
inline WindowSet gen_fs(const std::vector<std::int64_t>& generators, std::int64_t horizon) {
  if (generators.empty()) throw std::invalid_argument("gen_fs: empty generator list");
  std::int64_t prev = 0;
  for (std::int64_t g : generators) {
    if (g <= prev) throw std::invalid_argument("gen_fs: generators must be strictly increasing");
    prev = g;
  }
  std::vector<std::int64_t> sums;
  // Depth-first over subsets; generators are ascending so a branch dies as
  // soon as the next generator no longer fits.
  std::function<void(std::size_t, std::int64_t)> walk = [&](std::size_t i, std::int64_t acc) {
    if (acc > 0) sums.push_back(acc);
    for (std::size_t j = i; j < generators.size(); ++j) {
      if (acc > horizon - generators[j]) break;
      walk(j + 1, acc + generators[j]);
    }
  };
  walk(0, 0);
  std::sort(sums.begin(), sums.end());
  sums.erase(std::unique(sums.begin(), sums.end()), sums.end());
  return WindowSet::from_members(horizon, std::move(sums));
}

/// Powers 4^1, 4^2, ... up to the bound.
inline std::vector<std::int64_t> powers_of_four(std::int64_t bound) {
  std::vector<std::int64_t> out;
  for (std::int64_t p = 4; p <= bound; p *= 4) {
    out.push_back(p);
    if (p > bound / 4) break;
  }
  return out;
}

inline WindowSet gen_squares(std::int64_t horizon) {
  std::vector<std::int64_t> m;
  for (std::int64_t n = 1; n * n <= horizon; ++n) m.push_back(n * n);
  return WindowSet::from_members(horizon, std::move(m));
}

namespace detail {

/// Decides d < ln(k) for integer d >= 0 without trusting float equality:
/// equivalent to e^d < k, checked against an interval around expl(d). ln(k)
/// is irrational for k >= 2, so the comparison is never on the boundary; if
/// k ever lands inside the error band the call refuses rather than guesses.
inline bool int_below_log(std::int64_t d, std::int64_t k) {
  if (k <= 1) return false;  // ln(1) = 0, no d >= 0 is below it
  const long double v = expl(static_cast<long double>(d));
  const long double lo = v * (1.0L - 1e-15L);
  const long double hi = v * (1.0L + 1e-15L);
  const long double kk = static_cast<long double>(k);
  if (kk > hi) return true;
  if (kk < lo) return false;
  throw std::logic_error("int_below_log: comparison inside the error band");
}

/// Largest integer d with d < ln(k); -1 when the interval catches no integer.
inline std::int64_t max_radius_below_log(std::int64_t k) {
  std::int64_t d = -1;
  while (int_below_log(d + 1, k)) ++d;
  return d;
}

}  // namespace detail

/// [1, horizon] minus every integer strictly inside (k^2 - ln k, k^2 + ln k).
/// Membership is decided by exact integer-vs-log comparison, so results are
/// reproducible bit for bit.
inline WindowSet gen_punctured_complement(std::int64_t horizon) {
  if (horizon < 1) throw std::invalid_argument("gen_punctured_complement: horizon must be >= 1");
  std::vector<bool> removed(static_cast<std::size_t>(horizon) + 1, false);
  for (std::int64_t k = 1;; ++k) {
    const std::int64_t sq = k * k;
    const std::int64_t d = detail::max_radius_below_log(k);
    if (sq - d > horizon) break;
    if (d < 0) continue;
    const std::int64_t lo = std::max<std::int64_t>(sq - d, 1);
    const std::int64_t hi = std::min(sq + d, horizon);
    for (std::int64_t m = lo; m <= hi; ++m) removed[static_cast<std::size_t>(m)] = true;
  }
  std::vector<std::int64_t> m;
  for (std::int64_t i = 1; i <= horizon; ++i)
    if (!removed[static_cast<std::size_t>(i)]) m.push_back(i);
  return WindowSet::from_members(horizon, std::move(m));
}

// --- text formats ---
// Sets: a "horizon=<H>" line, then one ascending decimal member per line.
// Words: a single line of 0/1 characters.

inline void write_set(std::ostream& os, const WindowSet& a) {
  os << "horizon=" << a.horizon() << "\n";
  a.for_each_member([&](std::int64_t m) { os << m << "\n"; });
}

inline WindowSet read_set(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("horizon=", 0) != 0)
    throw std::invalid_argument("read_set: missing horizon header");
  const std::int64_t horizon = std::stoll(line.substr(8));
  std::vector<std::int64_t> m;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    m.push_back(std::stoll(line));
  }
  return WindowSet::from_members(horizon, std::move(m));
}

inline void write_word(std::ostream& os, const BinaryWord& w) { os << w.str() << "\n"; }

inline BinaryWord read_word(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("read_word: empty input");
  return BinaryWord::from_string(line);
}

}  // namespace sumrec
