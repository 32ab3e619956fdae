#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <span>

namespace alex {

struct SearchResult {
  std::size_t pos = 0;
  std::size_t iterations = 0;
};

/// ceil(log2(d + 1)): doubling steps needed to bracket a target d slots away.
inline std::size_t search_iterations_for(std::size_t d) { return std::bit_width(d); }

/// First index i in [0, n] with pred(a[i]) true; index n counts as true.
/// pred must be monotone (false...true). Starts from `start` in [0, n] and
/// probes start+2^k-1 rightwards or start-2^k leftwards; each probe is one
/// iteration, the initial check at start is free.
template <class T, class Pred>
SearchResult exponential_partition(std::span<const T> a, std::size_t start, Pred pred) {
  const std::size_t n = a.size();
  if (start > n) start = n;
  auto val = [&](std::size_t i) { return i >= n || pred(a[i]); };
  SearchResult r;
  std::size_t lo, hi;  // answer in (lo, hi]; lo may be "-1" encoded as npos
  constexpr std::size_t npos = static_cast<std::size_t>(-1);
  if (val(start)) {
    if (start == 0 || !val(start - 1)) return {start, 0};
    hi = start - 1;
    std::size_t off = 2;
    for (;;) {
      ++r.iterations;
      if (off > start) {
        lo = npos;
        break;
      }
      std::size_t idx = start - off;
      if (!val(idx)) {
        lo = idx;
        break;
      }
      hi = idx;
      off *= 2;
    }
  } else {
    lo = start;
    std::size_t off = 1;
    for (;;) {
      ++r.iterations;
      std::size_t idx = start + off;
      if (idx >= n) {
        hi = n;
        break;
      }
      if (val(idx)) {
        hi = idx;
        break;
      }
      lo = idx;
      off = off * 2 + 1;
    }
  }
  std::size_t first = lo + 1;  // wraps npos to 0
  auto it = std::partition_point(a.begin() + first, a.begin() + hi, [&](const T& v) { return !pred(v); });
  r.pos = static_cast<std::size_t>(it - a.begin());
  return r;
}

/// Smallest slot whose key >= target.
template <class Key>
SearchResult exponential_lower_bound(std::span<const Key> a, std::size_t start, Key target) {
  return exponential_partition(a, start, [&](const Key& v) { return !(v < target); });
}

/// Smallest slot whose key > target.
template <class Key>
SearchResult exponential_upper_bound(std::span<const Key> a, std::size_t start, Key target) {
  return exponential_partition(a, start, [&](const Key& v) { return target < v; });
}

/// Binary search for the lower bound restricted to [start-bound, start+bound].
/// Iterations = halving steps, independent of where the target sits.
template <class Key>
SearchResult bounded_binary_lower_bound(std::span<const Key> a, std::size_t start, std::size_t bound,
                                        Key target) {
  std::size_t lo = start > bound ? start - bound : 0;
  std::size_t hi = std::min(a.size(), start + bound + 1);
  SearchResult r;
  std::size_t len = hi - lo;
  while (len > 0) {
    ++r.iterations;
    std::size_t half = len / 2;
    bool right = a[lo + half] < target;  // branch-free
    lo += right ? half + 1 : 0;
    len = right ? len - half - 1 : half;
  }
  r.pos = lo;
  return r;
}

}  // namespace alex
