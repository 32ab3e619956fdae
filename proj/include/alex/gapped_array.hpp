#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "alex/errors.hpp"
#include "alex/exponential_search.hpp"
#include "alex/linear_model.hpp"

namespace alex {

template <class Key>
constexpr Key sentinel_key() {
  return std::numeric_limits<Key>::max();
}

/// Occupancy bits with word-at-a-time next/prev searches.
class Bitmap {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  Bitmap() = default;
  explicit Bitmap(std::size_t bits) : bits_(bits), words_((bits + 63) / 64, 0) {}

  std::size_t size() const { return bits_; }
  std::size_t words() const { return words_.size(); }
  std::size_t bytes() const { return words_.size() * sizeof(std::uint64_t); }

  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
  void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void reset(std::size_t i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += std::popcount(w);
    return c;
  }

  /// First set bit >= i, or size().
  std::size_t next_set(std::size_t i) const { return next_impl(i, false); }
  /// First clear bit >= i, or size().
  std::size_t next_clear(std::size_t i) const { return next_impl(i, true); }
  /// Last set bit < i, or npos.
  std::size_t prev_set(std::size_t i) const { return prev_impl(i, false); }
  /// Last clear bit < i, or npos.
  std::size_t prev_clear(std::size_t i) const { return prev_impl(i, true); }

  /// Grow to `bits`, new bits clear.
  void resize(std::size_t bits) {
    // clear any stale bits past the old end before widening
    if (bits_ % 64 && !words_.empty()) words_.back() &= (std::uint64_t{1} << (bits_ % 64)) - 1;
    bits_ = bits;
    words_.resize((bits + 63) / 64, 0);
  }

 private:
  std::uint64_t word(std::size_t w, bool invert) const {
    std::uint64_t v = invert ? ~words_[w] : words_[w];
    if (w == words_.size() - 1 && bits_ % 64) v &= (std::uint64_t{1} << (bits_ % 64)) - 1;
    return v;
  }

  std::size_t next_impl(std::size_t i, bool invert) const {
    if (i >= bits_) return bits_;
    std::size_t w = i >> 6;
    std::uint64_t v = word(w, invert) & (~std::uint64_t{0} << (i & 63));
    while (true) {
      if (v) return std::min(bits_, (w << 6) + std::countr_zero(v));
      if (++w >= words_.size()) return bits_;
      v = word(w, invert);
    }
  }

  std::size_t prev_impl(std::size_t i, bool invert) const {
    if (i == 0) return npos;
    if (i > bits_) i = bits_;
    std::size_t j = i - 1;
    std::size_t w = j >> 6;
    unsigned sh = 63 - (j & 63);
    std::uint64_t v = (word(w, invert) << sh) >> sh;
    while (true) {
      if (v) return (w << 6) + 63 - std::countl_zero(v);
      if (w == 0) return npos;
      v = word(--w, invert);
    }
  }

  std::size_t bits_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Model-based slot for each sorted key: max(predicted, previous + 1), with the
/// tail packed against the end when it would overflow.
template <class Key>
std::vector<std::size_t> placement_positions(std::span<const Key> keys, const LinearModel& model,
                                             std::size_t capacity) {
  std::size_t n = keys.size();
  if (capacity < n) throw std::invalid_argument("capacity smaller than key count");
  std::vector<std::size_t> pos(n);
  std::size_t next_free = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t p = std::max(predict(model, keys[i], capacity), next_free);
    p = std::min(p, capacity - (n - i));
    pos[i] = p;
    next_free = p + 1;
  }
  return pos;
}

/// Sorted slot array with gaps. Gaps hold the key of the closest occupied slot
/// to their right (sentinel past the last key), so the key array is
/// non-decreasing and searches never look at the bitmap.
template <class Key, class Payload>
class GappedArray {
 public:
  GappedArray() = default;
  explicit GappedArray(std::size_t capacity)
      : keys_(capacity, sentinel_key<Key>()), payloads_(capacity), bitmap_(capacity) {}

  static GappedArray build_model_based(std::span<const Key> keys, std::span<const Payload> payloads,
                                       const LinearModel& model, std::size_t capacity) {
    if (keys.size() != payloads.size()) throw std::invalid_argument("keys/payloads length mismatch");
    if (capacity < keys.size() || capacity == 0) throw std::invalid_argument("capacity smaller than key count");
    GappedArray a(capacity);
    auto pos = placement_positions(keys, model, capacity);
    for (std::size_t i = 0; i < keys.size(); ++i) {
      a.keys_[pos[i]] = keys[i];
      a.payloads_[pos[i]] = payloads[i];
      a.bitmap_.set(pos[i]);
    }
    a.num_keys_ = keys.size();
    a.refill_all();
    return a;
  }

  std::size_t capacity() const { return keys_.size(); }
  std::size_t size() const { return num_keys_; }
  bool empty() const { return num_keys_ == 0; }
  bool occupied(std::size_t i) const { return bitmap_.test(i); }
  const Key& key_at(std::size_t i) const { return keys_[i]; }
  Payload& payload_at(std::size_t i) { return payloads_[i]; }
  const Payload& payload_at(std::size_t i) const { return payloads_[i]; }
  std::span<const Key> keys() const { return keys_; }
  const Bitmap& bitmap() const { return bitmap_; }

  std::size_t first_occupied() const { return bitmap_.next_set(0); }
  std::size_t next_occupied(std::size_t i) const { return bitmap_.next_set(i); }
  std::size_t last_occupied() const { return bitmap_.prev_set(capacity()); }

  SearchResult lower_bound(std::size_t start, Key key) const {
    return exponential_lower_bound<Key>(keys_, start, key);
  }
  SearchResult upper_bound(std::size_t start, Key key) const {
    return exponential_upper_bound<Key>(keys_, start, key);
  }

  struct FindResult {
    std::size_t pos;  // slot holding key, or upper bound when absent
    std::size_t iterations;
    bool found;
  };

  /// Upper-bound search from predicted+1; the slot just before it holds the key
  /// if present (a gap there would hold a larger key).
  FindResult find(Key key, std::size_t predicted) const {
    SearchResult r = upper_bound(predicted + 1, key);
    if (r.pos > 0 && keys_[r.pos - 1] == key) return {r.pos - 1, r.iterations, true};
    return {r.pos, r.iterations, false};
  }

  /// Slot to insert an absent key, given its upper bound ub. Returns a gap in
  /// [ub, next occupied) closest to predicted, or the next occupied slot (or
  /// capacity) when no gap is available there. A prediction that fell off
  /// either end of the array lands next to the existing keys.
  std::size_t insert_slot(std::size_t ub, std::size_t predicted, double raw_prediction) const {
    std::size_t cap = capacity();
    std::size_t r = ub < cap ? bitmap_.next_set(ub) : cap;
    if (r == ub) return ub;
    if (raw_prediction >= static_cast<double>(cap)) return ub;
    if (raw_prediction < 0.0) return r - 1;
    return std::clamp(predicted, ub, r - 1);
  }

  /// Insert at pos (a gap, an occupied slot to displace, or capacity).
  /// Returns the number of elements moved.
  std::size_t insert_at(std::size_t pos, const Key& key, const Payload& payload) {
    std::size_t cap = capacity();
    if (num_keys_ >= cap) throw capacity_error("gapped array is full");
    if (pos > cap) throw std::out_of_range("insert position past capacity");
    if (pos < cap && !bitmap_.test(pos)) {
      place(pos, key, payload);
      return 0;
    }
    std::size_t gr = pos < cap ? bitmap_.next_clear(pos) : cap;
    std::size_t gl = bitmap_.prev_clear(pos);
    bool has_r = gr < cap, has_l = gl != Bitmap::npos;
    bool go_right = has_r && (!has_l || gr - pos <= pos - gl);
    std::size_t shifts;
    if (go_right) {
      std::move_backward(keys_.begin() + pos, keys_.begin() + gr, keys_.begin() + gr + 1);
      std::move_backward(payloads_.begin() + pos, payloads_.begin() + gr, payloads_.begin() + gr + 1);
      bitmap_.set(gr);
      keys_[pos] = key;
      payloads_[pos] = payload;
      ++num_keys_;
      fill_gaps_before(pos, key);
      shifts = gr - pos;
    } else {
      std::move(keys_.begin() + gl + 1, keys_.begin() + pos, keys_.begin() + gl);
      std::move(payloads_.begin() + gl + 1, payloads_.begin() + pos, payloads_.begin() + gl);
      bitmap_.set(gl);
      keys_[pos - 1] = key;
      payloads_[pos - 1] = payload;
      ++num_keys_;
      fill_gaps_before(gl, keys_[gl]);
      shifts = pos - 1 - gl;
    }
    return shifts;
  }

  void erase_at(std::size_t pos) {
    if (pos >= capacity() || !bitmap_.test(pos)) throw std::invalid_argument("erase_at: slot not occupied");
    bitmap_.reset(pos);
    --num_keys_;
    Key fill = pos + 1 < capacity() ? keys_[pos + 1] : sentinel_key<Key>();
    keys_[pos] = fill;
    payloads_[pos] = Payload{};
    fill_gaps_before(pos, fill);
  }

  /// Visit occupied slots from `from` in order until f returns false.
  template <class F>
  void scan(std::size_t from, F&& f) const {
    for (std::size_t i = bitmap_.next_set(from); i < capacity(); i = bitmap_.next_set(i + 1))
      if (!f(keys_[i], payloads_[i])) return;
  }

  std::vector<std::pair<Key, Payload>> scan_count(std::size_t from, std::size_t limit) const {
    std::vector<std::pair<Key, Payload>> out;
    if (limit == 0) return out;
    scan(from, [&](const Key& k, const Payload& p) {
      out.emplace_back(k, p);
      return out.size() < limit;
    });
    return out;
  }

  std::vector<std::pair<Key, Payload>> scan_until(std::size_t from, const Key& end_exclusive) const {
    std::vector<std::pair<Key, Payload>> out;
    scan(from, [&](const Key& k, const Payload& p) {
      if (!(k < end_exclusive)) return false;
      out.emplace_back(k, p);
      return true;
    });
    return out;
  }

  void extract(std::vector<Key>& keys, std::vector<Payload>& payloads) const {
    keys.reserve(keys.size() + num_keys_);
    payloads.reserve(payloads.size() + num_keys_);
    scan(0, [&](const Key& k, const Payload& p) {
      keys.push_back(k);
      payloads.push_back(p);
      return true;
    });
  }

  /// Add `extra` empty slots on the right. Existing slots keep their index.
  void grow_right(std::size_t extra) {
    std::size_t cap = capacity();
    keys_.resize(cap + extra, sentinel_key<Key>());
    payloads_.resize(cap + extra);
    bitmap_.resize(cap + extra);
  }

  /// Add `extra` empty slots on the left. Existing slots move right by extra.
  void grow_left(std::size_t extra) {
    std::size_t cap = capacity();
    GappedArray g(cap + extra);
    std::copy(keys_.begin(), keys_.end(), g.keys_.begin() + extra);
    std::move(payloads_.begin(), payloads_.end(), g.payloads_.begin() + extra);
    for (std::size_t i = bitmap_.next_set(0); i < cap; i = bitmap_.next_set(i + 1)) g.bitmap_.set(i + extra);
    g.num_keys_ = num_keys_;
    Key fill = cap ? keys_[0] : sentinel_key<Key>();
    std::fill(g.keys_.begin(), g.keys_.begin() + extra, fill);
    *this = std::move(g);
  }

  std::size_t slot_bytes() const { return capacity() * (sizeof(Key) + sizeof(Payload)); }
  std::size_t bitmap_bytes() const { return bitmap_.bytes(); }

  /// Empty string when every invariant holds, otherwise a description.
  std::string audit() const {
    std::size_t cap = capacity();
    if (payloads_.size() != cap || bitmap_.size() != cap) return "slot array lengths disagree";
    if (bitmap_.count() != num_keys_)
      return "popcount " + std::to_string(bitmap_.count()) + " != num_keys " + std::to_string(num_keys_);
    Key fill = sentinel_key<Key>();
    bool have_next = false;
    Key next_occ{};
    for (std::size_t i = cap; i-- > 0;) {
      if (bitmap_.test(i)) {
        if (have_next && !(keys_[i] < next_occ))
          return "occupied keys not strictly increasing at slot " + std::to_string(i);
        next_occ = keys_[i];
        have_next = true;
        fill = keys_[i];
      } else if (!(keys_[i] == fill)) {
        return "gap slot " + std::to_string(i) + " does not hold the next key to its right";
      }
    }
    return {};
  }

 private:
  void place(std::size_t pos, const Key& key, const Payload& payload) {
    keys_[pos] = key;
    payloads_[pos] = payload;
    bitmap_.set(pos);
    ++num_keys_;
    fill_gaps_before(pos, key);
  }

  void fill_gaps_before(std::size_t pos, const Key& value) {
    for (std::size_t i = pos; i-- > 0 && !bitmap_.test(i);) keys_[i] = value;
  }

  void refill_all() {
    Key fill = sentinel_key<Key>();
    for (std::size_t i = capacity(); i-- > 0;) {
      if (bitmap_.test(i))
        fill = keys_[i];
      else
        keys_[i] = fill;
    }
  }

  std::vector<Key> keys_;
  std::vector<Payload> payloads_;
  Bitmap bitmap_;
  std::size_t num_keys_ = 0;
};

}  // namespace alex
