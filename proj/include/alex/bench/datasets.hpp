#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace alex::bench {

/// floor(lognormal(0, 2) * 1e9), unique, sorted.
inline std::vector<std::uint64_t> gen_lognormal(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::lognormal_distribution<double> dist(0.0, 2.0);
  std::vector<std::uint64_t> keys;
  keys.reserve(count);
  constexpr double limit = 0x1p63;
  while (keys.size() < count) {
    while (keys.size() < count) {
      double v = std::floor(dist(rng) * 1e9);
      if (v < limit) keys.push_back(static_cast<std::uint64_t>(v));
    }
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  }
  return keys;
}

/// Uniform over [0, 2^64 - 2] (the maximum value is the reserved sentinel), unique, sorted.
inline std::vector<std::uint64_t> gen_uniform64(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint64_t> dist(0, std::numeric_limits<std::uint64_t>::max() - 1);
  std::vector<std::uint64_t> keys;
  keys.reserve(count);
  while (keys.size() < count) {
    while (keys.size() < count) keys.push_back(dist(rng));
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  }
  return keys;
}

namespace detail {
inline void put_le64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}
inline bool get_le64(std::istream& in, std::uint64_t& v) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) return false;
  v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t{b[i]} << (8 * i);
  return true;
}
}  // namespace detail

/// 8-byte little-endian count followed by little-endian 64-bit values.
template <class Key>
void write_dataset(const std::string& path, const std::vector<Key>& keys) {
  static_assert(sizeof(Key) == 8);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  detail::put_le64(out, keys.size());
  for (Key k : keys) detail::put_le64(out, std::bit_cast<std::uint64_t>(k));
  if (!out) throw std::runtime_error("write failed: " + path);
}

/// Reads a dataset file; keys must be sorted and unique.
template <class Key>
std::vector<Key> read_dataset(const std::string& path) {
  static_assert(sizeof(Key) == 8);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::uint64_t n;
  if (!detail::get_le64(in, n)) throw std::runtime_error("truncated header: " + path);
  std::vector<Key> keys;
  keys.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    std::uint64_t v;
    if (!detail::get_le64(in, v)) throw std::runtime_error("truncated dataset: " + path);
    keys.push_back(std::bit_cast<Key>(v));
  }
  for (std::size_t i = 1; i < keys.size(); ++i)
    if (!(keys[i - 1] < keys[i])) throw std::runtime_error("dataset keys not sorted and unique: " + path);
  return keys;
}

}  // namespace alex::bench
