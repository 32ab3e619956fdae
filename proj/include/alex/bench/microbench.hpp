#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "alex/exponential_search.hpp"

namespace alex::bench {

inline void keep(std::uint64_t v) { asm volatile("" : : "r"(v) : "memory"); }

struct MicrobenchRow {
  std::size_t error = 0;
  std::string method;  // exponential | binary
  double mean_ns = 0;
  double mean_iterations = 0;
};

struct MicrobenchSpec {
  std::size_t elements = 1'000'000;
  std::vector<std::size_t> errors{0, 1, 4, 16, 64, 256, 1024};
  std::size_t bound = 1024;   // half-width of the binary search window
  std::size_t lookups = 200'000;
  int repetitions = 5;        // best-of
  std::uint64_t seed = 42;
};

/// Lookups on evenly spaced doubles starting from a position off by exactly
/// `error` slots (random direction), exponential search versus binary search
/// inside [start - bound, start + bound].
inline std::vector<MicrobenchRow> search_microbenchmark(const MicrobenchSpec& spec) {
  std::vector<double> a(spec.elements);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = static_cast<double>(i) * 0.5 + 1.0;
  std::span<const double> data(a);
  std::mt19937_64 rng(spec.seed);
  std::vector<MicrobenchRow> rows;
  for (std::size_t err : spec.errors) {
    std::vector<std::size_t> target(spec.lookups), start(spec.lookups);
    std::uniform_int_distribution<std::size_t> pick(err, a.size() - 1 - err);
    for (std::size_t i = 0; i < spec.lookups; ++i) {
      target[i] = pick(rng);
      start[i] = (rng() & 1) ? target[i] + err : target[i] - err;
    }
    for (int method = 0; method < 2; ++method) {
      if (method == 1 && err > spec.bound) continue;
      double best = std::numeric_limits<double>::infinity();
      std::uint64_t iters = 0;
      std::uint64_t sink = 0;
      for (int rep = 0; rep < spec.repetitions; ++rep) {
        iters = 0;
        auto t0 = std::chrono::steady_clock::now();
        for (std::size_t i = 0; i < spec.lookups; ++i) {
          double key = a[target[i]];
          SearchResult r = method == 0 ? exponential_lower_bound(data, start[i], key)
                                       : bounded_binary_lower_bound(data, start[i], spec.bound, key);
          sink += r.pos;
          iters += r.iterations;
        }
        double ns = std::chrono::duration<double, std::nano>(std::chrono::steady_clock::now() - t0).count();
        best = std::min(best, ns / static_cast<double>(spec.lookups));
      }
      keep(sink);
      rows.push_back({err, method == 0 ? "exponential" : "binary", best,
                      static_cast<double>(iters) / static_cast<double>(spec.lookups)});
    }
  }
  return rows;
}

}  // namespace alex::bench
