#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "alex/exponential_search.hpp"
#include "alex/gapped_array.hpp"
#include "alex/linear_model.hpp"

namespace alex {

struct CostWeights {
  double w_s = 10.0;   // ns per search iteration
  double w_i = 1.0;    // ns per shift
  double w_d = 10.0;   // ns per level of depth
  double w_b = 1e-6;   // ns per byte of structure
};

struct NodeStats {
  std::uint64_t cum_search_iterations = 0;
  std::uint64_t num_lookups = 0;
  std::uint64_t cum_shifts = 0;
  std::uint64_t num_inserts = 0;

  double search_avg() const {
    auto ops = num_lookups + num_inserts;
    return ops ? static_cast<double>(cum_search_iterations) / static_cast<double>(ops) : 0.0;
  }
  double shifts_avg() const {
    return num_inserts ? static_cast<double>(cum_shifts) / static_cast<double>(num_inserts) : 0.0;
  }
  double insert_fraction() const {
    auto ops = num_lookups + num_inserts;
    return ops ? static_cast<double>(num_inserts) / static_cast<double>(ops) : 0.0;
  }
  std::uint64_t operations() const { return num_lookups + num_inserts; }
};

struct ExpectedStats {
  double expected_search_iters = 0.0;
  double expected_shifts = 0.0;
  double insert_fraction = 0.0;
};

namespace detail {
// sum over a run of L consecutive occupied slots of the distance to the nearer
// slot just outside the run
inline double run_gap_distance_sum(std::size_t len) {
  double h = static_cast<double>(len / 2);
  return len % 2 ? (h + 1) * (h + 1) : h * (h + 1);
}
}  // namespace detail

/// Simulated model-based placement: mean search iterations log2(1 + error)
/// rounded up to whole iterations, mean distance to the closest gap (the
/// slots just outside the array count as gaps).
template <class Key>
ExpectedStats expected_stats(std::span<const Key> keys, const LinearModel& model, std::size_t capacity,
                             double insert_fraction = 0.0) {
  ExpectedStats e;
  e.insert_fraction = insert_fraction;
  std::size_t n = keys.size();
  if (n == 0) return e;
  auto pos = placement_positions(keys, model, capacity);
  double iters = 0, shifts = 0;
  std::size_t run_start = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t pred = predict(model, keys[i], capacity);
    std::size_t d = pred > pos[i] ? pred - pos[i] : pos[i] - pred;
    iters += static_cast<double>(search_iterations_for(d));
    if (i + 1 == n || pos[i + 1] != pos[i] + 1) {
      shifts += detail::run_gap_distance_sum(i + 1 - run_start);
      run_start = i + 1;
    }
  }
  e.expected_search_iters = iters / static_cast<double>(n);
  e.expected_shifts = shifts / static_cast<double>(n);
  return e;
}

inline constexpr std::size_t kAccInitialSample = 4096;

struct SampledEstimate {
  ExpectedStats stats;
  std::size_t work = 0;  // keys simulated across all samples
  bool exact = false;
};

/// Expected stats from systematic samples of doubling size, extrapolated to
/// the full key count once a two-point fit predicts the next sample within
/// 20% for both components. Falls back to the exact value.
template <class Key>
SampledEstimate expected_stats_sampled(std::span<const Key> keys, const LinearModel& model,
                                       std::size_t capacity, double insert_fraction = 0.0,
                                       double tolerance = 0.2, std::size_t initial_sample = kAccInitialSample) {
  SampledEstimate out;
  std::size_t n = keys.size();
  std::size_t initial = std::min(initial_sample, n);
  auto exact = [&] {
    out.stats = expected_stats(keys, model, capacity, insert_fraction);
    out.work += n;
    out.exact = true;
    return out;
  };
  if (n <= 4 * initial) return exact();

  std::size_t stride = 1;
  while (n / (stride * 2) >= initial) stride *= 2;
  if (stride < 4) return exact();

  std::vector<Key> sample;
  auto measure = [&](std::size_t s, double& size_out) {
    sample.clear();
    for (std::size_t i = 0; i < n; i += s) sample.push_back(keys[i]);
    double frac = static_cast<double>(sample.size()) / static_cast<double>(n);
    std::size_t cap = std::max<std::size_t>(
        sample.size(), static_cast<std::size_t>(std::ceil(static_cast<double>(capacity) * frac)));
    LinearModel m = scale(model, static_cast<double>(cap) / static_cast<double>(capacity));
    out.work += sample.size();
    size_out = static_cast<double>(sample.size());
    return expected_stats<Key>(sample, m, cap, insert_fraction);
  };
  auto ok = [&](double predicted, double actual) {
    if (actual == 0.0) return std::fabs(predicted) <= 1e-12;
    return std::fabs(predicted - actual) <= tolerance * std::fabs(actual);
  };
  // two-point fits: search a + b*log2(size), shifts a + b*size
  auto extrap_log = [](double s1, double c1, double s2, double c2, double s) {
    double b = (c2 - c1) / (std::log2(s2) - std::log2(s1));
    return c2 + b * (std::log2(s) - std::log2(s2));
  };
  auto extrap_lin = [](double s1, double c1, double s2, double c2, double s) {
    double b = (c2 - c1) / (s2 - s1);
    return c2 + b * (s - s2);
  };

  double s1, s2, s3;
  ExpectedStats e1 = measure(stride, s1);
  ExpectedStats e2 = measure(stride / 2, s2);
  std::size_t cur = stride / 4;
  for (;;) {
    if (cur <= 1) return exact();
    ExpectedStats e3 = measure(cur, s3);
    double ps = extrap_log(s1, e1.expected_search_iters, s2, e2.expected_search_iters, s3);
    double pi = extrap_lin(s1, e1.expected_shifts, s2, e2.expected_shifts, s3);
    if (ok(ps, e3.expected_search_iters) && ok(pi, e3.expected_shifts)) {
      double full = static_cast<double>(n);
      out.stats.insert_fraction = insert_fraction;
      out.stats.expected_search_iters =
          std::max(0.0, extrap_log(s2, e2.expected_search_iters, s3, e3.expected_search_iters, full));
      out.stats.expected_shifts = std::max(0.0, extrap_lin(s2, e2.expected_shifts, s3, e3.expected_shifts, full));
      return out;
    }
    e1 = e2;
    s1 = s2;
    e2 = e3;
    s2 = s3;
    cur /= 2;
  }
}

inline double intra_node_cost(double search, double shifts, double insert_fraction, const CostWeights& w = {}) {
  return w.w_s * search + w.w_i * shifts * insert_fraction;
}

inline double intra_node_cost(const ExpectedStats& e, const CostWeights& w = {}) {
  return intra_node_cost(e.expected_search_iters, e.expected_shifts, e.insert_fraction, w);
}

inline double intra_node_cost(const NodeStats& s, const CostWeights& w = {}) {
  return intra_node_cost(s.search_avg(), s.shifts_avg(), s.insert_fraction(), w);
}

inline double traverse_cost(std::size_t depth, std::size_t total_structure_bytes, const CostWeights& w = {}) {
  return w.w_d * static_cast<double>(depth) + w.w_b * static_cast<double>(total_structure_bytes);
}

/// Empirical cost more than 50% above expected. A zero expectation tolerates
/// up to epsilon (default: one search iteration's weight).
inline bool deviation_detected(double expected, double empirical, double epsilon = CostWeights{}.w_s) {
  if (expected == 0.0) return empirical > epsilon;
  return empirical > 1.5 * expected;
}

struct NodeCost {
  double intra = 0.0;
  double traverse = 0.0;
  std::size_t keys = 0;
};

/// Key-weighted mean of intra + traverse cost; 0 for an empty index.
inline double composite_index_cost(std::span<const NodeCost> nodes) {
  double num = 0, den = 0;
  for (const auto& c : nodes) {
    num += (c.intra + c.traverse) * static_cast<double>(c.keys);
    den += static_cast<double>(c.keys);
  }
  return den > 0 ? num / den : 0.0;
}

}  // namespace alex
