#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "alex/cost_model.hpp"
#include "alex/errors.hpp"
#include "alex/exponential_search.hpp"
#include "alex/fanout_tree.hpp"
#include "alex/gapped_array.hpp"
#include "alex/linear_model.hpp"

using namespace alex;

namespace {

using Array = GappedArray<std::uint64_t, std::uint64_t>;

std::vector<std::uint64_t> random_sorted_keys(std::mt19937_64& rng, std::size_t n, std::uint64_t range) {
  std::set<std::uint64_t> s;
  std::uniform_int_distribution<std::uint64_t> d(0, range);
  while (s.size() < n) s.insert(d(rng));
  return {s.begin(), s.end()};
}

Array build(const std::vector<std::uint64_t>& keys, const LinearModel& m, std::size_t cap) {
  std::vector<std::uint64_t> p(keys.begin(), keys.end());
  return Array::build_model_based(std::span<const std::uint64_t>(keys), std::span<const std::uint64_t>(p), m, cap);
}

std::vector<std::size_t> occupied_slots(const Array& a) {
  std::vector<std::size_t> out;
  for (std::size_t i = a.first_occupied(); i < a.capacity(); i = a.next_occupied(i + 1)) out.push_back(i);
  return out;
}

}  // namespace

// linear model

TEST(LinearModel, FitMatchesNormalEquations) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> noise(0, 3);
  std::vector<double> x, y;
  for (int i = 0; i < 500; ++i) {
    x.push_back(i * 1.5 + 7);
    y.push_back(2.5 * x.back() - 4 + noise(rng));
  }
  // normal equations solved directly
  double n = 500, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < 500; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  double icpt = (sy - slope * sx) / n;
  auto m = fit<double, double>(x, y);
  EXPECT_NEAR(m.slope, slope, 1e-9 * std::fabs(slope));
  EXPECT_NEAR(m.intercept, icpt, 1e-7 * std::fabs(icpt));
}

TEST(LinearModel, DegenerateInputs) {
  std::vector<double> one{5}, t{3};
  auto m = fit<double, double>(one, t);
  EXPECT_EQ(m.slope, 0.0);
  EXPECT_EQ(m.intercept, 3.0);
  std::vector<double> empty;
  EXPECT_THROW((fit<double, double>(empty, empty)), std::invalid_argument);
  std::vector<double> two{1, 2};
  EXPECT_THROW((fit<double, double>(two, t)), std::invalid_argument);
}

TEST(LinearModel, PredictClampsAndScale) {
  LinearModel m{2, 0};
  EXPECT_EQ(predict(m, 3.0, 8), 6u);
  EXPECT_EQ(predict(m, -1.0, 8), 0u);
  EXPECT_EQ(predict(m, 100.0, 8), 7u);
  EXPECT_EQ(predict(LinearModel{std::nan(""), 0}, 1.0, 8), 0u);
  auto s = scale(LinearModel{1, 3}, 2);
  EXPECT_EQ(s.slope, 2);
  EXPECT_EQ(s.intercept, 6);
  EXPECT_THROW(scale(m, 0), std::invalid_argument);
}

TEST(LinearModel, LargeKeysKeepPrecision) {
  std::vector<std::uint64_t> keys;
  for (std::uint64_t i = 0; i < 1000; ++i) keys.push_back((std::uint64_t{1} << 50) + 1000 * i);
  auto m = fit_ranks<std::uint64_t>(keys);
  for (std::size_t i = 0; i < keys.size(); i += 97) EXPECT_NEAR(m.raw(static_cast<double>(keys[i])), i, 1e-3);
  ModelAccumulator acc;
  for (std::size_t i = 0; i < keys.size(); ++i) acc.add(static_cast<double>(keys[i]), static_cast<double>(i));
  auto r = acc.model();
  EXPECT_NEAR(r.slope, m.slope, 1e-9 * m.slope);
}

TEST(LinearModel, ProgressiveFitOnLinearKeysStopsEarly) {
  std::vector<std::uint64_t> keys(100000);
  for (std::size_t i = 0; i < keys.size(); ++i) keys[i] = 10 + 3 * i;
  auto pf = fit_progressive_detail<std::uint64_t>(keys);
  auto full = fit_ranks<std::uint64_t>(keys);
  EXPECT_NEAR(pf.model.slope, full.slope, 1e-9);
  EXPECT_LT(pf.points_touched, keys.size() / 2);
  EXPECT_LE(pf.rounds, 12);
}

TEST(LinearModel, ProgressiveFitSmallInputIsExact) {
  std::vector<std::uint64_t> keys{1, 5, 9, 30};
  auto pf = fit_progressive_detail<std::uint64_t>(keys);
  EXPECT_EQ(pf.model, fit_ranks<std::uint64_t>(keys));
  EXPECT_EQ(pf.points_touched, 4u);
}

// exponential search

TEST(ExponentialSearch, MatchesLinearScanAndIterationCount) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 10000; ++t) {
    std::size_t n = 1 + rng() % 300;
    std::vector<std::uint64_t> a(n);
    for (auto& v : a) v = rng() % 400;
    std::sort(a.begin(), a.end());
    std::uint64_t key = rng() % 420;
    std::size_t start = rng() % n;
    auto r = exponential_lower_bound<std::uint64_t>(a, start, key);
    std::size_t oracle = 0;
    while (oracle < n && a[oracle] < key) ++oracle;
    ASSERT_EQ(r.pos, oracle);
    if (oracle < n && oracle >= start) {
      ASSERT_EQ(r.iterations, search_iterations_for(oracle - start));
    }
  }
}

TEST(ExponentialSearch, IterationsAreCeilLog) {
  std::vector<std::uint64_t> a(5000);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = 2 * i;
  for (std::size_t d : {0, 1, 2, 3, 4, 7, 8, 100, 1023, 1024}) {
    auto r = exponential_lower_bound<std::uint64_t>(a, 1000, a[1000 + d]);
    EXPECT_EQ(r.pos, 1000 + d);
    EXPECT_EQ(r.iterations, static_cast<std::size_t>(std::ceil(std::log2(d + 1.0)))) << d;
    auto l = exponential_lower_bound<std::uint64_t>(a, 2000, a[2000 - d]);
    EXPECT_EQ(l.pos, 2000 - d);
    EXPECT_EQ(l.iterations, static_cast<std::size_t>(std::ceil(std::log2(d + 1.0)))) << d;
  }
}

TEST(ExponentialSearch, PastEveryKey) {
  std::vector<std::uint64_t> a{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  auto r = exponential_lower_bound<std::uint64_t>(a, 0, 99);
  EXPECT_EQ(r.pos, a.size());
  EXPECT_LE(r.iterations, static_cast<std::size_t>(std::ceil(std::log2(10.0))) + 1);
}

TEST(ExponentialSearch, BoundedBinaryIsFlat) {
  std::vector<std::uint64_t> a(10000);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = i;
  auto r0 = bounded_binary_lower_bound<std::uint64_t>(a, 5000, 64, 5000);
  auto r1 = bounded_binary_lower_bound<std::uint64_t>(a, 5000, 64, 5060);
  EXPECT_EQ(r0.pos, 5000u);
  EXPECT_EQ(r1.pos, 5060u);
  EXPECT_NEAR(static_cast<double>(r0.iterations), static_cast<double>(r1.iterations), 1.0);
}

// gapped array

TEST(GappedArray, EvenSpreadExample) {
  auto a = build({0, 1, 2, 3}, {2, 0}, 8);
  EXPECT_EQ(occupied_slots(a), (std::vector<std::size_t>{0, 2, 4, 6}));
  EXPECT_EQ(a.audit(), "");
}

TEST(GappedArray, CollisionPushesRight) {
  std::vector<double> k{0, 0.1}, p{1, 2};
  auto a = GappedArray<double, double>::build_model_based(k, p, {1, 0}, 4);
  EXPECT_EQ(predict(LinearModel{1, 0}, 0.1, 4), 0u);
  EXPECT_TRUE(a.occupied(0));
  EXPECT_TRUE(a.occupied(1));
  EXPECT_EQ(a.key_at(1), 0.1);
}

TEST(GappedArray, TailPackingAndCapacityError) {
  auto a = build({10, 11, 12}, {0, 3}, 4);  // every key predicts slot 3
  EXPECT_EQ(occupied_slots(a), (std::vector<std::size_t>{1, 2, 3}));
  EXPECT_THROW(build({1, 2, 3}, {1, 0}, 2), std::invalid_argument);
  auto full = build({1, 2}, {1, 0}, 2);
  EXPECT_THROW(full.insert_at(0, 0, 0), capacity_error);
}

TEST(GappedArray, GapsHoldRightNeighbour) {
  auto a = build({0, 1, 2, 3}, {2, 0}, 8);
  EXPECT_EQ(a.key_at(1), 1u);
  EXPECT_EQ(a.key_at(7), sentinel_key<std::uint64_t>());
  a.erase_at(2);
  EXPECT_EQ(a.key_at(1), 2u);
  EXPECT_EQ(a.key_at(2), 2u);
  EXPECT_EQ(a.audit(), "");
  EXPECT_THROW(a.erase_at(1), std::invalid_argument);
}

TEST(GappedArray, EraseOnlyKey) {
  auto a = build({5}, {0, 1}, 4);
  a.erase_at(1);
  EXPECT_TRUE(a.empty());
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(a.key_at(i), sentinel_key<std::uint64_t>());
}

TEST(GappedArray, InsertIntoGapIsFree) {
  auto a = build({0, 10, 20, 30}, {0.2, 0}, 8);
  auto f = a.find(15, 3);
  EXPECT_FALSE(f.found);
  EXPECT_EQ(f.pos, 3u);  // the gap holds 20
  std::size_t slot = a.insert_slot(f.pos, 3, 3.0);
  EXPECT_EQ(slot, 3u);
  EXPECT_EQ(a.insert_at(slot, 15, 15), 0u);
  EXPECT_EQ(a.audit(), "");
}

// Re-layout oracle: the slot content after inserting at pos, computed from the
// occupancy vector alone.
TEST(GappedArray, InsertMatchesRelayoutOracle) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 3000; ++t) {
    std::size_t cap = 2 + rng() % 63;
    std::size_t n = rng() % cap;
    std::vector<std::uint64_t> keys;
    for (std::uint64_t k = 0; keys.size() < n; k += 10)
      if (rng() % 3) keys.push_back(k);
    std::vector<std::size_t> slots(cap);
    for (std::size_t i = 0; i < cap; ++i) slots[i] = i;
    std::shuffle(slots.begin(), slots.end(), rng);
    slots.resize(n);
    std::sort(slots.begin(), slots.end());
    Array a(cap);
    std::vector<std::optional<std::uint64_t>> oracle(cap);
    // build by direct placement through insert_at into gaps, in slot order
    for (std::size_t i = 0; i < n; ++i) {
      a.insert_at(slots[i], keys[i], keys[i]);
      oracle[slots[i]] = keys[i];
    }
    ASSERT_EQ(a.audit(), "");
    std::uint64_t nk = (n ? rng() % (keys.back() + 20) : 7);
    if (std::binary_search(keys.begin(), keys.end(), nk)) continue;
    auto f = a.find(nk, rng() % cap);
    ASSERT_FALSE(f.found);
    std::size_t pos = f.pos;
    // oracle
    std::size_t shifts = 0;
    if (pos < cap && !oracle[pos]) {
      oracle[pos] = nk;
    } else {
      std::optional<std::size_t> gr, gl;
      for (std::size_t i = pos; i < cap; ++i)
        if (!oracle[i]) { gr = i; break; }
      for (std::size_t i = pos; i-- > 0;)
        if (!oracle[i]) { gl = i; break; }
      bool right = gr && (!gl || *gr - pos <= pos - *gl);
      if (right) {
        for (std::size_t i = *gr; i > pos; --i) oracle[i] = oracle[i - 1];
        oracle[pos] = nk;
        shifts = *gr - pos;
      } else {
        for (std::size_t i = *gl; i + 1 < pos; ++i) oracle[i] = oracle[i + 1];
        oracle[pos - 1] = nk;
        shifts = pos - 1 - *gl;
      }
    }
    ASSERT_EQ(a.insert_at(pos, nk, nk), shifts);
    ASSERT_EQ(a.audit(), "");
    for (std::size_t i = 0; i < cap; ++i) {
      ASSERT_EQ(a.occupied(i), oracle[i].has_value());
      if (oracle[i]) {
        ASSERT_EQ(a.key_at(i), *oracle[i]);
      }
    }
  }
}

TEST(GappedArray, RandomInsertEraseKeepsInvariants) {
  std::mt19937_64 rng(4);
  std::size_t cap = 512;
  Array a(cap);
  std::map<std::uint64_t, std::uint64_t> oracle;
  LinearModel m{cap / 100000.0, 0};
  for (int op = 0; op < 10000; ++op) {
    std::uint64_t k = rng() % 100000;
    if (rng() % 2 && a.size() < cap * 8 / 10) {
      std::size_t pred = predict(m, k, cap);
      auto f = a.find(k, pred);
      if (f.found) continue;
      a.insert_at(a.insert_slot(f.pos, pred, m.raw(static_cast<double>(k))), k, k + 1);
      oracle[k] = k + 1;
    } else if (!oracle.empty()) {
      auto it = oracle.lower_bound(k);
      if (it == oracle.end()) it = oracle.begin();
      auto f = a.find(it->first, predict(m, it->first, cap));
      ASSERT_TRUE(f.found);
      a.erase_at(f.pos);
      oracle.erase(it);
    }
    ASSERT_EQ(a.audit(), "") << op;
    ASSERT_EQ(a.size(), oracle.size());
  }
  std::vector<std::pair<std::uint64_t, std::uint64_t>> want(oracle.begin(), oracle.end());
  EXPECT_EQ(a.scan_count(0, cap), want);
}

TEST(GappedArray, ScanExamples) {
  auto a = build({1, 2, 3}, {1, 0}, 6);
  auto all = a.scan_count(0, 10);
  ASSERT_EQ(all.size(), 3u);
  EXPECT_EQ(all[0].first, 1u);
  EXPECT_EQ(all[2].first, 3u);
  auto two = a.scan_count(0, 2);
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two[1].first, 2u);
  EXPECT_EQ(a.scan_until(0, 3).size(), 2u);
}

TEST(GappedArray, ScanMatchesSortedMap) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 10000; ++t) {
    std::size_t n = 1 + rng() % 40;
    auto keys = random_sorted_keys(rng, n, 1000);
    std::size_t cap = n + rng() % 40;
    auto m = scale(fit_ranks<std::uint64_t>(keys), static_cast<double>(cap) / n);
    auto a = build(keys, m, cap);
    std::map<std::uint64_t, std::uint64_t> oracle;
    for (auto k : keys) oracle[k] = k;
    std::uint64_t lo = rng() % 1000, hi = lo + rng() % 300;
    auto f = a.find(lo, predict(m, lo, cap));
    auto got = a.scan_until(f.pos, hi);
    std::vector<std::pair<std::uint64_t, std::uint64_t>> want(oracle.lower_bound(lo), oracle.lower_bound(hi));
    ASSERT_EQ(got, want);
  }
}

TEST(GappedArray, GrowKeepsContents) {
  auto a = build({1, 2, 3}, {1, 0}, 4);
  a.grow_right(4);
  EXPECT_EQ(a.capacity(), 8u);
  EXPECT_EQ(a.audit(), "");
  a.grow_left(2);
  EXPECT_EQ(occupied_slots(a), (std::vector<std::size_t>{3, 4, 5}));
  EXPECT_EQ(a.audit(), "");
}

// cost model

namespace {

// Materialize the placement, then measure each key's search distance and
// the shifts an insert landing on each occupied slot would cost.
ExpectedStats materialized_stats(const std::vector<std::uint64_t>& keys, const LinearModel& m, std::size_t cap) {
  auto a = build(keys, m, cap);
  double iters = 0, shifts = 0;
  for (auto k : keys) {
    std::size_t pred = predict(m, k, cap);
    iters += static_cast<double>(a.find(k, pred).iterations);
  }
  for (std::size_t i = a.first_occupied(); i < cap; i = a.next_occupied(i + 1)) {
    std::size_t dl = std::numeric_limits<std::size_t>::max(), dr = dl;
    for (std::size_t j = i; j < cap; ++j)
      if (!a.occupied(j)) { dr = j - i; break; }
    if (dr == std::numeric_limits<std::size_t>::max()) dr = cap - i;
    for (std::size_t j = i + 1; j-- > 0;)
      if (!a.occupied(j)) { dl = i - j; break; }
    if (dl == std::numeric_limits<std::size_t>::max()) dl = i + 1;
    shifts += static_cast<double>(std::min(dl, dr));
  }
  return {iters / keys.size(), shifts / keys.size(), 0};
}

}  // namespace

TEST(CostModel, ExpectedStatsMatchMaterialization) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 300; ++t) {
    std::size_t n = 1 + rng() % 200;
    auto keys = random_sorted_keys(rng, n, 5000);
    std::size_t cap = n + rng() % (2 * n + 1);
    LinearModel m = scale(fit_ranks<std::uint64_t>(keys), static_cast<double>(cap) / n * (0.5 + (rng() % 100) / 100.0));
    auto e = expected_stats<std::uint64_t>(keys, m, cap);
    auto o = materialized_stats(keys, m, cap);
    ASSERT_NEAR(e.expected_search_iters, o.expected_search_iters, 1e-9) << "n " << n << " cap " << cap;
    ASSERT_NEAR(e.expected_shifts, o.expected_shifts, 1e-9);
  }
}

TEST(CostModel, DenseLayoutShifts) {
  // all keys packed in one run from slot 0 of an exactly full array
  std::vector<std::uint64_t> keys{1, 2, 3, 4, 5};
  auto e = expected_stats<std::uint64_t>(keys, {0, 0}, 5);
  EXPECT_NEAR(e.expected_shifts, (1 + 2 + 3 + 2 + 1) / 5.0, 1e-12);
  EXPECT_NEAR(e.expected_search_iters, (0 + 1 + 2 + 2 + 3) / 5.0, 1e-12);
}

TEST(CostModel, PerfectlyLinearKeysHaveNoSearchCost) {
  std::vector<std::uint64_t> keys;
  for (std::uint64_t i = 0; i < 1000; ++i) keys.push_back(100 + 7 * i);
  auto m = scale(fit_ranks<std::uint64_t>(keys), 2.0);
  auto e = expected_stats<std::uint64_t>(keys, m, 2000);
  EXPECT_EQ(e.expected_search_iters, 0.0);
}

TEST(CostModel, SampledEstimateWithinThirtyPercent) {
  std::mt19937_64 rng(7);
  auto uniform = random_sorted_keys(rng, 1'000'000, std::uint64_t{1} << 50);
  std::lognormal_distribution<double> ln(0, 2);
  std::set<std::uint64_t> s;
  while (s.size() < 1'000'000) s.insert(static_cast<std::uint64_t>(ln(rng) * 1e9));
  std::vector<std::uint64_t> skewed(s.begin(), s.end());
  for (const auto* keys : {&uniform, &skewed}) {
    std::size_t cap = static_cast<std::size_t>(keys->size() / 0.7);
    auto m = scale(fit_ranks<std::uint64_t>(*keys), static_cast<double>(cap) / keys->size());
    auto exact = expected_stats<std::uint64_t>(*keys, m, cap);
    auto est = expected_stats_sampled<std::uint64_t>(*keys, m, cap);
    EXPECT_NEAR(est.stats.expected_search_iters, exact.expected_search_iters, 0.3 * exact.expected_search_iters);
    EXPECT_NEAR(est.stats.expected_shifts, exact.expected_shifts, 0.3 * exact.expected_shifts);
    if (keys == &skewed) {
      EXPECT_FALSE(est.exact);
      EXPECT_LT(est.work, keys->size() / 10);
    }
  }
}

TEST(CostModel, SampledEstimateSmallInputIsExact) {
  std::vector<std::uint64_t> keys{1, 4, 9, 16, 25};
  auto s = expected_stats_sampled<std::uint64_t>(keys, {0.2, 0}, 8);
  EXPECT_TRUE(s.exact);
  auto e = expected_stats<std::uint64_t>(keys, {0.2, 0}, 8);
  EXPECT_EQ(s.stats.expected_shifts, e.expected_shifts);
}

TEST(CostModel, IntraAndTraverseExamples) {
  CostWeights w;
  EXPECT_DOUBLE_EQ(intra_node_cost(2.0, 4.0, 0.5, w), 22.0);
  EXPECT_NEAR(traverse_cost(2, std::size_t{1} << 20, w), 21.048576, 1e-12);
}

TEST(CostModel, DeviationBoundaries) {
  EXPECT_FALSE(deviation_detected(10, 15));
  EXPECT_TRUE(deviation_detected(10, 15.01));
  EXPECT_FALSE(deviation_detected(0, 0));
  EXPECT_TRUE(deviation_detected(0, 10.5));
  EXPECT_FALSE(deviation_detected(0, 10));
}

TEST(CostModel, CompositeCost) {
  std::vector<NodeCost> nodes{{10, 20, 1}, {0, 10, 3}};
  EXPECT_DOUBLE_EQ(composite_index_cost(nodes), (30.0 + 30.0) / 4.0);
  EXPECT_EQ(composite_index_cost({}), 0.0);
}

TEST(CostModel, NodeStatsAverages) {
  NodeStats s{30, 5, 12, 5};
  EXPECT_DOUBLE_EQ(s.search_avg(), 3.0);
  EXPECT_DOUBLE_EQ(s.shifts_avg(), 2.4);
  EXPECT_DOUBLE_EQ(s.insert_fraction(), 0.5);
}

// fanout tree

TEST(FanoutTree, CoveringSetMergesAndSplits) {
  std::vector<std::vector<double>> w{{200}, {40, 90}, {20, 25, 10, 30}, {9, 9, 9, 9, 1, 1, 20, 20}};
  auto cover = select_covering_set(w, 2);
  std::vector<std::pair<int, std::size_t>> want{{1, 0}, {3, 4}, {3, 5}, {2, 3}};
  EXPECT_EQ(cover, want);
}

TEST(FanoutTree, NeverMergesToRoot) {
  std::vector<std::vector<double>> w{{1}, {50, 50}};
  auto cover = select_covering_set(w, 1);
  EXPECT_EQ(cover.size(), 2u);
}

namespace {

template <class Keys>
FanoutDecision decide(const Keys& keys, int max_level) {
  double lo = static_cast<double>(keys.front()), hi = static_cast<double>(keys.back()) + 1;
  auto partition = [&](int L) {
    std::size_t parts = std::size_t{1} << L;
    std::vector<std::size_t> cuts{0};
    for (std::size_t i = 1; i < parts; ++i) {
      double b = lo + (hi - lo) * i / parts;
      cuts.push_back(static_cast<std::size_t>(
          std::lower_bound(keys.begin(), keys.end(), b, [](auto k, double v) { return k < v; }) - keys.begin()));
    }
    cuts.push_back(keys.size());
    return cuts;
  };
  auto node_cost = [&](std::size_t b, std::size_t e) {
    if (b == e) return 1.0;
    std::span<const std::uint64_t> s(keys.data() + b, e - b);
    std::size_t cap = static_cast<std::size_t>((e - b) / 0.7) + 1;
    auto m = scale(fit_ranks(s), static_cast<double>(cap) / (e - b));
    return 1.0 + static_cast<double>(e - b) * intra_node_cost(expected_stats(s, m, cap));  // fixed per-node cost
  };
  auto overhead = [&](int) { return 1.0; };
  return build_fanout_tree(keys.size(), max_level, partition, node_cost, overhead);
}

}  // namespace

TEST(FanoutTree, LinearKeysGiveFanoutOne) {
  std::vector<std::uint64_t> keys;
  for (std::uint64_t i = 0; i < 4096; ++i) keys.push_back(1000 + 5 * i);
  auto d = decide(keys, 6);
  EXPECT_EQ(d.fanout_level, 0);
  EXPECT_EQ(d.covering.size(), 1u);
}

TEST(FanoutTree, TwoSlopesGiveFanoutTwo) {
  std::vector<std::uint64_t> keys;
  for (std::uint64_t i = 0; i < 4096; ++i) keys.push_back(i);             // dense left half
  for (std::uint64_t i = 0; i < 1024; ++i) keys.push_back(4099 + i * 4);  // sparse right half
  auto d = decide(keys, 6);
  EXPECT_EQ(d.fanout_level, 1);
  ASSERT_EQ(d.covering.size(), 2u);
  EXPECT_EQ(d.covering[0].key_count, 4096u);
  EXPECT_LT(d.level_costs[1], d.level_costs[0]);
  for (double c : d.level_costs) EXPECT_LE(d.level_costs[1], c);
}
