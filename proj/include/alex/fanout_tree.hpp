#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

namespace alex {

struct FanoutTreeNode {
  int level = 0;
  std::size_t index_in_level = 0;
  std::size_t key_begin = 0;  // [key_begin, key_end) into the node's sorted keys
  std::size_t key_end = 0;
  double cost = 0.0;          // per-key cost (total when the node is empty)
  std::size_t key_count = 0;
};

struct FanoutDecision {
  int fanout_level = 0;                // fanout = 2^fanout_level
  std::vector<FanoutTreeNode> covering;  // in key order
  std::vector<double> level_costs;     // per-key total cost of each complete level
};

/// Local merge/split passes over a covering set, starting from every node of
/// `start_level`. weighted[L][i] is the key-weighted cost of FT node (L, i).
/// Merges never go above level 1. Returns (level, index) pairs in key order.
inline std::vector<std::pair<int, std::size_t>> select_covering_set(
    const std::vector<std::vector<double>>& weighted, int start_level) {
  std::vector<std::pair<int, std::size_t>> cover;
  for (std::size_t i = 0; i < weighted[start_level].size(); ++i) cover.emplace_back(start_level, i);
  if (start_level == 0) return cover;
  int top = static_cast<int>(weighted.size()) - 1;
  bool changed = true;
  std::vector<std::pair<int, std::size_t>> next;
  while (changed) {
    changed = false;
    next.clear();
    for (std::size_t k = 0; k < cover.size(); ++k) {
      auto [la, ia] = cover[k];
      if (k + 1 < cover.size()) {
        auto [lb, ib] = cover[k + 1];
        if (la == lb && la >= 2 && ia % 2 == 0 && ib == ia + 1 &&
            weighted[la][ia] + weighted[lb][ib] > weighted[la - 1][ia / 2]) {
          next.emplace_back(la - 1, ia / 2);
          ++k;
          changed = true;
          continue;
        }
      }
      next.push_back(cover[k]);
    }
    cover.swap(next);
    next.clear();
    for (auto [l, i] : cover) {
      if (l < top && weighted[l][i] > weighted[l + 1][2 * i] + weighted[l + 1][2 * i + 1]) {
        next.emplace_back(l + 1, 2 * i);
        next.emplace_back(l + 1, 2 * i + 1);
        changed = true;
      } else {
        next.emplace_back(l, i);
      }
    }
    cover.swap(next);
  }
  return cover;
}

/// Grows complete FT levels until the per-key total cost goes up, then
/// refines the best level locally.
///   partition(L)      -> 2^L + 1 key offsets splitting the keys into FT nodes
///   node_cost(b, e)   -> total cost of a data node over keys [b, e), its
///                        fixed overhead included (infinity when it could
///                        not be a data node)
///   level_overhead(L) -> per-key traverse overhead of fanout 2^L, L >= 1
///   sweep             -> evaluate every level up to max_level instead of
///                        stopping at the first increase
template <class Partition, class NodeCost, class Overhead>
FanoutDecision build_fanout_tree(std::size_t num_keys, int max_level, Partition&& partition,
                                 NodeCost&& node_cost, Overhead&& level_overhead, bool sweep = false) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  FanoutDecision out;
  std::vector<std::vector<FanoutTreeNode>> levels;
  std::vector<std::vector<double>> weighted;
  double n = static_cast<double>(std::max<std::size_t>(num_keys, 1));

  auto add_level = [&](int L) {
    auto cuts = partition(L);
    std::vector<FanoutTreeNode> nodes;
    std::vector<double> w;
    double total = 0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      FanoutTreeNode f;
      f.level = L;
      f.index_in_level = i;
      f.key_begin = cuts[i];
      f.key_end = cuts[i + 1];
      f.key_count = f.key_end - f.key_begin;
      double wc = node_cost(f.key_begin, f.key_end);
      f.cost = f.key_count ? wc / static_cast<double>(f.key_count) : wc;
      total += wc;
      w.push_back(wc);
      nodes.push_back(f);
    }
    double per_key = total / n + (L > 0 ? level_overhead(L) : 0.0);
    levels.push_back(std::move(nodes));
    weighted.push_back(std::move(w));
    out.level_costs.push_back(per_key);
  };

  add_level(0);
  for (int L = 1; L <= max_level; ++L) {
    add_level(L);
    double prev = out.level_costs[L - 1], cur = out.level_costs[L];
    if (cur > prev && !sweep) break;
  }

  int best = 0;
  for (int L = 1; L < static_cast<int>(out.level_costs.size()); ++L)
    if (out.level_costs[L] < out.level_costs[best]) best = L;
  if (out.level_costs[best] == inf) best = static_cast<int>(out.level_costs.size()) - 1;

  auto cover = select_covering_set(weighted, best);
  int fanout_level = 0;
  for (auto [l, i] : cover) {
    out.covering.push_back(levels[l][i]);
    fanout_level = std::max(fanout_level, l);
  }
  out.fanout_level = fanout_level;
  return out;
}

}  // namespace alex
