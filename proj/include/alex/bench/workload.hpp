#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "alex/alex_index.hpp"
#include "alex/bench/zipf.hpp"
#include "alex/btree.hpp"

namespace alex::bench {

enum class Mix { read_only, read_heavy, write_heavy, write_only, short_range, custom };
enum class ShiftMode { shuffled, smallest_first_random, smallest_first_ascending };

inline const char* to_string(Mix m) {
  switch (m) {
    case Mix::read_only: return "read_only";
    case Mix::read_heavy: return "read_heavy";
    case Mix::write_heavy: return "write_heavy";
    case Mix::write_only: return "write_only";
    case Mix::short_range: return "short_range";
    case Mix::custom: return "custom";
  }
  return "?";
}

inline Mix parse_mix(const std::string& s) {
  for (Mix m : {Mix::read_only, Mix::read_heavy, Mix::write_heavy, Mix::write_only, Mix::short_range, Mix::custom})
    if (s == to_string(m)) return m;
  throw std::invalid_argument("unknown mix: " + s);
}

inline const char* to_string(ShiftMode m) {
  switch (m) {
    case ShiftMode::shuffled: return "shuffled";
    case ShiftMode::smallest_first_random: return "smallest_first_random";
    case ShiftMode::smallest_first_ascending: return "smallest_first_ascending";
  }
  return "?";
}

inline ShiftMode parse_shift(const std::string& s) {
  for (ShiftMode m : {ShiftMode::shuffled, ShiftMode::smallest_first_random, ShiftMode::smallest_first_ascending})
    if (s == to_string(m)) return m;
  throw std::invalid_argument("unknown shift mode: " + s);
}

struct WorkloadSpec {
  std::string dataset = "lognormal";  // lognormal | uniform64 | file
  std::size_t init_keys = 0;
  std::size_t total_keys = 0;
  Mix mix = Mix::read_heavy;
  double read_pct = 95, insert_pct = 5, scan_pct = 0;  // custom mix only
  double zipf_theta = 0.99;
  std::size_t max_scan_len = 100;
  std::size_t payload_bytes = 8;
  std::size_t ops = 0;        // op budget; 0 with seconds == 0 means no ops
  double seconds = 0;         // wall-clock budget when > 0 (ops, if set, still caps)
  std::uint64_t seed = 42;
  ShiftMode shift = ShiftMode::shuffled;
  bool verify = true;
  std::size_t latency_stride = 16;  // time every n-th op
};

struct LatencySummary {
  double p50 = 0, p99 = 0, p999 = 0, max = 0;  // ns
};

struct NodeSummary {
  double avg_depth = 0;
  std::size_t max_depth = 0;
  std::size_t num_internal_nodes = 0;
  std::size_t num_data_nodes = 0;
  std::size_t min_data_node_bytes = 0;
  std::size_t median_data_node_bytes = 0;
  std::size_t max_data_node_bytes = 0;
  std::size_t max_node_keys = 0;
};

struct MetricsReport {
  std::string index_kind;
  std::string dataset;
  std::string mix;
  std::string shift;
  std::size_t payload_bytes = 0;
  std::size_t init_keys = 0;
  std::size_t final_keys = 0;
  std::uint64_t ops = 0;
  std::uint64_t reads = 0;
  std::uint64_t inserts = 0;
  std::uint64_t scans = 0;
  std::uint64_t scanned_keys = 0;
  double bulk_load_seconds = 0;
  double elapsed_seconds = 0;
  double ops_per_second = 0;
  std::size_t index_bytes = 0;
  std::size_t data_bytes = 0;
  LatencySummary latency;
  std::map<std::size_t, std::uint64_t> error_histogram;  // bucket -> keys; bucket b holds errors in [2^(b-1), 2^b)
  NodeSummary node_stats;
  std::map<std::string, std::uint64_t> action_counts;
  double mean_shifts_per_insert = 0;
  std::uint64_t checksum = 0;  // over read payloads and scan results
  bool dataset_exhausted = false;
  bool verified = false;
  std::string verification_error;
};

/// Fixed-size payload; the first word carries the value.
template <std::size_t Bytes>
struct Blob {
  static_assert(Bytes % 8 == 0 && Bytes >= 8);
  std::array<std::uint64_t, Bytes / 8> words{};
  bool operator==(const Blob&) const = default;
};

inline std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

template <class Key>
std::uint64_t key_bits(Key k) {
  if constexpr (sizeof(Key) == 8)
    return std::bit_cast<std::uint64_t>(k);
  else
    return static_cast<std::uint64_t>(k);
}

template <class Payload, class Key>
Payload payload_for(Key k) {
  std::uint64_t v = mix64(key_bits(k));
  if constexpr (std::is_arithmetic_v<Payload>) {
    return static_cast<Payload>(v);
  } else {
    Payload p{};
    p.words[0] = v;
    return p;
  }
}

template <class Payload>
std::uint64_t payload_word(const Payload& p) {
  if constexpr (std::is_arithmetic_v<Payload>)
    return static_cast<std::uint64_t>(p);
  else
    return p.words[0];
}

inline std::size_t error_bucket(std::size_t err) { return static_cast<std::size_t>(std::bit_width(err)); }

/// |predicted - actual| slot per probe key, bucketed by power of two.
template <class Key, class Payload>
std::map<std::size_t, std::uint64_t> error_histogram(const AlexIndex<Key, Payload>& idx, std::span<const Key> probes) {
  std::map<std::size_t, std::uint64_t> h;
  for (const Key& k : probes) {
    auto* leaf = idx.leaf_of(k);
    std::size_t cap = leaf->array.capacity();
    std::size_t pred = predict(leaf->model, k, cap);
    auto r = leaf->array.find(k, pred);
    if (!r.found) throw std::invalid_argument("error_histogram: probe key not present");
    h[error_bucket(pred > r.pos ? pred - r.pos : r.pos - pred)]++;
  }
  return h;
}

/// Same histogram over every stored key, read straight from the data nodes.
template <class Key, class Payload>
std::map<std::size_t, std::uint64_t> gapped_error_histogram(const AlexIndex<Key, Payload>& idx) {
  std::map<std::size_t, std::uint64_t> h;
  for (auto* d : idx.data_nodes()) {
    const auto& a = d->array;
    for (std::size_t i = a.first_occupied(); i < a.capacity(); i = a.next_occupied(i + 1)) {
      std::size_t pred = predict(d->model, a.key_at(i), a.capacity());
      h[error_bucket(pred > i ? pred - i : i - pred)]++;
    }
  }
  return h;
}

/// Errors if each data node stored its keys densely (slot = rank) and used
/// the same model rescaled to n slots.
template <class Key, class Payload>
std::map<std::size_t, std::uint64_t> dense_error_histogram(const AlexIndex<Key, Payload>& idx) {
  std::map<std::size_t, std::uint64_t> h;
  for (auto* d : idx.data_nodes()) {
    const auto& a = d->array;
    std::size_t n = a.size();
    if (n == 0) continue;
    LinearModel m = scale(d->model, static_cast<double>(n) / static_cast<double>(a.capacity()));
    std::size_t rank = 0;
    for (std::size_t i = a.first_occupied(); i < a.capacity(); i = a.next_occupied(i + 1), ++rank) {
      std::size_t pred = predict(m, a.key_at(i), n);
      h[error_bucket(pred > rank ? pred - rank : rank - pred)]++;
    }
  }
  return h;
}

inline double bucket_fraction(const std::map<std::size_t, std::uint64_t>& h, std::size_t bucket) {
  std::uint64_t total = 0;
  for (auto& [b, c] : h) total += c;
  auto it = h.find(bucket);
  return total && it != h.end() ? static_cast<double>(it->second) / static_cast<double>(total) : 0.0;
}

namespace detail {

template <class Index>
constexpr bool is_alex = requires(const Index& i) { i.actions(); };

inline LatencySummary summarize(std::vector<double>& samples) {
  LatencySummary s;
  if (samples.empty()) return s;
  std::sort(samples.begin(), samples.end());
  auto at = [&](double q) {
    auto i = static_cast<std::size_t>(std::ceil(q * static_cast<double>(samples.size()))) ;
    return samples[std::min(samples.size() - 1, i == 0 ? 0 : i - 1)];
  };
  s.p50 = at(0.5);
  s.p99 = at(0.99);
  s.p999 = at(0.999);
  s.max = samples.back();
  return s;
}

enum class Op : std::uint8_t { read, insert, scan };

}  // namespace detail

/// Bulk-loads spec.init_keys of `dataset`, then runs the interleaved mix on
/// `index`. dataset must be sorted and unique with at least total_keys keys.
template <class Index>
MetricsReport run_workload(Index& index, const std::string& index_kind, const std::vector<typename Index::key_type>& dataset,
                           const WorkloadSpec& spec) {
  using Key = typename Index::key_type;
  using Payload = typename Index::payload_type;
  using clock = std::chrono::steady_clock;

  std::size_t total = spec.total_keys ? std::min(spec.total_keys, dataset.size()) : dataset.size();
  if (spec.init_keys > total) throw std::invalid_argument("init_keys exceeds total_keys");
  if (spec.mix == Mix::custom && std::fabs(spec.read_pct + spec.insert_pct + spec.scan_pct - 100.0) > 1e-9)
    throw std::invalid_argument("custom mix percentages must sum to 100");

  std::mt19937_64 rng(spec.seed);
  std::vector<Key> order(dataset.begin(), dataset.begin() + static_cast<std::ptrdiff_t>(total));
  if (spec.shift == ShiftMode::shuffled) std::shuffle(order.begin(), order.end(), rng);
  std::vector<Key> init(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(spec.init_keys));
  std::sort(init.begin(), init.end());
  std::vector<Key> pending(order.begin() + static_cast<std::ptrdiff_t>(spec.init_keys), order.end());
  if (spec.shift == ShiftMode::smallest_first_random) std::shuffle(pending.begin(), pending.end(), rng);
  order.clear();
  order.shrink_to_fit();

  MetricsReport rep;
  rep.index_kind = index_kind;
  rep.dataset = spec.dataset;
  rep.mix = to_string(spec.mix);
  rep.shift = to_string(spec.shift);
  rep.payload_bytes = sizeof(Payload);
  rep.init_keys = init.size();

  {
    std::vector<Payload> payloads;
    payloads.reserve(init.size());
    for (Key k : init) payloads.push_back(payload_for<Payload>(k));
    auto t0 = clock::now();
    index.bulk_load(std::span<const Key>(init), std::span<const Payload>(payloads));
    rep.bulk_load_seconds = std::chrono::duration<double>(clock::now() - t0).count();
  }
  std::uint64_t shifts_before = 0;
  if constexpr (detail::is_alex<Index>) shifts_before = index.total_shifts();

  // existing keys: initial keys sorted, inserted keys appended
  std::vector<Key> existing = init;
  existing.reserve(init.size() + pending.size());
  std::size_t next_insert = 0;
  ZipfGenerator zipf(std::max<std::size_t>(existing.size(), 1), spec.zipf_theta);
  std::uniform_int_distribution<std::size_t> scan_len(1, std::max<std::size_t>(spec.max_scan_len, 1));
  std::uniform_real_distribution<double> pct(0.0, 100.0);

  struct ScanRecord {
    Key start;
    std::size_t len;
    std::size_t inserts_before;
    std::uint64_t checksum;
  };
  std::vector<ScanRecord> scans;
  std::vector<double> lat;
  std::uint64_t sink = 0;
  std::string read_error;

  auto next_op = [&](std::uint64_t i) {
    switch (spec.mix) {
      case Mix::read_only: return detail::Op::read;
      case Mix::write_only: return detail::Op::insert;
      case Mix::read_heavy: return i % 20 == 19 ? detail::Op::insert : detail::Op::read;
      case Mix::short_range: return i % 20 == 19 ? detail::Op::insert : detail::Op::scan;
      case Mix::write_heavy: return i % 2 == 1 ? detail::Op::insert : detail::Op::read;
      case Mix::custom: {
        double p = pct(rng);
        if (p < spec.read_pct) return detail::Op::read;
        if (p < spec.read_pct + spec.insert_pct) return detail::Op::insert;
        return detail::Op::scan;
      }
    }
    return detail::Op::read;
  };

  bool timed = spec.seconds > 0;
  std::uint64_t budget = spec.ops ? spec.ops : (timed ? std::numeric_limits<std::uint64_t>::max() : 0);
  auto start = clock::now();
  auto deadline = start + std::chrono::duration_cast<clock::duration>(std::chrono::duration<double>(spec.seconds));
  std::uint64_t i = 0;
  for (; i < budget; ++i) {
    if (timed && (i & 255) == 0 && clock::now() >= deadline) break;
    detail::Op op = next_op(i);
    if ((op == detail::Op::read || op == detail::Op::scan) && existing.empty()) op = detail::Op::insert;
    if (op == detail::Op::insert && next_insert >= pending.size()) {
      rep.dataset_exhausted = true;
      break;
    }
    bool sample = spec.latency_stride && i % spec.latency_stride == 0;
    auto t0 = sample ? clock::now() : clock::time_point{};
    switch (op) {
      case detail::Op::read: {
        Key k = existing[zipf(rng)];
        Payload* p = index.find(k);
        if (!p || payload_word(*p) != payload_word(payload_for<Payload>(k))) {
          if (read_error.empty()) read_error = "lookup of an existing key failed";
        } else {
          sink += payload_word(*p);
        }
        rep.reads++;
        break;
      }
      case detail::Op::insert: {
        Key k = pending[next_insert++];
        index.insert(k, payload_for<Payload>(k));
        existing.push_back(k);
        zipf.grow(existing.size());
        rep.inserts++;
        break;
      }
      case detail::Op::scan: {
        Key s = existing[zipf(rng)];
        std::size_t len = scan_len(rng);
        std::uint64_t h = 0;
        std::size_t got = 0;
        index.scan(s, [&](const Key& k, const Payload& p) {
          h = mix64(h ^ key_bits(k)) + payload_word(p);
          return ++got < len;
        });
        rep.scans++;
        rep.scanned_keys += got;
        if (spec.verify) scans.push_back({s, len, next_insert, h});
        sink += h;
        break;
      }
    }
    if (sample) lat.push_back(std::chrono::duration<double, std::nano>(clock::now() - t0).count());
  }
  rep.elapsed_seconds = std::chrono::duration<double>(clock::now() - start).count();
  rep.ops = i;
  rep.ops_per_second = rep.elapsed_seconds > 0 ? static_cast<double>(i) / rep.elapsed_seconds : 0.0;
  rep.latency = detail::summarize(lat);
  rep.index_bytes = index.index_bytes();
  rep.data_bytes = index.data_bytes();
  rep.final_keys = index.size();
  rep.checksum = sink;

  if constexpr (detail::is_alex<Index>) {
    auto a = index.audit();
    auto& n = rep.node_stats;
    n.avg_depth = a.avg_depth;
    n.max_depth = a.max_depth;
    n.num_internal_nodes = a.num_internal_nodes;
    n.num_data_nodes = a.num_data_nodes;
    n.min_data_node_bytes = a.min_data_node_bytes;
    n.median_data_node_bytes = a.median_data_node_bytes;
    n.max_data_node_bytes = a.max_data_node_bytes;
    for (auto* d : index.data_nodes()) n.max_node_keys = std::max(n.max_node_keys, d->array.size());
    const auto& c = a.actions;
    rep.action_counts = {{"expand_scale", c.expand_scale},
                         {"expand_retrain", c.expand_retrain},
                         {"split_sideways", c.split_sideways},
                         {"split_downwards", c.split_downwards},
                         {"expand_append", c.expand_append},
                         {"forced_splits", c.forced_splits},
                         {"periodic_retrain", c.periodic_retrain},
                         {"periodic_sideways", c.periodic_sideways},
                         {"periodic_downwards", c.periodic_downwards},
                         {"contractions", c.contractions},
                         {"root_expansions", c.root_expansions},
                         {"internal_splits", c.internal_splits},
                         {"internal_doublings", c.internal_doublings}};
    rep.mean_shifts_per_insert =
        rep.inserts ? static_cast<double>(index.total_shifts() - shifts_before) / static_cast<double>(rep.inserts)
                    : 0.0;
    rep.error_histogram = gapped_error_histogram(index);
    if (!a.ok()) rep.verification_error = "audit: " + a.violations.front();
  } else {
    auto a = index.audit();
    if (!a.ok()) rep.verification_error = "audit: " + a.violations.front();
  }

  if (!spec.verify) return rep;
  if (rep.verification_error.empty() && !read_error.empty()) rep.verification_error = read_error;
  if (rep.verification_error.empty()) {
    // replay inserts and scans on an ordered set
    std::set<Key> oracle(init.begin(), init.end());
    std::size_t applied = 0;
    for (const auto& s : scans) {
      while (applied < s.inserts_before) oracle.insert(pending[applied++]);
      std::uint64_t h = 0;
      std::size_t got = 0;
      for (auto it = oracle.lower_bound(s.start); it != oracle.end() && got < s.len; ++it, ++got)
        h = mix64(h ^ key_bits(*it)) + payload_word(payload_for<Payload>(*it));
      if (h != s.checksum) {
        rep.verification_error = "scan result differs from oracle";
        break;
      }
    }
  }
  if (rep.verification_error.empty()) {
    std::vector<Key> expect(existing);
    std::sort(expect.begin(), expect.end());
    std::size_t pos = 0;
    bool same = true;
    index.for_each([&](const Key& k, const Payload& p) {
      if (pos >= expect.size() || !(k == expect[pos]) || payload_word(p) != payload_word(payload_for<Payload>(k)))
        same = false;
      ++pos;
    });
    if (!same || pos != expect.size()) rep.verification_error = "final contents differ from oracle";
  }
  rep.verified = rep.verification_error.empty();
  return rep;
}

}  // namespace alex::bench
