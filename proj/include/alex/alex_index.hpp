#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <unordered_set>
#include <utility>
#include <vector>

#include "alex/cost_model.hpp"
#include "alex/errors.hpp"
#include "alex/fanout_tree.hpp"
#include "alex/gapped_array.hpp"
#include "alex/linear_model.hpp"

namespace alex {

struct AlexConfig {
  std::size_t max_node_bytes = std::size_t{16} << 20;
  CostWeights weights{};
  double d_l = 0.6;
  double d_u = 0.8;
  double d_init = 0.7;                 // bulk load and split utilization
  double bulk_insert_fraction = 0.5;   // F assumed for bulk-loaded nodes
  std::size_t min_data_capacity = 16;
  std::size_t empty_data_capacity = 64;
  std::size_t check_interval = 64;     // inserts between periodic checks; also the fewest operations
                                       // before empirical costs are compared
  double forced_split_shifts = 100.0;  // mean shifts per insert that forces a split
  bool periodic_deviation_checks = true;
  std::optional<std::pair<double, double>> key_space;  // [lo, hi) for an empty index
};

/// How each full-node event (and each periodic action) was resolved.
struct ActionCounters {
  std::uint64_t expand_scale = 0;
  std::uint64_t expand_retrain = 0;
  std::uint64_t split_sideways = 0;
  std::uint64_t split_downwards = 0;
  std::uint64_t expand_append = 0;
  std::uint64_t forced_splits = 0;
  std::uint64_t periodic_retrain = 0;
  std::uint64_t periodic_sideways = 0;
  std::uint64_t periodic_downwards = 0;
  std::uint64_t contractions = 0;
  std::uint64_t root_expansions = 0;
  std::uint64_t internal_splits = 0;
  std::uint64_t internal_doublings = 0;

  std::uint64_t full_resolutions() const {
    return expand_scale + expand_retrain + split_sideways + split_downwards + expand_append;
  }
};

enum class Resolution { expand_retrain, split_sideways, split_downwards };

struct ResolutionOption {
  Resolution kind;
  bool feasible = false;
  double cost = std::numeric_limits<double>::infinity();  // n*C_I + n*w_d*D + N*w_b*dB
};

struct AuditReport {
  std::vector<std::string> violations;
  std::size_t num_keys = 0;
  std::size_t num_data_nodes = 0;
  std::size_t num_internal_nodes = 0;
  double avg_depth = 0.0;  // per key
  std::size_t max_depth = 0;
  std::size_t min_data_node_bytes = 0;
  std::size_t median_data_node_bytes = 0;
  std::size_t max_data_node_bytes = 0;
  std::size_t index_bytes = 0;
  std::size_t data_bytes = 0;
  std::size_t structure_bytes = 0;
  ActionCounters actions{};

  bool ok() const { return violations.empty(); }
};

template <class Key, class Payload>
class AlexIndex {
  static_assert(std::is_arithmetic_v<Key>, "keys must be numeric");

 public:
  using key_type = Key;
  using payload_type = Payload;

  struct NodeBase {
    bool leaf;
    double t_lo;     // key space, in grid units
    double t_width;
  };

  struct DataNode : NodeBase {
    GappedArray<Key, Payload> array;
    LinearModel model;
    NodeStats stats;
    ExpectedStats expected;
    DataNode* prev = nullptr;
    DataNode* next = nullptr;
    Key max_key_seen{};
    Key min_key_seen{};
    bool seen_any = false;
    std::uint64_t inserts_since_creation = 0;
    std::uint64_t oob_right = 0;
    std::uint64_t oob_left = 0;
    std::uint64_t inserts_since_check = 0;
    std::uint64_t shifts_since_check = 0;
  };

  struct InternalNode : NodeBase {
    std::vector<NodeBase*> children;
    LinearModel route;  // x -> fractional slot
  };

  struct PathEntry {
    InternalNode* node;
    std::size_t slot;
  };

  static constexpr std::size_t kDataNodeHeaderBytes =
      sizeof(LinearModel) + sizeof(NodeStats) + sizeof(ExpectedStats) + 2 * sizeof(void*) + 2 * sizeof(Key) +
      6 * sizeof(std::uint64_t) + 2 * sizeof(double) + 2 * sizeof(std::size_t);
  static constexpr std::size_t kInternalHeaderBytes =
      sizeof(LinearModel) + 2 * sizeof(double) + sizeof(std::size_t);

  static std::size_t bitmap_bytes_for(std::size_t cap) { return (cap + 63) / 64 * sizeof(std::uint64_t); }
  /// Cost-model structure bytes of a data node: metadata plus bitmap.
  static std::size_t data_node_meta_bytes(std::size_t cap) { return kDataNodeHeaderBytes + bitmap_bytes_for(cap); }
  /// Key/payload slots plus bitmap.
  static std::size_t data_node_data_bytes(std::size_t cap) {
    return cap * (sizeof(Key) + sizeof(Payload)) + bitmap_bytes_for(cap);
  }
  static std::size_t internal_node_bytes(std::size_t slots) {
    return kInternalHeaderBytes + slots * sizeof(void*);
  }

  explicit AlexIndex(AlexConfig cfg = {}) : cfg_(std::move(cfg)) {
    if (!(cfg_.d_l > 0 && cfg_.d_l < cfg_.d_u && cfg_.d_u <= 1.0)) throw std::invalid_argument("bad densities");
    max_internal_slots_ = std::bit_floor(std::max<std::size_t>(cfg_.max_node_bytes / sizeof(void*), 2));
    std::size_t cap = cfg_.max_node_bytes / (sizeof(Key) + sizeof(Payload));
    while (cap > 0 && data_node_data_bytes(cap) > cfg_.max_node_bytes) --cap;
    max_data_capacity_ = std::max<std::size_t>(cap, cfg_.min_data_capacity);
    init_empty();
  }

  ~AlexIndex() { destroy(root_); }
  AlexIndex(const AlexIndex&) = delete;
  AlexIndex& operator=(const AlexIndex&) = delete;
  AlexIndex(AlexIndex&& o) noexcept { steal(o); }
  AlexIndex& operator=(AlexIndex&& o) noexcept {
    if (this != &o) {
      destroy(root_);
      steal(o);
    }
    return *this;
  }

  const AlexConfig& config() const { return cfg_; }
  std::size_t size() const { return num_keys_; }
  bool empty() const { return num_keys_ == 0; }
  const ActionCounters& actions() const { return actions_; }
  /// Elements moved by all inserts since the last bulk load.
  std::uint64_t total_shifts() const { return total_shifts_; }
  std::size_t max_data_capacity() const { return max_data_capacity_; }
  std::size_t max_internal_slots() const { return max_internal_slots_; }

  /// Cost-model structure size: internal nodes plus data-node metadata and bitmaps.
  std::size_t structure_bytes() const { return structure_bytes_; }
  /// Models, internal slot arrays and node metadata.
  std::size_t index_bytes() const { return index_bytes_; }
  /// Key/payload slots including gaps, plus bitmaps.
  std::size_t data_bytes() const { return data_bytes_; }

  void clear() {
    destroy(root_);
    init_empty();
  }

  void bulk_load(std::span<const Key> keys, std::span<const Payload> payloads) {
    if (keys.size() != payloads.size()) throw std::invalid_argument("keys/payloads length mismatch");
    for (std::size_t i = 0; i < keys.size(); ++i) {
      validate_key(keys[i]);
      if (i && !(keys[i - 1] < keys[i])) throw std::invalid_argument("bulk_load keys must be strictly increasing");
    }
    destroy(root_);
    root_ = nullptr;
    reset_counters();
    if (keys.empty()) {
      init_empty();
      return;
    }
    double lo = key_to_double(keys.front()), hi = key_to_double(keys.back());
    double unit = hi > lo ? (hi - lo) * (1.0 + 1.0 / 1024) : std::max(1.0, std::fabs(lo) * 0x1p-40);
    while (!(lo + unit > hi)) unit *= 2;
    origin_ = lo;
    unit_ = unit;
    bulk_total_ = keys.size();
    root_ = build_subtree(keys, payloads, 0.0, 1.0, 0, cfg_.bulk_insert_fraction);
    num_keys_ = keys.size();
    relink_all_leaves();
  }

  void bulk_load(std::span<const std::pair<Key, Payload>> pairs) {
    std::vector<Key> k;
    std::vector<Payload> p;
    k.reserve(pairs.size());
    p.reserve(pairs.size());
    for (auto& [a, b] : pairs) {
      k.push_back(a);
      p.push_back(b);
    }
    bulk_load(std::span<const Key>(k), std::span<const Payload>(p));
  }

  Payload* find(const Key& key) {
    if (!valid_key(key)) return nullptr;
    double x = key_to_double(key);
    if (!in_root(x)) return nullptr;
    DataNode* leaf = leaf_for(x);
    auto r = leaf->array.find(key, predict(leaf->model, key, leaf->array.capacity()));
    leaf->stats.num_lookups++;
    leaf->stats.cum_search_iterations += r.iterations;
    return r.found ? &leaf->array.payload_at(r.pos) : nullptr;
  }

  bool contains(const Key& key) { return find(key) != nullptr; }

  bool update(const Key& key, const Payload& payload) {
    Payload* p = find(key);
    if (!p) return false;
    *p = payload;
    return true;
  }

  void insert(const Key& key, const Payload& payload) {
    validate_key(key);
    double x = key_to_double(key);
    while (!in_root(x)) expand_root(x);
    for (;;) {
      DataNode* leaf = leaf_for(x);
      auto& a = leaf->array;
      double raw = leaf->model.raw(x);
      std::size_t pred = clamp_slot(raw, a.capacity());
      auto fr = a.find(key, pred);
      if (fr.found) throw duplicate_key_error("key already exists");
      if (is_full(leaf)) {
        resolve_full_node(leaf, x);
        continue;
      }
      std::size_t slot = a.insert_slot(fr.pos, pred, raw);
      std::size_t shifts = a.insert_at(slot, key, payload);
      leaf->stats.num_inserts++;
      leaf->stats.cum_search_iterations += fr.iterations;
      leaf->stats.cum_shifts += shifts;
      total_shifts_ += shifts;
      note_insert(leaf, key, shifts);
      ++num_keys_;
      if (leaf->inserts_since_check >= cfg_.check_interval) periodic_check(leaf, x);
      return;
    }
  }

  bool erase(const Key& key) {
    if (!valid_key(key)) return false;
    double x = key_to_double(key);
    if (!in_root(x)) return false;
    DataNode* leaf = leaf_for(x);
    auto& a = leaf->array;
    auto r = a.find(key, predict(leaf->model, key, a.capacity()));
    leaf->stats.num_lookups++;
    leaf->stats.cum_search_iterations += r.iterations;
    if (!r.found) return false;
    a.erase_at(r.pos);
    --num_keys_;
    double mid = (cfg_.d_l + cfg_.d_u) / 2;
    if (static_cast<double>(a.size()) < cfg_.d_l * static_cast<double>(a.capacity())) {
      std::size_t target =
          std::max(static_cast<std::size_t>(std::ceil(static_cast<double>(a.size()) / mid)), cfg_.min_data_capacity);
      if (target < a.capacity()) {
        resize_scaled(leaf, target);
        actions_.contractions++;
      }
    }
    return true;
  }

  /// Visit pairs with key >= start in order until f returns false.
  template <class F>
  void scan(const Key& start, F&& f) const {
    const DataNode* leaf;
    std::size_t pos = 0;
    double x = key_to_double(start);
    if (std::isnan(x)) return;
    if (x < lower_bound_x()) {
      leaf = first_leaf();
    } else if (x >= upper_bound_x()) {
      return;
    } else {
      leaf = leaf_for(x);
      pos = leaf->array.lower_bound(predict(leaf->model, start, leaf->array.capacity()), start).pos;
    }
    bool go = true;
    while (leaf && go) {
      leaf->array.scan(pos, [&](const Key& k, const Payload& p) { return go = f(k, p); });
      leaf = leaf->next;
      pos = 0;
    }
  }

  /// Pairs with start <= key < end.
  std::vector<std::pair<Key, Payload>> range(const Key& start, const Key& end) const {
    std::vector<std::pair<Key, Payload>> out;
    if (!(start < end)) return out;
    scan(start, [&](const Key& k, const Payload& p) {
      if (!(k < end)) return false;
      out.emplace_back(k, p);
      return true;
    });
    return out;
  }

  /// Up to `count` pairs with key >= start.
  std::vector<std::pair<Key, Payload>> range_count(const Key& start, std::size_t count) const {
    std::vector<std::pair<Key, Payload>> out;
    if (count == 0) return out;
    scan(start, [&](const Key& k, const Payload& p) {
      out.emplace_back(k, p);
      return out.size() < count;
    });
    return out;
  }

  template <class F>
  void for_each(F&& f) const {
    for (const DataNode* d = first_leaf(); d; d = d->next) d->array.scan(0, [&](const Key& k, const Payload& p) {
        f(k, p);
        return true;
      });
  }

  // ---- introspection ----

  std::vector<const DataNode*> data_nodes() const {
    std::vector<const DataNode*> out;
    for (const DataNode* d = first_leaf(); d; d = d->next) out.push_back(d);
    return out;
  }

  const NodeBase* root() const { return root_; }

  /// Depth (number of internal nodes above) of the leaf holding x.
  std::size_t depth_of(const Key& key) const { return path_to(key_to_double(key)).size(); }

  const DataNode* leaf_of(const Key& key) const { return leaf_for(key_to_double(key)); }

  double boundary(double t) const { return origin_ + t * unit_; }
  double lower_bound_x() const { return boundary(root_->t_lo); }
  double upper_bound_x() const { return boundary(root_->t_lo + root_->t_width); }

  /// Key-weighted mean of intra + traverse cost over data nodes. Nodes with no
  /// recorded operations use their expected statistics.
  double composite_cost() const {
    std::vector<NodeCost> costs;
    collect_costs(root_, 0, costs);
    return composite_index_cost(costs);
  }

  /// Cost of each resolution for the data node holding key, as used by the
  /// decision policy.
  std::vector<ResolutionOption> evaluate_resolution_options(const Key& key) const {
    double x = key_to_double(key);
    auto path = path_to(x);
    DataNode* leaf = leaf_for(x);
    Plan plan = plan_options(leaf, path, current_insert_fraction(leaf), true);
    return plan.options;
  }

  /// Execute a specific resolution on the data node holding key.
  void apply_resolution(const Key& key, Resolution kind) {
    double x = key_to_double(key);
    auto path = path_to(x);
    DataNode* leaf = leaf_for(x);
    Plan plan = plan_options(leaf, path, current_insert_fraction(leaf), true);
    execute(plan, kind, x);
  }

  AuditReport audit() const {
    AuditReport rep;
    rep.actions = actions_;
    std::size_t structure = 0, index = 0, data = 0, keys = 0;
    double depth_sum = 0;
    std::vector<std::size_t> dn_bytes;
    std::vector<const DataNode*> leaves;
    std::unordered_set<const NodeBase*> seen;
    audit_node(root_, 0, rep, structure, index, data, keys, depth_sum, dn_bytes, leaves, seen);

    std::vector<const DataNode*> chain;
    const DataNode* prev = nullptr;
    for (const DataNode* d = first_leaf(); d && chain.size() <= leaves.size(); d = d->next) {
      if (d->prev != prev) rep.violations.push_back("leaf chain prev link broken");
      chain.push_back(d);
      prev = d;
    }
    if (chain != leaves) rep.violations.push_back("leaf chain does not visit data nodes in key order");
    if (keys != num_keys_)
      rep.violations.push_back("key count " + std::to_string(keys) + " != tracked " + std::to_string(num_keys_));
    if (structure != structure_bytes_) rep.violations.push_back("structure byte counter out of sync");
    if (index != index_bytes_) rep.violations.push_back("index byte counter out of sync");
    if (data != data_bytes_) rep.violations.push_back("data byte counter out of sync");

    rep.num_keys = keys;
    rep.num_data_nodes = leaves.size();
    rep.avg_depth = keys ? depth_sum / static_cast<double>(keys) : 0.0;
    std::sort(dn_bytes.begin(), dn_bytes.end());
    if (!dn_bytes.empty()) {
      rep.min_data_node_bytes = dn_bytes.front();
      rep.median_data_node_bytes = dn_bytes[dn_bytes.size() / 2];
      rep.max_data_node_bytes = dn_bytes.back();
    }
    rep.index_bytes = index_bytes_;
    rep.data_bytes = data_bytes_;
    rep.structure_bytes = structure_bytes_;
    return rep;
  }

 private:
  struct Half {
    std::size_t begin = 0, end = 0;
    std::size_t capacity = 0;
    LinearModel model;
    ExpectedStats stats;
    bool oversize = false;
  };

  struct Plan {
    DataNode* leaf = nullptr;
    std::vector<Key> keys;
    std::vector<Payload> payloads;
    double F = 0;
    std::size_t depth = 0;
    bool splittable = false;
    std::size_t expand_capacity = 0;
    LinearModel expand_model;
    ExpectedStats expand_stats;
    Half left, right;
    std::vector<ResolutionOption> options;
  };

  // ---- keys ----

  static bool valid_key(const Key& k) {
    if constexpr (std::is_floating_point_v<Key>) {
      if (!std::isfinite(k)) return false;
    }
    return !(k == sentinel_key<Key>());
  }

  static void validate_key(const Key& k) {
    if (!valid_key(k)) throw std::invalid_argument("key is reserved or not finite");
  }

  // ---- routing ----

  double slot_boundary(const InternalNode* in, std::size_t i) const {
    return boundary(in->t_lo + static_cast<double>(i) * (in->t_width / static_cast<double>(in->children.size())));
  }

  std::size_t route(const InternalNode* in, double x) const {
    std::size_t n = in->children.size();
    std::size_t s = clamp_slot(in->route.raw(x), n);
    while (s > 0 && x < slot_boundary(in, s)) --s;
    while (s + 1 < n && x >= slot_boundary(in, s + 1)) ++s;
    return s;
  }

  void set_route(InternalNode* in) const {
    double n = static_cast<double>(in->children.size());
    double slope = n / (in->t_width * unit_);
    in->route = {slope, -(boundary(in->t_lo)) * slope};
  }

  DataNode* leaf_for(double x) const {
    NodeBase* n = root_;
    while (!n->leaf) {
      auto* in = static_cast<InternalNode*>(n);
      n = in->children[route(in, x)];
    }
    return static_cast<DataNode*>(n);
  }

  std::vector<PathEntry> path_to(double x) const {
    std::vector<PathEntry> path;
    NodeBase* n = root_;
    while (!n->leaf) {
      auto* in = static_cast<InternalNode*>(n);
      std::size_t s = route(in, x);
      path.push_back({in, s});
      n = in->children[s];
    }
    return path;
  }

  bool in_root(double x) const { return x >= lower_bound_x() && x < upper_bound_x(); }

  const DataNode* first_leaf() const {
    const NodeBase* n = root_;
    while (!n->leaf) n = static_cast<const InternalNode*>(n)->children.front();
    return static_cast<const DataNode*>(n);
  }
  DataNode* first_leaf() {
    return const_cast<DataNode*>(static_cast<const AlexIndex*>(this)->first_leaf());
  }
  DataNode* last_leaf() {
    NodeBase* n = root_;
    while (!n->leaf) n = static_cast<InternalNode*>(n)->children.back();
    return static_cast<DataNode*>(n);
  }

  // ---- node lifetime and accounting ----

  void account(const NodeBase* n, int sign) {
    std::size_t s, i, d;
    node_bytes(n, s, i, d);
    if (sign > 0) {
      structure_bytes_ += s;
      index_bytes_ += i;
      data_bytes_ += d;
    } else {
      structure_bytes_ -= s;
      index_bytes_ -= i;
      data_bytes_ -= d;
    }
  }

  static void node_bytes(const NodeBase* n, std::size_t& structure, std::size_t& index, std::size_t& data) {
    if (n->leaf) {
      auto* d = static_cast<const DataNode*>(n);
      std::size_t cap = d->array.capacity();
      structure = data_node_meta_bytes(cap);
      index = kDataNodeHeaderBytes;
      data = data_node_data_bytes(cap);
    } else {
      auto* in = static_cast<const InternalNode*>(n);
      structure = index = internal_node_bytes(in->children.size());
      data = 0;
    }
  }

  void destroy(NodeBase* n) {
    if (!n) return;
    if (n->leaf) {
      delete static_cast<DataNode*>(n);
      return;
    }
    auto* in = static_cast<InternalNode*>(n);
    NodeBase* last = nullptr;
    for (NodeBase* c : in->children) {
      if (c != last) destroy(c);
      last = c;
    }
    delete in;
  }

  void release(NodeBase* n) {
    account(n, -1);
    if (n->leaf)
      delete static_cast<DataNode*>(n);
    else
      delete static_cast<InternalNode*>(n);
  }

  void steal(AlexIndex& o) {
    cfg_ = o.cfg_;
    root_ = o.root_;
    origin_ = o.origin_;
    unit_ = o.unit_;
    num_keys_ = o.num_keys_;
    bulk_total_ = o.bulk_total_;
    structure_bytes_ = o.structure_bytes_;
    index_bytes_ = o.index_bytes_;
    data_bytes_ = o.data_bytes_;
    actions_ = o.actions_;
    total_shifts_ = o.total_shifts_;
    max_internal_slots_ = o.max_internal_slots_;
    max_data_capacity_ = o.max_data_capacity_;
    o.root_ = nullptr;
    o.init_empty();
  }

  void reset_counters() {
    num_keys_ = 0;
    structure_bytes_ = index_bytes_ = data_bytes_ = 0;
    total_shifts_ = 0;
    actions_ = {};
  }

  void init_empty() {
    reset_counters();
    double lo, hi;
    if (cfg_.key_space) {
      lo = cfg_.key_space->first;
      hi = cfg_.key_space->second;
      if (!(lo < hi) || !std::isfinite(hi - lo)) throw std::invalid_argument("bad key space");
    } else if constexpr (std::is_floating_point_v<Key>) {
      lo = -0x1p1022;
      hi = 0x1p1022;
    } else {
      lo = static_cast<double>(std::numeric_limits<Key>::min());
      hi = static_cast<double>(std::numeric_limits<Key>::max());
      if (hi <= lo) hi = lo + 1;
    }
    origin_ = lo;
    unit_ = hi - lo;
    bulk_total_ = 0;
    root_ = make_empty_data_node(0.0, 1.0, cfg_.bulk_insert_fraction);
  }

  InternalNode* make_internal(double t_lo, double t_width, std::size_t slots) {
    auto* in = new InternalNode();
    in->leaf = false;
    in->t_lo = t_lo;
    in->t_width = t_width;
    in->children.assign(slots, nullptr);
    set_route(in);
    account(in, +1);
    return in;
  }

  void resize_internal(InternalNode* in, std::vector<NodeBase*> children) {
    account(in, -1);
    in->children = std::move(children);
    set_route(in);
    account(in, +1);
  }

  std::size_t capacity_for(std::size_t n, double density) const {
    if (n == 0) return cfg_.empty_data_capacity;
    return std::max(static_cast<std::size_t>(std::ceil(static_cast<double>(n) / density)), cfg_.min_data_capacity);
  }

  std::size_t expanded_capacity(std::size_t n) const {
    auto by_dl = static_cast<std::size_t>(std::ceil(static_cast<double>(n) / cfg_.d_l));
    auto by_du = static_cast<std::size_t>(std::ceil(static_cast<double>(n + 2) / cfg_.d_u));
    return std::max({by_dl, by_du, cfg_.min_data_capacity});
  }

  bool fits(std::size_t cap) const { return data_node_data_bytes(cap) <= cfg_.max_node_bytes; }

  DataNode* make_empty_data_node(double t_lo, double t_width, double F) {
    auto* d = new DataNode();
    d->leaf = true;
    d->t_lo = t_lo;
    d->t_width = t_width;
    std::size_t cap = cfg_.empty_data_capacity;
    d->array = GappedArray<Key, Payload>(cap);
    double lo = boundary(t_lo), width = t_width * unit_;
    double slope = static_cast<double>(cap) / width;
    d->model = {slope, -lo * slope};
    d->expected.insert_fraction = F;
    account(d, +1);
    return d;
  }

  DataNode* make_data_node(std::span<const Key> keys, std::span<const Payload> payloads, double t_lo, double t_width,
                           std::size_t cap, const LinearModel& model, const ExpectedStats& expected) {
    if (keys.empty()) return make_empty_data_node(t_lo, t_width, expected.insert_fraction);
    auto* d = new DataNode();
    d->leaf = true;
    d->t_lo = t_lo;
    d->t_width = t_width;
    d->array = GappedArray<Key, Payload>::build_model_based(keys, payloads, model, cap);
    d->model = model;
    d->expected = expected;
    d->max_key_seen = keys.back();
    d->min_key_seen = keys.front();
    d->seen_any = true;
    account(d, +1);
    return d;
  }

  // fit on ranks scaled to the given capacity
  static LinearModel capacity_model(std::span<const Key> keys, std::size_t cap, bool progressive) {
    LinearModel m = progressive ? fit_progressive(keys) : fit_ranks(keys);
    return scale(m, static_cast<double>(cap) / static_cast<double>(keys.size()));
  }

  // ---- bulk load ----

  std::vector<std::size_t> partition_keys(std::span<const Key> keys, double t_lo, double t_width, int level) const {
    std::size_t parts = std::size_t{1} << level;
    std::vector<std::size_t> cuts(parts + 1);
    cuts[0] = 0;
    cuts[parts] = keys.size();
    double step = t_width / static_cast<double>(parts);
    std::size_t from = 0;
    for (std::size_t i = 1; i < parts; ++i) {
      double b = boundary(t_lo + static_cast<double>(i) * step);
      auto it = std::partition_point(keys.begin() + from, keys.end(),
                                     [&](const Key& k) { return key_to_double(k) < b; });
      from = static_cast<std::size_t>(it - keys.begin());
      cuts[i] = from;
    }
    return cuts;
  }

  bool can_halve(double t_lo, double t_width) const {
    double lo = boundary(t_lo), mid = boundary(t_lo + t_width / 2), hi = boundary(t_lo + t_width);
    return t_width / 2 > 0 && lo < mid && mid < hi;
  }

  NodeBase* build_subtree(std::span<const Key> keys, std::span<const Payload> payloads, double t_lo,
                          double t_width, std::size_t depth, double F) {
    std::size_t n = keys.size();
    if (n == 0) return make_empty_data_node(t_lo, t_width, F);
    auto as_data = [&] {
      std::size_t cap = capacity_for(n, cfg_.d_init);
      LinearModel m = capacity_model(keys, cap, true);
      ExpectedStats e = expected_stats(keys, m, cap, F);
      return make_data_node(keys, payloads, t_lo, t_width, cap, m, e);
    };
    bool separable = key_to_double(keys.front()) < key_to_double(keys.back()) && can_halve(t_lo, t_width);
    if (!separable) return as_data();

    const auto& w = cfg_.weights;
    double total = static_cast<double>(std::max(bulk_total_, n));
    int max_level = std::countr_zero(max_internal_slots_);
    auto partition = [&](int L) { return partition_keys(keys, t_lo, t_width, L); };
    // weighted intra cost plus the node's share of structure bytes
    auto node_cost = [&](std::size_t b, std::size_t e) {
      std::size_t m = e - b;
      std::size_t cap = m ? capacity_for(m, cfg_.d_init) : cfg_.empty_data_capacity;
      if (!fits(cap)) return std::numeric_limits<double>::infinity();
      double bytes = w.w_b * total * static_cast<double>(data_node_meta_bytes(cap));
      if (m == 0) return bytes;
      auto sub = keys.subspan(b, m);
      LinearModel model = capacity_model(sub, cap, true);
      auto est = expected_stats_sampled(sub, model, cap, F);
      return intra_node_cost(est.stats, w) * static_cast<double>(m) + bytes;
    };
    auto overhead = [&](int L) {
      double bytes = static_cast<double>(internal_node_bytes(std::size_t{1} << L));
      return w.w_d + w.w_b * bytes * total / static_cast<double>(n);
    };
    FanoutDecision fd = build_fanout_tree(n, max_level, partition, node_cost, overhead, depth == 0);
    if (fd.fanout_level == 0) return as_data();

    std::size_t slots = std::size_t{1} << fd.fanout_level;
    InternalNode* in = make_internal(t_lo, t_width, slots);
    for (const auto& f : fd.covering) {
      double w_t = t_width / static_cast<double>(std::size_t{1} << f.level);
      double c_lo = t_lo + static_cast<double>(f.index_in_level) * w_t;
      NodeBase* child = build_subtree(keys.subspan(f.key_begin, f.key_count),
                                      payloads.subspan(f.key_begin, f.key_count), c_lo, w_t, depth + 1, F);
      std::size_t run = std::size_t{1} << (fd.fanout_level - f.level);
      std::size_t first = f.index_in_level * run;
      for (std::size_t s = first; s < first + run; ++s) in->children[s] = child;
    }
    return in;
  }

  void collect_leaves(NodeBase* n, std::vector<DataNode*>& out) {
    if (n->leaf) {
      out.push_back(static_cast<DataNode*>(n));
      return;
    }
    NodeBase* last = nullptr;
    for (NodeBase* c : static_cast<InternalNode*>(n)->children) {
      if (c != last) collect_leaves(c, out);
      last = c;
    }
  }

  void relink_all_leaves() {
    std::vector<DataNode*> leaves;
    collect_leaves(root_, leaves);
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      leaves[i]->prev = i ? leaves[i - 1] : nullptr;
      leaves[i]->next = i + 1 < leaves.size() ? leaves[i + 1] : nullptr;
    }
  }

  // put the leaves of left then right into the chain where old sat
  void relink(DataNode* old, NodeBase* left, NodeBase* right) {
    std::vector<DataNode*> leaves;
    collect_leaves(left, leaves);
    if (right) collect_leaves(right, leaves);
    DataNode* p = old->prev;
    DataNode* nx = old->next;
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      leaves[i]->prev = i ? leaves[i - 1] : p;
      leaves[i]->next = i + 1 < leaves.size() ? leaves[i + 1] : nx;
    }
    if (p) p->next = leaves.front();
    if (nx) nx->prev = leaves.back();
  }

  // ---- inserts ----

  bool is_full(const DataNode* d) const {
    return static_cast<double>(d->array.size() + 1) > cfg_.d_u * static_cast<double>(d->array.capacity());
  }

  void note_insert(DataNode* d, const Key& key, std::size_t shifts) {
    if (!d->seen_any || d->max_key_seen < key) {
      d->oob_right++;
      d->max_key_seen = key;
    }
    if (!d->seen_any || key < d->min_key_seen) {
      d->oob_left++;
      d->min_key_seen = key;
    }
    d->seen_any = true;
    d->inserts_since_creation++;
    d->inserts_since_check++;
    d->shifts_since_check += shifts;
  }

  double current_insert_fraction(const DataNode* d) const {
    return d->stats.operations() ? d->stats.insert_fraction() : d->expected.insert_fraction;
  }

  // +1 mostly appending on the right, -1 on the left, 0 neither
  static int append_side(const DataNode* d) {
    if (2 * d->oob_right > d->inserts_since_creation) return 1;
    if (2 * d->oob_left > d->inserts_since_creation) return -1;
    return 0;
  }

  // refit over the keys; append-mostly nodes keep their keys packed on the
  // old side so the new slots stay empty
  LinearModel retrain_model(const DataNode* d, std::span<const Key> keys, std::size_t cap) const {
    int side = append_side(d);
    if (keys.empty()) return d->model;
    if (side == 0) return capacity_model(keys, cap, false);
    std::size_t used = std::min(cap, capacity_for(keys.size(), cfg_.d_u));
    LinearModel m = capacity_model(keys, used, false);
    if (side < 0) m.intercept += static_cast<double>(cap - used);
    return m;
  }

  bool maybe_append_expand(DataNode* d) {
    std::size_t n = d->array.size(), cap = d->array.capacity();
    std::size_t target = expanded_capacity(n);
    if (target <= cap || !fits(target)) return false;
    if (2 * d->oob_right > d->inserts_since_creation) {
      account(d, -1);
      d->array.grow_right(target - cap);
      account(d, +1);
      actions_.expand_append++;
      return true;
    }
    if (2 * d->oob_left > d->inserts_since_creation) {
      account(d, -1);
      d->array.grow_left(target - cap);
      d->model.intercept += static_cast<double>(target - cap);
      account(d, +1);
      actions_.expand_append++;
      return true;
    }
    return false;
  }

  void resize_scaled(DataNode* d, std::size_t cap) {
    std::vector<Key> keys;
    std::vector<Payload> payloads;
    d->array.extract(keys, payloads);
    LinearModel m = scale(d->model, static_cast<double>(cap) / static_cast<double>(d->array.capacity()));
    account(d, -1);
    d->array = GappedArray<Key, Payload>::build_model_based(keys, payloads, m, cap);
    d->model = m;
    account(d, +1);
  }

  void resolve_full_node(DataNode* leaf, double x) {
    if (maybe_append_expand(leaf)) return;
    double F = current_insert_fraction(leaf);
    const auto& w = cfg_.weights;
    double exp_cost = intra_node_cost(leaf->expected.expected_search_iters, leaf->expected.expected_shifts, F, w);
    double emp_cost = intra_node_cost(leaf->stats.search_avg(), leaf->stats.shifts_avg(), F, w);
    std::size_t cap = expanded_capacity(leaf->array.size());
    bool trusted = leaf->stats.operations() >= cfg_.check_interval;
    if (!(trusted && deviation_detected(exp_cost, emp_cost, w.w_s)) && fits(cap)) {
      resize_scaled(leaf, cap);
      actions_.expand_scale++;
      return;
    }
    auto path = path_to(x);
    Plan plan = plan_options(leaf, path, F, true);
    Resolution r = cheapest(plan);
    execute(plan, r, x);
    switch (r) {
      case Resolution::expand_retrain: actions_.expand_retrain++; break;
      case Resolution::split_sideways: actions_.split_sideways++; break;
      case Resolution::split_downwards: actions_.split_downwards++; break;
    }
  }

  void periodic_check(DataNode* leaf, double x) {
    double avg = static_cast<double>(leaf->shifts_since_check) / static_cast<double>(leaf->inserts_since_check);
    leaf->shifts_since_check = 0;
    leaf->inserts_since_check = 0;
    auto path = path_to(x);
    if (avg > cfg_.forced_split_shifts) {
      Plan plan = plan_options(leaf, path, current_insert_fraction(leaf), false);
      Resolution r = cheapest(plan);
      execute(plan, r, x);
      actions_.forced_splits++;
      return;
    }
    if (!cfg_.periodic_deviation_checks) return;
    double F = current_insert_fraction(leaf);
    const auto& w = cfg_.weights;
    double exp_cost = intra_node_cost(leaf->expected.expected_search_iters, leaf->expected.expected_shifts, F, w);
    double emp_cost = intra_node_cost(leaf->stats.search_avg(), leaf->stats.shifts_avg(), F, w);
    if (!deviation_detected(exp_cost, emp_cost, w.w_s)) return;
    Plan plan = plan_options(leaf, path, F, true);
    Resolution r = cheapest(plan);
    execute(plan, r, x);
    switch (r) {
      case Resolution::expand_retrain: actions_.periodic_retrain++; break;
      case Resolution::split_sideways: actions_.periodic_sideways++; break;
      case Resolution::split_downwards: actions_.periodic_downwards++; break;
    }
  }

  Half plan_half(std::span<const Key> keys, std::size_t b, std::size_t e, double F) const {
    Half h;
    h.begin = b;
    h.end = e;
    std::size_t m = e - b;
    h.capacity = capacity_for(m, cfg_.d_init);
    h.stats.insert_fraction = F;
    if (m == 0) return h;
    auto sub = keys.subspan(b, m);
    h.model = capacity_model(sub, h.capacity, false);
    h.stats = expected_stats(sub, h.model, h.capacity, F);
    h.oversize = !fits(h.capacity);
    return h;
  }

  std::size_t parent_run(const InternalNode* p, std::size_t slot, const NodeBase* child, std::size_t& first) const {
    std::size_t b = slot, e = slot + 1;
    while (b > 0 && p->children[b - 1] == child) --b;
    while (e < p->children.size() && p->children[e] == child) ++e;
    first = b;
    return e - b;
  }

  Plan plan_options(DataNode* leaf, const std::vector<PathEntry>& path, double F, bool allow_expand) const {
    Plan plan;
    plan.leaf = leaf;
    plan.F = F;
    plan.depth = path.size();
    leaf->array.extract(plan.keys, plan.payloads);
    const auto& w = cfg_.weights;
    std::size_t n = plan.keys.size();
    double nd = static_cast<double>(n);
    double N = static_cast<double>(num_keys_);
    double D = static_cast<double>(plan.depth);
    double old_meta = static_cast<double>(data_node_meta_bytes(leaf->array.capacity()));
    std::span<const Key> keys(plan.keys);

    ResolutionOption expand{Resolution::expand_retrain};
    plan.expand_capacity = expanded_capacity(n);
    if (allow_expand && fits(plan.expand_capacity)) {
      std::size_t cap = plan.expand_capacity;
      plan.expand_model = retrain_model(leaf, keys, cap);
      plan.expand_stats = expected_stats(keys, plan.expand_model, cap, F);
      expand.feasible = true;
      expand.cost = nd * intra_node_cost(plan.expand_stats, w) + nd * w.w_d * D +
                    N * w.w_b * (static_cast<double>(data_node_meta_bytes(cap)) - old_meta);
    }

    ResolutionOption side{Resolution::split_sideways}, down{Resolution::split_downwards};
    plan.splittable = can_halve(leaf->t_lo, leaf->t_width);
    if (plan.splittable) {
      double mid = boundary(leaf->t_lo + leaf->t_width / 2);
      auto it = std::partition_point(keys.begin(), keys.end(), [&](const Key& k) { return key_to_double(k) < mid; });
      std::size_t cut = static_cast<std::size_t>(it - keys.begin());
      plan.left = plan_half(keys, 0, cut, F);
      plan.right = plan_half(keys, cut, n, F);
      auto half_cost = [&](const Half& h) {
        double m = static_cast<double>(h.end - h.begin);
        return m * (intra_node_cost(h.stats, w) + (h.oversize ? w.w_d : 0.0));
      };
      double halves = half_cost(plan.left) + half_cost(plan.right);
      double meta = static_cast<double>(data_node_meta_bytes(plan.left.capacity) +
                                        data_node_meta_bytes(plan.right.capacity)) -
                    old_meta;
      if (!path.empty()) {
        const InternalNode* p = path.back().node;
        std::size_t first;
        std::size_t r = parent_run(p, path.back().slot, leaf, first);
        double growth = 0;
        if (r == 1) {
          std::size_t s = p->children.size();
          growth = 2 * s <= max_internal_slots_
                       ? static_cast<double>(s * sizeof(void*))
                       : static_cast<double>(kInternalHeaderBytes + s / 2 * sizeof(void*));
        }
        side.feasible = true;
        side.cost = halves + nd * w.w_d * D + N * w.w_b * (meta + growth);
      }
      down.feasible = true;
      down.cost = halves + nd * w.w_d * (D + 1) + N * w.w_b * (meta + static_cast<double>(internal_node_bytes(2)));
    }
    plan.options = {expand, side, down};
    return plan;
  }

  static Resolution cheapest(const Plan& plan) {
    const ResolutionOption* best = nullptr;
    for (const auto& o : plan.options)
      if (o.feasible && (!best || o.cost < best->cost)) best = &o;
    return best ? best->kind : Resolution::expand_retrain;
  }

  NodeBase* build_half(Plan& plan, const Half& h, double t_lo, double t_width) {
    std::span<const Key> k(plan.keys);
    std::span<const Payload> p(plan.payloads);
    auto ks = k.subspan(h.begin, h.end - h.begin);
    auto ps = p.subspan(h.begin, h.end - h.begin);
    if (h.oversize) return build_subtree(ks, ps, t_lo, t_width, plan.depth + 1, plan.F);
    if (ks.empty()) return make_empty_data_node(t_lo, t_width, plan.F);
    return make_data_node(ks, ps, t_lo, t_width, h.capacity, h.model, h.stats);
  }

  void execute(Plan& plan, Resolution kind, double x) {
    DataNode* leaf = plan.leaf;
    if (kind == Resolution::expand_retrain && !plan.options[0].feasible) {
      // nothing else is possible: grow in place even past the size limit
      plan.expand_model = retrain_model(leaf, plan.keys, plan.expand_capacity);
      plan.expand_stats = expected_stats<Key>(plan.keys, plan.expand_model, plan.expand_capacity, plan.F);
    }
    if (kind == Resolution::expand_retrain) {
      account(leaf, -1);
      leaf->array = GappedArray<Key, Payload>::build_model_based(plan.keys, plan.payloads, plan.expand_model,
                                                                 plan.expand_capacity);
      leaf->model = plan.expand_model;
      leaf->expected = plan.expand_stats;
      leaf->stats = {};
      leaf->inserts_since_creation = leaf->oob_left = leaf->oob_right = 0;
      leaf->inserts_since_check = leaf->shifts_since_check = 0;
      leaf->seen_any = !plan.keys.empty();
      if (leaf->seen_any) {
        leaf->min_key_seen = plan.keys.front();
        leaf->max_key_seen = plan.keys.back();
      }
      account(leaf, +1);
      return;
    }
    double half_w = leaf->t_width / 2;
    NodeBase* L = build_half(plan, plan.left, leaf->t_lo, half_w);
    NodeBase* R = build_half(plan, plan.right, leaf->t_lo + half_w, half_w);
    relink(leaf, L, R);
    if (kind == Resolution::split_downwards) {
      InternalNode* in = make_internal(leaf->t_lo, leaf->t_width, 2);
      in->children[0] = L;
      in->children[1] = R;
      replace_child(leaf, in, x);
      release(leaf);
      return;
    }
    // sideways: make the parent give the leaf at least two slots
    for (;;) {
      auto path = path_to(x);
      InternalNode* p = path.back().node;
      std::size_t first;
      std::size_t r = parent_run(p, path.back().slot, leaf, first);
      if (r >= 2) {
        for (std::size_t s = first; s < first + r / 2; ++s) p->children[s] = L;
        for (std::size_t s = first + r / 2; s < first + r; ++s) p->children[s] = R;
        release(leaf);
        return;
      }
      if (2 * p->children.size() <= max_internal_slots_)
        double_internal(p);
      else
        split_internal(p, x);
    }
  }

  // point every parent slot (or the root) referencing old at repl
  void replace_child(NodeBase* old, NodeBase* repl, double x) {
    auto path = path_to(x);
    // path ends at the leaf's parent; find the entry whose child is old
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
      InternalNode* p = it->node;
      if (p->children[it->slot] != old) continue;
      std::size_t first;
      std::size_t r = parent_run(p, it->slot, old, first);
      for (std::size_t s = first; s < first + r; ++s) p->children[s] = repl;
      return;
    }
    if (root_ == old) root_ = repl;
  }

  void double_internal(InternalNode* p) {
    std::vector<NodeBase*> c(p->children.size() * 2);
    for (std::size_t i = 0; i < p->children.size(); ++i) c[2 * i] = c[2 * i + 1] = p->children[i];
    resize_internal(p, std::move(c));
    actions_.internal_doublings++;
  }

  // split internal node p (on the path of x) into two halves under its parent
  void split_internal(InternalNode* p, double x) {
    for (;;) {
      auto path = path_to(x);
      std::size_t k = 0;
      while (path[k].node != p) ++k;
      std::size_t n = p->children.size();
      double half_w = p->t_width / 2;
      if (k > 0) {
        InternalNode* g = path[k - 1].node;
        std::size_t first;
        std::size_t r = parent_run(g, path[k - 1].slot, p, first);
        if (r == 1) {
          if (2 * g->children.size() <= max_internal_slots_)
            double_internal(g);
          else
            split_internal(g, x);
          continue;
        }
      }
      InternalNode* a = make_internal(p->t_lo, half_w, n / 2);
      InternalNode* b = make_internal(p->t_lo + half_w, half_w, n / 2);
      std::copy(p->children.begin(), p->children.begin() + n / 2, a->children.begin());
      std::copy(p->children.begin() + n / 2, p->children.end(), b->children.begin());
      if (k == 0) {
        InternalNode* q = make_internal(p->t_lo, p->t_width, 2);
        q->children[0] = a;
        q->children[1] = b;
        root_ = q;
      } else {
        InternalNode* g = path[k - 1].node;
        std::size_t first;
        std::size_t r = parent_run(g, path[k - 1].slot, p, first);
        for (std::size_t s = first; s < first + r / 2; ++s) g->children[s] = a;
        for (std::size_t s = first + r / 2; s < first + r; ++s) g->children[s] = b;
      }
      release(p);
      actions_.internal_splits++;
      return;
    }
  }

  void expand_root(double x) {
    if (std::isnan(x)) throw std::invalid_argument("key is not a number");
    if (root_->leaf) {
      InternalNode* in = make_internal(root_->t_lo, root_->t_width, 1);
      in->children[0] = root_;
      root_ = in;
    }
    auto* r = static_cast<InternalNode*>(root_);
    bool right = x >= upper_bound_x();
    double new_lo = right ? r->t_lo : r->t_lo - r->t_width;
    double new_w = r->t_width * 2;
    double b_lo = boundary(new_lo), b_hi = boundary(new_lo + new_w);
    if (!std::isfinite(b_lo) || !std::isfinite(b_hi) || !(b_lo < b_hi))
      throw std::out_of_range("key outside the representable key space");
    double fill_lo = right ? r->t_lo + r->t_width : new_lo;
    DataNode* fresh = make_empty_data_node(fill_lo, r->t_width, cfg_.bulk_insert_fraction);
    if (right) {
      DataNode* last = last_leaf();
      last->next = fresh;
      fresh->prev = last;
    } else {
      DataNode* first = first_leaf();
      first->prev = fresh;
      fresh->next = first;
    }
    std::size_t n = r->children.size();
    if (2 * n <= max_internal_slots_) {
      std::vector<NodeBase*> c;
      c.reserve(2 * n);
      if (right) {
        c = r->children;
        c.insert(c.end(), n, fresh);
      } else {
        c.assign(n, fresh);
        c.insert(c.end(), r->children.begin(), r->children.end());
      }
      account(r, -1);
      r->t_lo = new_lo;
      r->t_width = new_w;
      r->children = std::move(c);
      set_route(r);
      account(r, +1);
    } else {
      InternalNode* q = make_internal(new_lo, new_w, 2);
      q->children[0] = right ? static_cast<NodeBase*>(r) : fresh;
      q->children[1] = right ? static_cast<NodeBase*>(fresh) : r;
      root_ = q;
    }
    actions_.root_expansions++;
  }

  // ---- costs and audit ----

  void collect_costs(const NodeBase* n, std::size_t depth, std::vector<NodeCost>& out) const {
    if (n->leaf) {
      auto* d = static_cast<const DataNode*>(n);
      NodeCost c;
      c.keys = d->array.size();
      c.intra = d->stats.operations() ? intra_node_cost(d->stats, cfg_.weights)
                                      : intra_node_cost(d->expected, cfg_.weights);
      c.traverse = traverse_cost(depth, structure_bytes_, cfg_.weights);
      out.push_back(c);
      return;
    }
    const NodeBase* last = nullptr;
    for (const NodeBase* c : static_cast<const InternalNode*>(n)->children) {
      if (c != last) collect_costs(c, depth + 1, out);
      last = c;
    }
  }

  void audit_node(const NodeBase* n, std::size_t depth, AuditReport& rep, std::size_t& structure, std::size_t& index,
                  std::size_t& data, std::size_t& keys, double& depth_sum, std::vector<std::size_t>& dn_bytes,
                  std::vector<const DataNode*>& leaves, std::unordered_set<const NodeBase*>& seen) const {
    if (!seen.insert(n).second) {
      rep.violations.push_back("node referenced from two parents");
      return;
    }
    std::size_t s, i, d;
    node_bytes(n, s, i, d);
    structure += s;
    index += i;
    data += d;
    if (n->leaf) {
      auto* dn = static_cast<const DataNode*>(n);
      leaves.push_back(dn);
      auto& a = dn->array;
      std::string err = a.audit();
      if (!err.empty()) rep.violations.push_back("data node: " + err);
      double lo = boundary(dn->t_lo), hi = boundary(dn->t_lo + dn->t_width);
      a.scan(0, [&](const Key& k, const Payload&) {
        double x = key_to_double(k);
        if (!(x >= lo && x < hi)) {
          rep.violations.push_back("key outside its data node's key space");
          return false;
        }
        return true;
      });
      if (static_cast<double>(a.size()) > cfg_.d_u * static_cast<double>(a.capacity()))
        rep.violations.push_back("data node above upper density");
      if (!fits(a.capacity()) && can_halve(dn->t_lo, dn->t_width))
        rep.violations.push_back("data node exceeds max node bytes");
      keys += a.size();
      depth_sum += static_cast<double>(depth) * static_cast<double>(a.size());
      rep.max_depth = std::max(rep.max_depth, depth);
      dn_bytes.push_back(d);
      return;
    }
    auto* in = static_cast<const InternalNode*>(n);
    rep.num_internal_nodes++;
    std::size_t slots = in->children.size();
    if (!std::has_single_bit(slots) || slots > max_internal_slots_)
      rep.violations.push_back("internal slot count not a power of two within limit");
    double step = in->t_width / static_cast<double>(slots);
    for (std::size_t j = 0; j < slots;) {
      const NodeBase* c = in->children[j];
      std::size_t e = j;
      while (e < slots && in->children[e] == c) ++e;
      std::size_t r = e - j;
      if (!std::has_single_bit(r) || j % r != 0) rep.violations.push_back("child run not aligned power of two");
      if (c->t_lo != in->t_lo + static_cast<double>(j) * step || c->t_width != static_cast<double>(r) * step)
        rep.violations.push_back("child key space does not tile parent slots");
      audit_node(c, depth + 1, rep, structure, index, data, keys, depth_sum, dn_bytes, leaves, seen);
      j = e;
    }
  }

  AlexConfig cfg_;
  NodeBase* root_ = nullptr;
  double origin_ = 0.0;
  double unit_ = 1.0;
  std::size_t num_keys_ = 0;
  std::size_t bulk_total_ = 0;
  std::size_t structure_bytes_ = 0;
  std::size_t index_bytes_ = 0;
  std::size_t data_bytes_ = 0;
  std::size_t max_internal_slots_ = 0;
  std::size_t max_data_capacity_ = 0;
  std::uint64_t total_shifts_ = 0;
  ActionCounters actions_{};
};

}  // namespace alex
