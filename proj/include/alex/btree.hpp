#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "alex/errors.hpp"

namespace alex {

/// In-memory B+tree with page-sized nodes, binary search within pages and a
/// doubly linked leaf chain.
template <class Key, class Payload>
class BTree {
 public:
  using key_type = Key;
  using payload_type = Payload;

  explicit BTree(std::size_t page_bytes = 1024) : page_bytes_(page_bytes) {
    leaf_cap_ = std::max<std::size_t>(4, page_bytes / (sizeof(Key) + sizeof(Payload)));
    inner_cap_ = std::max<std::size_t>(4, page_bytes / (sizeof(Key) + sizeof(void*)));
    root_ = new_leaf();
  }
  ~BTree() { destroy(root_); }
  BTree(const BTree&) = delete;
  BTree& operator=(const BTree&) = delete;
  BTree(BTree&& o) noexcept { *this = std::move(o); }
  BTree& operator=(BTree&& o) noexcept {
    if (this != &o) {
      if (root_) destroy(root_);
      page_bytes_ = o.page_bytes_;
      leaf_cap_ = o.leaf_cap_;
      inner_cap_ = o.inner_cap_;
      root_ = o.root_;
      size_ = o.size_;
      leaves_ = o.leaves_;
      inners_ = o.inners_;
      height_ = o.height_;
      o.root_ = nullptr;
      o.leaves_ = o.inners_ = o.size_ = 0;
      o.root_ = o.new_leaf();
      o.height_ = 1;
    }
    return *this;
  }

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  std::size_t page_bytes() const { return page_bytes_; }
  std::size_t leaf_capacity() const { return leaf_cap_; }
  std::size_t inner_capacity() const { return inner_cap_; }
  std::size_t height() const { return height_; }
  std::size_t inner_pages() const { return inners_; }
  std::size_t leaf_pages() const { return leaves_; }
  /// Inner pages only.
  std::size_t index_bytes() const { return inners_ * page_bytes_; }
  /// Leaf pages.
  std::size_t data_bytes() const { return leaves_ * page_bytes_; }

  void clear() {
    destroy(root_);
    leaves_ = inners_ = size_ = 0;
    root_ = new_leaf();
    height_ = 1;
  }

  void bulk_load(std::span<const Key> keys, std::span<const Payload> payloads) {
    if (keys.size() != payloads.size()) throw std::invalid_argument("keys/payloads length mismatch");
    for (std::size_t i = 1; i < keys.size(); ++i)
      if (!(keys[i - 1] < keys[i])) throw std::invalid_argument("bulk_load keys must be strictly increasing");
    clear();
    if (keys.empty()) return;
    destroy(root_);
    leaves_ = 0;
    std::size_t n = keys.size();
    std::size_t groups = (n + leaf_cap_ - 1) / leaf_cap_;
    std::vector<Node*> level;
    std::vector<Key> mins;
    Leaf* prev = nullptr;
    std::size_t at = 0;
    for (std::size_t g = 0; g < groups; ++g) {
      std::size_t take = n / groups + (g < n % groups ? 1 : 0);
      Leaf* l = new_leaf();
      std::copy_n(keys.begin() + at, take, l->keys.get());
      std::copy_n(payloads.begin() + at, take, l->vals.get());
      l->count = take;
      l->prev = prev;
      if (prev) prev->next = l;
      prev = l;
      level.push_back(l);
      mins.push_back(keys[at]);
      at += take;
    }
    height_ = 1;
    while (level.size() > 1) {
      std::size_t m = level.size();
      std::size_t parents = (m + inner_cap_ - 1) / inner_cap_;
      std::vector<Node*> up;
      std::vector<Key> up_mins;
      std::size_t pos = 0;
      for (std::size_t g = 0; g < parents; ++g) {
        std::size_t take = m / parents + (g < m % parents ? 1 : 0);
        Inner* in = new_inner();
        for (std::size_t j = 0; j < take; ++j) {
          in->children[j] = level[pos + j];
          if (j) in->keys[j - 1] = mins[pos + j];
        }
        in->count = take;
        up.push_back(in);
        up_mins.push_back(mins[pos]);
        pos += take;
      }
      level = std::move(up);
      mins = std::move(up_mins);
      ++height_;
    }
    root_ = level.front();
    size_ = n;
  }

  Payload* find(const Key& key) {
    Leaf* l = find_leaf(key);
    Key* end = l->keys.get() + l->count;
    Key* it = std::lower_bound(l->keys.get(), end, key);
    if (it == end || key < *it) return nullptr;
    return &l->vals[static_cast<std::size_t>(it - l->keys.get())];
  }

  bool contains(const Key& key) { return find(key) != nullptr; }

  bool update(const Key& key, const Payload& payload) {
    Payload* p = find(key);
    if (!p) return false;
    *p = payload;
    return true;
  }

  void insert(const Key& key, const Payload& payload) {
    auto split = insert_rec(root_, key, payload);
    if (split.right) {
      Inner* r = new_inner();
      r->children[0] = root_;
      r->children[1] = split.right;
      r->keys[0] = split.sep;
      r->count = 2;
      root_ = r;
      ++height_;
    }
    ++size_;
  }

  bool erase(const Key& key) {
    if (!erase_rec(root_, key)) return false;
    --size_;
    if (!root_->leaf) {
      auto* r = static_cast<Inner*>(root_);
      if (r->count == 1) {
        root_ = r->children[0];
        r->count = 0;
        delete_inner(r);
        --height_;
      }
    }
    return true;
  }

  template <class F>
  void scan(const Key& start, F&& f) const {
    const Leaf* l = find_leaf(start);
    std::size_t i = static_cast<std::size_t>(std::lower_bound(l->keys.get(), l->keys.get() + l->count, start) -
                                             l->keys.get());
    for (; l; l = l->next, i = 0)
      for (; i < l->count; ++i)
        if (!f(l->keys[i], l->vals[i])) return;
  }

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
    const Node* n = root_;
    while (!n->leaf) n = static_cast<const Inner*>(n)->children[0];
    for (auto* l = static_cast<const Leaf*>(n); l; l = l->next)
      for (std::size_t i = 0; i < l->count; ++i) f(l->keys[i], l->vals[i]);
  }

  struct Audit {
    std::vector<std::string> violations;
    std::size_t inner_pages = 0;
    std::size_t leaf_pages = 0;
    std::size_t keys = 0;
    std::size_t height = 0;
    bool ok() const { return violations.empty(); }
  };

  Audit audit() const {
    Audit a;
    std::vector<const Leaf*> leaves;
    audit_rec(root_, 1, nullptr, nullptr, a, leaves);
    const Node* n = root_;
    while (!n->leaf) n = static_cast<const Inner*>(n)->children[0];
    std::size_t i = 0;
    const Leaf* prev = nullptr;
    for (auto* l = static_cast<const Leaf*>(n); l; l = l->next, ++i) {
      if (i >= leaves.size() || leaves[i] != l || l->prev != prev) {
        a.violations.push_back("leaf chain out of order");
        break;
      }
      prev = l;
    }
    if (i != leaves.size()) a.violations.push_back("leaf chain misses leaves");
    if (a.keys != size_) a.violations.push_back("key count mismatch");
    if (a.inner_pages != inners_ || a.leaf_pages != leaves_) a.violations.push_back("page counters out of sync");
    if (a.height != height_) a.violations.push_back("height counter out of sync");
    return a;
  }

 private:
  struct Node {
    bool leaf;
    std::size_t count = 0;
  };
  struct Leaf : Node {
    std::unique_ptr<Key[]> keys;
    std::unique_ptr<Payload[]> vals;
    Leaf* prev = nullptr;
    Leaf* next = nullptr;
  };
  struct Inner : Node {
    std::unique_ptr<Key[]> keys;       // count - 1 separators
    std::unique_ptr<Node*[]> children;  // count children
  };
  struct Split {
    Key sep{};
    Node* right = nullptr;
  };

  Leaf* new_leaf() {
    auto* l = new Leaf();
    l->leaf = true;
    l->keys = std::make_unique<Key[]>(leaf_cap_ + 1);
    l->vals = std::make_unique<Payload[]>(leaf_cap_ + 1);
    ++leaves_;
    return l;
  }
  Inner* new_inner() {
    auto* in = new Inner();
    in->leaf = false;
    in->keys = std::make_unique<Key[]>(inner_cap_);
    in->children = std::make_unique<Node*[]>(inner_cap_ + 1);
    ++inners_;
    return in;
  }
  void delete_leaf(Leaf* l) {
    --leaves_;
    delete l;
  }
  void delete_inner(Inner* in) {
    --inners_;
    delete in;
  }

  void destroy(Node* n) {
    if (!n) return;
    if (n->leaf) {
      delete_leaf(static_cast<Leaf*>(n));
      return;
    }
    auto* in = static_cast<Inner*>(n);
    for (std::size_t i = 0; i < in->count; ++i) destroy(in->children[i]);
    delete_inner(in);
  }

  static std::size_t child_index(const Inner* in, const Key& key) {
    return static_cast<std::size_t>(std::upper_bound(in->keys.get(), in->keys.get() + in->count - 1, key) -
                                    in->keys.get());
  }

  Leaf* find_leaf(const Key& key) const {
    Node* n = root_;
    while (!n->leaf) {
      auto* in = static_cast<Inner*>(n);
      n = in->children[child_index(in, key)];
    }
    return static_cast<Leaf*>(n);
  }

  Split insert_rec(Node* n, const Key& key, const Payload& payload) {
    if (n->leaf) {
      auto* l = static_cast<Leaf*>(n);
      Key* b = l->keys.get();
      std::size_t pos = static_cast<std::size_t>(std::lower_bound(b, b + l->count, key) - b);
      if (pos < l->count && !(key < b[pos])) throw duplicate_key_error("key already exists");
      // arrays have one spare slot so the overflowing entry fits before splitting
      std::move_backward(b + pos, b + l->count, b + l->count + 1);
      std::move_backward(l->vals.get() + pos, l->vals.get() + l->count, l->vals.get() + l->count + 1);
      b[pos] = key;
      l->vals[pos] = payload;
      ++l->count;
      if (l->count <= leaf_cap_) return {};
      Leaf* r = new_leaf();
      std::size_t keep = (l->count + 1) / 2;
      std::size_t move = l->count - keep;
      std::move(b + keep, b + l->count, r->keys.get());
      std::move(l->vals.get() + keep, l->vals.get() + l->count, r->vals.get());
      l->count = keep;
      r->count = move;
      r->next = l->next;
      if (r->next) r->next->prev = r;
      r->prev = l;
      l->next = r;
      return {r->keys[0], r};
    }
    auto* in = static_cast<Inner*>(n);
    std::size_t i = child_index(in, key);
    Split s = insert_rec(in->children[i], key, payload);
    if (!s.right) return {};
    std::move_backward(in->keys.get() + i, in->keys.get() + in->count - 1, in->keys.get() + in->count);
    std::move_backward(in->children.get() + i + 1, in->children.get() + in->count, in->children.get() + in->count + 1);
    in->keys[i] = s.sep;
    in->children[i + 1] = s.right;
    ++in->count;
    if (in->count <= inner_cap_) return {};
    Inner* r = new_inner();
    std::size_t keep = (in->count + 1) / 2;
    std::size_t move = in->count - keep;
    Key up = in->keys[keep - 1];
    std::move(in->keys.get() + keep, in->keys.get() + in->count - 1, r->keys.get());
    std::move(in->children.get() + keep, in->children.get() + in->count, r->children.get());
    in->count = keep;
    r->count = move;
    return {up, r};
  }

  std::size_t min_leaf() const { return (leaf_cap_ + 1) / 2; }
  std::size_t min_inner() const { return (inner_cap_ + 1) / 2; }

  bool erase_rec(Node* n, const Key& key) {
    if (n->leaf) {
      auto* l = static_cast<Leaf*>(n);
      Key* b = l->keys.get();
      std::size_t pos = static_cast<std::size_t>(std::lower_bound(b, b + l->count, key) - b);
      if (pos == l->count || key < b[pos]) return false;
      std::move(b + pos + 1, b + l->count, b + pos);
      std::move(l->vals.get() + pos + 1, l->vals.get() + l->count, l->vals.get() + pos);
      --l->count;
      return true;
    }
    auto* in = static_cast<Inner*>(n);
    std::size_t i = child_index(in, key);
    if (!erase_rec(in->children[i], key)) return false;
    Node* c = in->children[i];
    std::size_t need = c->leaf ? min_leaf() : min_inner();
    if (c->count < need) rebalance(in, i);
    return true;
  }

  // child i of `in` is underfull: borrow from a sibling or merge with one
  void rebalance(Inner* in, std::size_t i) {
    Node* c = in->children[i];
    std::size_t need = c->leaf ? min_leaf() : min_inner();
    if (i > 0 && in->children[i - 1]->count > need) {
      borrow_from_left(in, i);
      return;
    }
    if (i + 1 < in->count && in->children[i + 1]->count > need) {
      borrow_from_right(in, i);
      return;
    }
    if (i > 0)
      merge(in, i - 1);
    else if (i + 1 < in->count)
      merge(in, i);
  }

  void borrow_from_left(Inner* in, std::size_t i) {
    Node* c = in->children[i];
    Node* s = in->children[i - 1];
    if (c->leaf) {
      auto* l = static_cast<Leaf*>(c);
      auto* ls = static_cast<Leaf*>(s);
      std::move_backward(l->keys.get(), l->keys.get() + l->count, l->keys.get() + l->count + 1);
      std::move_backward(l->vals.get(), l->vals.get() + l->count, l->vals.get() + l->count + 1);
      l->keys[0] = ls->keys[ls->count - 1];
      l->vals[0] = std::move(ls->vals[ls->count - 1]);
      ++l->count;
      --ls->count;
      in->keys[i - 1] = l->keys[0];
    } else {
      auto* a = static_cast<Inner*>(c);
      auto* as = static_cast<Inner*>(s);
      std::move_backward(a->keys.get(), a->keys.get() + a->count - 1, a->keys.get() + a->count);
      std::move_backward(a->children.get(), a->children.get() + a->count, a->children.get() + a->count + 1);
      a->keys[0] = in->keys[i - 1];
      a->children[0] = as->children[as->count - 1];
      in->keys[i - 1] = as->keys[as->count - 2];
      ++a->count;
      --as->count;
    }
  }

  void borrow_from_right(Inner* in, std::size_t i) {
    Node* c = in->children[i];
    Node* s = in->children[i + 1];
    if (c->leaf) {
      auto* l = static_cast<Leaf*>(c);
      auto* rs = static_cast<Leaf*>(s);
      l->keys[l->count] = rs->keys[0];
      l->vals[l->count] = std::move(rs->vals[0]);
      ++l->count;
      std::move(rs->keys.get() + 1, rs->keys.get() + rs->count, rs->keys.get());
      std::move(rs->vals.get() + 1, rs->vals.get() + rs->count, rs->vals.get());
      --rs->count;
      in->keys[i] = rs->keys[0];
    } else {
      auto* a = static_cast<Inner*>(c);
      auto* rs = static_cast<Inner*>(s);
      a->keys[a->count - 1] = in->keys[i];
      a->children[a->count] = rs->children[0];
      ++a->count;
      in->keys[i] = rs->keys[0];
      std::move(rs->keys.get() + 1, rs->keys.get() + rs->count - 1, rs->keys.get());
      std::move(rs->children.get() + 1, rs->children.get() + rs->count, rs->children.get());
      --rs->count;
    }
  }

  // merge child j+1 into child j
  void merge(Inner* in, std::size_t j) {
    Node* a = in->children[j];
    Node* b = in->children[j + 1];
    if (a->leaf) {
      auto* la = static_cast<Leaf*>(a);
      auto* lb = static_cast<Leaf*>(b);
      std::move(lb->keys.get(), lb->keys.get() + lb->count, la->keys.get() + la->count);
      std::move(lb->vals.get(), lb->vals.get() + lb->count, la->vals.get() + la->count);
      la->count += lb->count;
      la->next = lb->next;
      if (la->next) la->next->prev = la;
      delete_leaf(lb);
    } else {
      auto* ia = static_cast<Inner*>(a);
      auto* ib = static_cast<Inner*>(b);
      ia->keys[ia->count - 1] = in->keys[j];
      std::move(ib->keys.get(), ib->keys.get() + ib->count - 1, ia->keys.get() + ia->count);
      std::move(ib->children.get(), ib->children.get() + ib->count, ia->children.get() + ia->count);
      ia->count += ib->count;
      ib->count = 0;
      delete_inner(ib);
    }
    std::move(in->keys.get() + j + 1, in->keys.get() + in->count - 1, in->keys.get() + j);
    std::move(in->children.get() + j + 2, in->children.get() + in->count, in->children.get() + j + 1);
    --in->count;
  }

  void audit_rec(const Node* n, std::size_t depth, const Key* lo, const Key* hi, Audit& a,
                 std::vector<const Leaf*>& leaves) const {
    bool is_root = n == root_;
    a.height = std::max(a.height, depth);
    if (n->leaf) {
      auto* l = static_cast<const Leaf*>(n);
      a.leaf_pages++;
      a.keys += l->count;
      leaves.push_back(l);
      if (l->count > leaf_cap_ || (!is_root && l->count < min_leaf())) a.violations.push_back("leaf occupancy");
      for (std::size_t i = 0; i < l->count; ++i) {
        if (i && !(l->keys[i - 1] < l->keys[i])) a.violations.push_back("leaf keys unsorted");
        if ((lo && l->keys[i] < *lo) || (hi && !(l->keys[i] < *hi))) a.violations.push_back("leaf key out of range");
      }
      return;
    }
    auto* in = static_cast<const Inner*>(n);
    a.inner_pages++;
    if (in->count > inner_cap_ || in->count < (is_root ? 2 : min_inner())) a.violations.push_back("inner occupancy");
    for (std::size_t i = 0; i < in->count; ++i) {
      const Key* clo = i ? &in->keys[i - 1] : lo;
      const Key* chi = i + 1 < in->count ? &in->keys[i] : hi;
      if (i && i + 1 < in->count && !(in->keys[i - 1] < in->keys[i])) a.violations.push_back("separators unsorted");
      audit_rec(in->children[i], depth + 1, clo, chi, a, leaves);
    }
  }

  std::size_t page_bytes_ = 1024;
  std::size_t leaf_cap_ = 0;
  std::size_t inner_cap_ = 0;
  Node* root_ = nullptr;
  std::size_t size_ = 0;
  std::size_t leaves_ = 0;
  std::size_t inners_ = 0;
  std::size_t height_ = 1;
};

}  // namespace alex
