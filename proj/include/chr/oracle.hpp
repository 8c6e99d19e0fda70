#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "chr/ops.hpp"

// Imperative union-find, written as the textbook pseudo-code, plus an
// explicit set-of-sets partition used as an independent check.
namespace chr::oracle {

class UnknownElement : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// make/find/union/link without optimizations.
template <class Element, class Hash = std::hash<Element>>
class NaiveUF {
 public:
  explicit NaiveUF(bool recursive_find = false) : recursive_(recursive_find) {}

  void make(const Element& x) { p_[x] = x; }

  void unite(const Element& x, const Element& y) {
    Element a = find(x);
    Element b = find(y);
    link(a, b);
  }

  void link(const Element& x, const Element& y) {
    if (x != y) p_[y] = x;
  }

  Element find(const Element& x) { return recursive_ ? find_recursive(x) : find_iterative(x); }

  bool contains(const Element& x) const { return p_.contains(x); }
  const Element& parent(const Element& x) const { return at(x); }
  const std::unordered_map<Element, Element, Hash>& parents() const { return p_; }
  // Number of times find followed a parent pointer.
  std::uint64_t find_steps() const { return steps_; }

 private:
  const Element& at(const Element& x) const {
    auto it = p_.find(x);
    if (it == p_.end()) throw UnknownElement("unknown element");
    return it->second;
  }

  Element find_recursive(const Element& x) {
    const Element& px = at(x);
    if (x != px) {
      ++steps_;
      return find_recursive(px);
    }
    return x;
  }

  Element find_iterative(Element x) {
    for (;;) {
      const Element& px = at(x);
      if (x == px) return x;
      ++steps_;
      x = px;
    }
  }

  std::unordered_map<Element, Element, Hash> p_;
  std::uint64_t steps_ = 0;
  bool recursive_;
};

// Union-by-rank with path compression.
template <class Element, class Hash = std::hash<Element>>
class RankUF {
 public:
  // The recursive find is the reference; the two-pass iterative one must
  // leave identical state.
  explicit RankUF(bool iterative_find = false) : iterative_(iterative_find) {}

  void make(const Element& x) {
    p_[x] = x;
    rank_[x] = 0;
  }

  void unite(const Element& x, const Element& y) {
    Element a = find(x);
    Element b = find(y);
    link(a, b);
  }

  void link(const Element& x, const Element& y) {
    if (x != y) {
      if (rank_.at(x) >= rank_.at(y)) {
        p_[y] = x;
        rank_[x] = std::max(rank_[x], rank_[y] + 1);
      } else {
        p_[x] = y;
      }
    }
  }

  Element find(const Element& x) { return iterative_ ? find_iterative(x) : find_recursive(x); }

  bool contains(const Element& x) const { return p_.contains(x); }
  const Element& parent(const Element& x) const { return at(x); }
  std::int64_t rank(const Element& x) const { return rank_.at(x); }
  const std::unordered_map<Element, Element, Hash>& parents() const { return p_; }
  std::uint64_t find_steps() const { return steps_; }

 private:
  Element& at(const Element& x) {
    auto it = p_.find(x);
    if (it == p_.end()) throw UnknownElement("unknown element");
    return it->second;
  }
  const Element& at(const Element& x) const {
    auto it = p_.find(x);
    if (it == p_.end()) throw UnknownElement("unknown element");
    return it->second;
  }

  Element find_recursive(const Element& x) {
    if (x != at(x)) {
      ++steps_;
      Element root = find_recursive(at(x));
      at(x) = root;
    }
    return at(x);
  }

  Element find_iterative(const Element& x) {
    Element root = x;
    while (at(root) != root) {
      ++steps_;
      root = at(root);
    }
    Element cur = x;
    while (cur != root) {
      Element next = at(cur);
      at(cur) = root;
      cur = next;
    }
    return root;
  }

  std::unordered_map<Element, Element, Hash> p_;
  std::unordered_map<Element, std::int64_t, Hash> rank_;
  std::uint64_t steps_ = 0;
  bool iterative_;
};

// Disjoint sets kept as explicit element lists. O(N) per operation.
class BruteForcePartition {
 public:
  void make(std::size_t x);
  void unite(std::size_t x, std::size_t y);
  bool same_set(std::size_t x, std::size_t y) const { return set_of(x) == set_of(y); }
  // Smallest element of x's set.
  std::size_t label(std::size_t x) const;
  // Sorted sets, sorted by first element.
  std::vector<std::vector<std::size_t>> sets() const;

 private:
  std::size_t set_of(std::size_t x) const;
  std::vector<std::vector<std::size_t>> sets_;
};

using Partition = std::vector<std::vector<std::size_t>>;

// Replays `ops`; finds are membership scans and do not change anything.
Partition bf_partition(const std::vector<Op>& ops);

}  // namespace chr::oracle
