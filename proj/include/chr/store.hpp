#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "chr/value.hpp"

namespace chr {

using ConstraintId = std::uint64_t;

enum class StoreMode {
  Presized,  // hash tables allocated up front; collision-free for dense atoms
  Doubling,  // start small, double and rehash when load reaches size
  Poor,      // no value indexes: lookups scan every live constraint of the symbol
};

struct StoreOptions {
  StoreMode mode = StoreMode::Doubling;
  std::size_t presize = 1024;  // slots per index in Presized mode
};

struct StoredConstraint {
  ConstraintId id = 0;
  SymbolId symbol = 0;
  std::vector<Value> args;
  bool alive = false;
};

struct StoreCounters {
  std::uint64_t inserts = 0;
  std::uint64_t deletes = 0;
  std::uint64_t lookups = 0;
  std::uint64_t probes = 0;  // hash slot accesses, chain steps, scan steps
  std::uint64_t rehashes = 0;
  std::uint64_t rehash_moves = 0;  // keys moved by rehashing
};

namespace detail {

// Chained hash table from ground values to id buckets. Power-of-two slot
// count; doubles when the number of keys exceeds the slot count.
class ValueIndex {
 public:
  struct Entry {
    Value key;
    std::vector<ConstraintId> ids;
  };

  explicit ValueIndex(std::size_t initial_slots = 16);

  const std::vector<ConstraintId>* find(const Value& key, std::uint64_t& probes) const;
  std::vector<ConstraintId>& find_or_insert(const Value& key, StoreCounters& counters);
  void erase_if_empty(const Value& key, std::uint64_t& probes);

  std::size_t key_count() const { return keys_; }
  std::size_t slot_count() const { return slots_.size(); }

  template <class F>
  void for_each(F&& f) const {
    for (const auto& chain : slots_)
      for (const auto& e : chain) f(e);
  }

 private:
  std::size_t slot_of(const Value& key) const;
  void grow(StoreCounters& counters);

  std::vector<std::vector<Entry>> slots_;
  std::size_t keys_ = 0;
};

}  // namespace detail

class Store;

// Ids matching a lookup, captured when the lookup is made. Iteration skips
// ids whose constraint has died since, including mid-iteration deletions.
class LookupRange {
 public:
  class iterator {
   public:
    using value_type = ConstraintId;
    using difference_type = std::ptrdiff_t;

    iterator() = default;
    iterator(const LookupRange* r, std::size_t i) : range_(r), i_(i) { skip(); }
    ConstraintId operator*() const { return range_->ids_[i_]; }
    iterator& operator++() {
      ++i_;
      skip();
      return *this;
    }
    iterator operator++(int) {
      auto t = *this;
      ++*this;
      return t;
    }
    bool operator==(const iterator& o) const { return i_ == o.i_; }

   private:
    void skip();
    const LookupRange* range_ = nullptr;
    std::size_t i_ = 0;
  };

  LookupRange(const Store* store, std::vector<ConstraintId> ids, std::uint64_t cost)
      : store_(store), ids_(std::move(ids)), cost_(cost) {}

  iterator begin() const { return iterator(this, 0); }
  iterator end() const { return iterator(this, ids_.size()); }
  bool empty() const { return begin() == end(); }
  std::size_t count() const;
  // 1 for an indexed lookup; the number of scanned constraints otherwise.
  std::uint64_t cost() const { return cost_; }

 private:
  const Store* store_;
  std::vector<ConstraintId> ids_;
  std::uint64_t cost_;
};

// Constraint store with per-(symbol, argument position) value indexes and
// per-variable occurrence lists. Insert, delete and lookup are expected
// constant time in the indexed modes.
class Store {
 public:
  explicit Store(StoreOptions options = {});

  // Arguments must already be dereferenced: unbound variables are recorded
  // in occurrence lists, ground values in the value indexes.
  ConstraintId insert(SymbolId symbol, std::span<const Value> args);
  // Precondition: id alive.
  void erase(ConstraintId id);

  // Live constraints of `symbol` whose argument `pos` is the ground `value`.
  LookupRange lookup(SymbolId symbol, std::size_t pos, const Value& value) const;
  // Live constraints of `symbol` holding the unbound variable `var` at `pos`.
  LookupRange lookup_var(SymbolId symbol, std::size_t pos, const Value& var) const;

  // `var` has just been bound to the ground `value`: rewrites the affected
  // arguments, moves them into the value indexes and returns the affected
  // ids in ascending order.
  std::vector<ConstraintId> rebind_index(const Value& var, const Value& value);

  bool alive(ConstraintId id) const { return id < table_.size() && table_[id].alive; }
  const StoredConstraint& get(ConstraintId id) const { return table_[id]; }
  ConstraintId next_id() const { return table_.size(); }

  std::size_t live_count() const { return live_; }
  std::size_t live_count(SymbolId symbol) const;
  // Live ids of one symbol, unordered.
  std::span<const ConstraintId> live_ids(SymbolId symbol) const;
  // Every live constraint in ascending id order.
  std::vector<ConstraintId> all_live() const;

  // Number of ids in the (symbol, pos, value) bucket; 0 in Poor mode.
  std::size_t bucket_size(SymbolId symbol, std::size_t pos, const Value& value) const;
  bool in_occurrences(const Value& var, ConstraintId id) const;

  const StoreCounters& counters() const { return counters_; }
  const StoreOptions& options() const { return options_; }

  // O(store) consistency check of indexes and occurrence lists. Returns a
  // description of every violation found.
  std::vector<std::string> audit() const;

 private:
  struct Bookkeeping {
    std::vector<std::uint32_t> slot;  // per position: index in bucket or occurrence list
    std::uint32_t symbol_slot = 0;
  };
  struct Occurrence {
    ConstraintId id;
    std::uint32_t pos;
  };

  void ensure_symbol(SymbolId symbol, std::size_t arity);
  detail::ValueIndex& index(SymbolId symbol, std::size_t pos) { return indexes_[symbol][pos]; }
  void index_insert(ConstraintId id, std::size_t pos);
  void index_erase(ConstraintId id, std::size_t pos);
  void occ_insert(ConstraintId id, std::size_t pos);
  void occ_erase(ConstraintId id, std::size_t pos);
  bool indexed() const { return options_.mode != StoreMode::Poor; }

  StoreOptions options_;
  std::vector<StoredConstraint> table_;
  std::vector<Bookkeeping> book_;
  std::vector<std::vector<detail::ValueIndex>> indexes_;  // [symbol][pos]
  std::vector<std::vector<ConstraintId>> by_symbol_;
  std::unordered_map<std::int64_t, std::vector<Occurrence>> occ_;
  std::size_t live_ = 0;
  mutable StoreCounters counters_;
};

}  // namespace chr
