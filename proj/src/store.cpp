#include "chr/store.hpp"

#include <algorithm>
#include <bit>
#include <cassert>

namespace chr {

namespace detail {

ValueIndex::ValueIndex(std::size_t initial_slots) : slots_(std::bit_ceil(std::max<std::size_t>(initial_slots, 1))) {}

// Atoms are interned densely, so the identity-like hash keeps distinct atoms
// in distinct slots whenever the table is at least twice their number.
std::size_t ValueIndex::slot_of(const Value& key) const {
  auto h = static_cast<std::uint64_t>(key.raw) * 2 + (key.kind == Value::Kind::Int ? 1 : 0);
  return static_cast<std::size_t>(h & (slots_.size() - 1));
}

const std::vector<ConstraintId>* ValueIndex::find(const Value& key, std::uint64_t& probes) const {
  const auto& chain = slots_[slot_of(key)];
  ++probes;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    if (i) ++probes;
    if (chain[i].key == key) return &chain[i].ids;
  }
  return nullptr;
}

std::vector<ConstraintId>& ValueIndex::find_or_insert(const Value& key, StoreCounters& counters) {
  {
    auto& chain = slots_[slot_of(key)];
    ++counters.probes;
    for (std::size_t i = 0; i < chain.size(); ++i) {
      if (i) ++counters.probes;
      if (chain[i].key == key) return chain[i].ids;
    }
  }
  if (keys_ + 1 > slots_.size()) grow(counters);
  ++keys_;
  auto& chain = slots_[slot_of(key)];
  chain.push_back(Entry{key, {}});
  return chain.back().ids;
}

void ValueIndex::erase_if_empty(const Value& key, std::uint64_t& probes) {
  auto& chain = slots_[slot_of(key)];
  ++probes;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    if (i) ++probes;
    if (chain[i].key == key) {
      if (chain[i].ids.empty()) {
        if (i + 1 != chain.size()) chain[i] = std::move(chain.back());
        chain.pop_back();
        --keys_;
      }
      return;
    }
  }
}

void ValueIndex::grow(StoreCounters& counters) {
  std::vector<std::vector<Entry>> old(slots_.size() * 2);
  old.swap(slots_);
  for (auto& chain : old) {
    for (auto& e : chain) {
      ++counters.rehash_moves;
      slots_[slot_of(e.key)].push_back(std::move(e));
    }
  }
  ++counters.rehashes;
}

}  // namespace detail

void LookupRange::iterator::skip() {
  while (i_ < range_->ids_.size() && !range_->store_->alive(range_->ids_[i_])) ++i_;
}

std::size_t LookupRange::count() const {
  std::size_t n = 0;
  for (auto it = begin(); it != end(); ++it) ++n;
  return n;
}

Store::Store(StoreOptions options) : options_(options) {}

void Store::ensure_symbol(SymbolId symbol, std::size_t arity) {
  if (symbol >= by_symbol_.size()) {
    by_symbol_.resize(symbol + 1);
    indexes_.resize(symbol + 1);
  }
  auto& per_pos = indexes_[symbol];
  if (indexed() && per_pos.size() < arity) {
    std::size_t initial = options_.mode == StoreMode::Presized ? options_.presize : 16;
    while (per_pos.size() < arity) per_pos.emplace_back(initial);
  }
}

ConstraintId Store::insert(SymbolId symbol, std::span<const Value> args) {
  ensure_symbol(symbol, args.size());
  ConstraintId id = table_.size();
  table_.push_back(StoredConstraint{id, symbol, std::vector<Value>(args.begin(), args.end()), true});
  book_.push_back(Bookkeeping{std::vector<std::uint32_t>(args.size(), 0), 0});

  auto& list = by_symbol_[symbol];
  book_[id].symbol_slot = static_cast<std::uint32_t>(list.size());
  list.push_back(id);

  for (std::size_t p = 0; p < args.size(); ++p) {
    if (args[p].is_var()) {
      occ_insert(id, p);
    } else if (indexed()) {
      index_insert(id, p);
    }
  }
  ++live_;
  ++counters_.inserts;
  return id;
}

void Store::erase(ConstraintId id) {
  assert(alive(id) && "erase of a dead constraint");
  auto& c = table_[id];
  for (std::size_t p = 0; p < c.args.size(); ++p) {
    if (c.args[p].is_var()) {
      occ_erase(id, p);
    } else if (indexed()) {
      index_erase(id, p);
    }
  }
  auto& list = by_symbol_[c.symbol];
  auto slot = book_[id].symbol_slot;
  ConstraintId moved = list.back();
  list[slot] = moved;
  book_[moved].symbol_slot = slot;
  list.pop_back();

  c.alive = false;
  --live_;
  ++counters_.deletes;
}

void Store::index_insert(ConstraintId id, std::size_t pos) {
  const auto& c = table_[id];
  auto& bucket = index(c.symbol, pos).find_or_insert(c.args[pos], counters_);
  book_[id].slot[pos] = static_cast<std::uint32_t>(bucket.size());
  bucket.push_back(id);
}

void Store::index_erase(ConstraintId id, std::size_t pos) {
  const auto& c = table_[id];
  auto& idx = index(c.symbol, pos);
  auto* bucket = const_cast<std::vector<ConstraintId>*>(idx.find(c.args[pos], counters_.probes));
  assert(bucket && "indexed constraint missing from its bucket");
  auto slot = book_[id].slot[pos];
  ConstraintId moved = bucket->back();
  (*bucket)[slot] = moved;
  book_[moved].slot[pos] = slot;
  bucket->pop_back();
  if (bucket->empty()) idx.erase_if_empty(c.args[pos], counters_.probes);
}

void Store::occ_insert(ConstraintId id, std::size_t pos) {
  auto& list = occ_[table_[id].args[pos].raw];
  book_[id].slot[pos] = static_cast<std::uint32_t>(list.size());
  list.push_back({id, static_cast<std::uint32_t>(pos)});
}

void Store::occ_erase(ConstraintId id, std::size_t pos) {
  auto it = occ_.find(table_[id].args[pos].raw);
  assert(it != occ_.end());
  auto& list = it->second;
  auto slot = book_[id].slot[pos];
  Occurrence moved = list.back();
  list[slot] = moved;
  book_[moved.id].slot[moved.pos] = slot;
  list.pop_back();
  if (list.empty()) occ_.erase(it);
}

LookupRange Store::lookup(SymbolId symbol, std::size_t pos, const Value& value) const {
  assert(value.ground());
  ++counters_.lookups;
  if (symbol >= by_symbol_.size()) {
    ++counters_.probes;
    return LookupRange(this, {}, 1);
  }
  if (!indexed()) {
    const auto& list = by_symbol_[symbol];
    std::vector<ConstraintId> hits;
    for (ConstraintId id : list) {
      const auto& args = table_[id].args;
      if (pos < args.size() && args[pos] == value) hits.push_back(id);
    }
    std::uint64_t cost = std::max<std::uint64_t>(list.size(), 1);
    counters_.probes += cost;
    std::sort(hits.begin(), hits.end());
    return LookupRange(this, std::move(hits), cost);
  }
  const auto& per_pos = indexes_[symbol];
  if (pos >= per_pos.size()) {
    ++counters_.probes;
    return LookupRange(this, {}, 1);
  }
  const auto* bucket = per_pos[pos].find(value, counters_.probes);
  return LookupRange(this, bucket ? *bucket : std::vector<ConstraintId>{}, 1);
}

LookupRange Store::lookup_var(SymbolId symbol, std::size_t pos, const Value& var) const {
  assert(var.is_var());
  ++counters_.lookups;
  ++counters_.probes;
  std::vector<ConstraintId> hits;
  auto it = occ_.find(var.raw);
  if (it != occ_.end()) {
    for (const auto& o : it->second) {
      if (o.pos == pos && table_[o.id].symbol == symbol) hits.push_back(o.id);
    }
    counters_.probes += it->second.size();
  }
  std::sort(hits.begin(), hits.end());
  return LookupRange(this, std::move(hits), 1);
}

std::vector<ConstraintId> Store::rebind_index(const Value& var, const Value& value) {
  assert(var.is_var() && value.ground());
  std::vector<ConstraintId> woken;
  auto it = occ_.find(var.raw);
  if (it == occ_.end()) return woken;
  std::vector<Occurrence> list = std::move(it->second);
  occ_.erase(it);
  for (const auto& o : list) {
    table_[o.id].args[o.pos] = value;
    if (indexed()) index_insert(o.id, o.pos);
    woken.push_back(o.id);
  }
  std::sort(woken.begin(), woken.end());
  woken.erase(std::unique(woken.begin(), woken.end()), woken.end());
  return woken;
}

std::size_t Store::live_count(SymbolId symbol) const {
  return symbol < by_symbol_.size() ? by_symbol_[symbol].size() : 0;
}

std::span<const ConstraintId> Store::live_ids(SymbolId symbol) const {
  if (symbol >= by_symbol_.size()) return {};
  return by_symbol_[symbol];
}

std::vector<ConstraintId> Store::all_live() const {
  std::vector<ConstraintId> ids;
  ids.reserve(live_);
  for (const auto& list : by_symbol_) ids.insert(ids.end(), list.begin(), list.end());
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::size_t Store::bucket_size(SymbolId symbol, std::size_t pos, const Value& value) const {
  if (!indexed() || symbol >= indexes_.size() || pos >= indexes_[symbol].size()) return 0;
  std::uint64_t ignored = 0;
  const auto* b = indexes_[symbol][pos].find(value, ignored);
  return b ? b->size() : 0;
}

bool Store::in_occurrences(const Value& var, ConstraintId id) const {
  auto it = occ_.find(var.raw);
  if (it == occ_.end()) return false;
  return std::any_of(it->second.begin(), it->second.end(), [&](const Occurrence& o) { return o.id == id; });
}

std::vector<std::string> Store::audit() const {
  std::vector<std::string> problems;
  auto where = [](ConstraintId id) { return "#" + std::to_string(id); };

  std::size_t live = 0;
  std::size_t expected_occ = 0;
  // [symbol][pos] -> number of live constraints ground at that position
  std::vector<std::vector<std::size_t>> ground_at(by_symbol_.size());

  for (const auto& c : table_) {
    if (!c.alive) continue;
    ++live;
    const auto& bk = book_[c.id];
    const auto& list = by_symbol_[c.symbol];
    if (bk.symbol_slot >= list.size() || list[bk.symbol_slot] != c.id) {
      problems.push_back(where(c.id) + " missing from its symbol list");
    }
    auto& counts = ground_at[c.symbol];
    if (counts.size() < c.args.size()) counts.resize(c.args.size(), 0);
    for (std::size_t p = 0; p < c.args.size(); ++p) {
      const Value& v = c.args[p];
      if (v.is_var()) {
        ++expected_occ;
        auto it = occ_.find(v.raw);
        if (it == occ_.end() || bk.slot[p] >= it->second.size() || it->second[bk.slot[p]].id != c.id ||
            it->second[bk.slot[p]].pos != p) {
          problems.push_back(where(c.id) + " arg " + std::to_string(p) + " missing from occurrence list");
        }
        continue;
      }
      ++counts[p];
      if (!indexed()) continue;
      std::uint64_t ignored = 0;
      const auto* bucket = indexes_[c.symbol][p].find(v, ignored);
      if (!bucket || bk.slot[p] >= bucket->size() || (*bucket)[bk.slot[p]] != c.id) {
        problems.push_back(where(c.id) + " arg " + std::to_string(p) + " missing from value index");
      }
    }
  }
  if (live != live_) problems.push_back("live counter " + std::to_string(live_) + " != " + std::to_string(live));

  std::size_t occ_total = 0;
  for (const auto& [var, list] : occ_) {
    occ_total += list.size();
    if (list.empty()) problems.push_back("empty occurrence list for V" + std::to_string(var));
  }
  if (occ_total != expected_occ) problems.push_back("occurrence lists hold stale entries");

  if (indexed()) {
    for (std::size_t s = 0; s < indexes_.size(); ++s) {
      for (std::size_t p = 0; p < indexes_[s].size(); ++p) {
        std::size_t total = 0;
        indexes_[s][p].for_each([&](const detail::ValueIndex::Entry& e) {
          total += e.ids.size();
          if (e.ids.empty()) problems.push_back("empty bucket retained");
          for (ConstraintId id : e.ids) {
            if (!alive(id)) problems.push_back("dead " + where(id) + " in value index");
          }
        });
        std::size_t expected = s < ground_at.size() && p < ground_at[s].size() ? ground_at[s][p] : 0;
        if (total != expected) {
          problems.push_back("index size mismatch for symbol " + std::to_string(s) + " pos " + std::to_string(p));
        }
      }
    }
  }
  return problems;
}

}  // namespace chr
