#include "chr/verify.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#include "chr/oracle.hpp"

namespace chr::verify {

using programs::Variant;

const char* to_string(Check c) {
  switch (c) {
    case Check::Structural: return "structural";
    case Check::Partition: return "partition";
    case Check::Counter: return "counter";
    case Check::Invariant: return "invariant";
  }
  return "?";
}

bool SequenceReport::ok() const {
  return std::none_of(std::begin(first), std::end(first), [](const auto& d) { return d.has_value(); });
}

const Divergence* SequenceReport::earliest() const {
  const Divergence* best = nullptr;
  for (const auto& d : first) {
    if (d && (!best || d->op_index < best->op_index)) best = &*d;
  }
  return best;
}

bool well_formed(const std::vector<Op>& ops) {
  std::set<std::size_t> made;
  for (const auto& op : ops) {
    if (op.kind == Op::Kind::Make) {
      if (!made.insert(op.x).second) return false;
    } else if (!made.contains(op.x) || (op.kind == Op::Kind::Union && !made.contains(op.y))) {
      return false;
    }
  }
  return true;
}

namespace {

// The imperative algorithm matching a CHR variant.
class Oracle {
 public:
  explicit Oracle(Variant v) : rank_variant_(v == Variant::Rank) {}

  void make(std::size_t x) { rank_variant_ ? rank_.make(x) : naive_.make(x); }
  void unite(std::size_t x, std::size_t y) { rank_variant_ ? rank_.unite(x, y) : naive_.unite(x, y); }
  std::size_t find(std::size_t x) { return rank_variant_ ? rank_.find(x) : naive_.find(x); }
  std::size_t parent(std::size_t x) const { return rank_variant_ ? rank_.parent(x) : naive_.parent(x); }
  std::int64_t rank(std::size_t x) const { return rank_.rank(x); }
  std::uint64_t steps() const { return rank_variant_ ? rank_.find_steps() : naive_.find_steps(); }

 private:
  bool rank_variant_;
  oracle::NaiveUF<std::size_t> naive_;
  oracle::RankUF<std::size_t> rank_;
};

constexpr std::int64_t kNone = -1;

}  // namespace

SequenceReport check_sequence(Variant variant, const std::vector<Op>& ops, const Options& options) {
  SequenceReport report;
  report.variant = variant;

  std::size_t n = 0;
  for (const auto& op : ops) n = std::max({n, op.x + 1, op.kind == Op::Kind::Union ? op.y + 1 : 0});

  programs::SessionOptions so;
  so.store = options.store;
  so.audit_operations = true;
  so.swap_link_order = options.swap_link_order;
  so.source_override = options.source_override;
  programs::UfSession session(variant, so);

  std::vector<Value> elem(n);
  std::unordered_map<Value, std::size_t, ValueHash> index_of;
  for (std::size_t i = 0; i < n; ++i) {
    elem[i] = session.element(element_name(i));
    index_of.emplace(elem[i], i);
  }

  Oracle oracle(variant);
  oracle::BruteForcePartition bf;
  const bool ranked = variant == Variant::Rank;

  std::vector<std::int64_t> parent(n, kNone);    // decoded CHR parents after the previous op
  std::vector<std::int64_t> rank(n, kNone);      // current root ranks
  std::vector<std::int64_t> last_rank(n, kNone); // rank each element had when last a root
  std::vector<bool> made(n, false);
  std::size_t made_count = 0;
  std::size_t violations_seen = 0;

  auto fail = [&](Check c, std::size_t i, std::string detail) {
    auto& slot = report.first[static_cast<int>(c)];
    if (!slot) slot = Divergence{c, i, std::move(detail)};
  };
  auto idx = [&](const Value& v) -> std::int64_t {
    auto it = index_of.find(v);
    return it == index_of.end() ? kNone : static_cast<std::int64_t>(it->second);
  };

  for (std::size_t i = 0; i < ops.size(); ++i) {
    const Op& op = ops[i];
    std::uint64_t oracle_before = oracle.steps();
    std::vector<std::size_t> path;
    try {
      switch (op.kind) {
        case Op::Kind::Make:
          session.make(elem[op.x]);
          oracle.make(op.x);
          bf.make(op.x);
          made[op.x] = true;
          ++made_count;
          break;
        case Op::Kind::Union:
          session.unite(elem[op.x], elem[op.y]);
          oracle.unite(op.x, op.y);
          bf.unite(op.x, op.y);
          break;
        case Op::Kind::Find: {
          for (std::size_t x = op.x; parent[x] != kNone && static_cast<std::size_t>(parent[x]) != x;
               x = static_cast<std::size_t>(parent[x])) {
            path.push_back(x);
            if (path.size() > n) break;
          }
          std::int64_t got = idx(session.find(elem[op.x]));
          std::size_t want = oracle.find(op.x);
          if (got != static_cast<std::int64_t>(want)) {
            fail(Check::Structural, i,
                 to_string(op) + " returned " + (got == kNone ? "?" : element_name(static_cast<std::size_t>(got))) +
                     ", oracle returned " + element_name(want));
          }
          break;
        }
      }
    } catch (const std::exception& e) {
      fail(Check::Invariant, i, to_string(op) + " raised: " + e.what());
      report.ops_checked = i + 1;
      return report;
    }
    report.ops_checked = i + 1;

    std::uint64_t oracle_steps = oracle.steps() - oracle_before;
    report.find_steps += session.last_find_steps();
    if (session.last_find_steps() != oracle_steps) {
      fail(Check::Counter, i,
           to_string(op) + ": findNode fired " + std::to_string(session.last_find_steps()) + " times, oracle took " +
               std::to_string(oracle_steps) + " steps");
    }

    programs::ParentMap pm;
    try {
      pm = session.parents_and_ranks();
    } catch (const std::exception& e) {
      fail(Check::Invariant, i, std::string("store is not a forest: ") + e.what());
      return report;
    }

    // Forest shape.
    std::fill(parent.begin(), parent.end(), kNone);
    std::fill(rank.begin(), rank.end(), kNone);
    bool decoded = true;
    for (const auto& [x, entry] : pm) {
      std::int64_t xi = idx(x), pi = idx(entry.parent);
      if (xi == kNone || pi == kNone || !made[static_cast<std::size_t>(xi)]) {
        fail(Check::Invariant, i, "store mentions an element that was never made");
        decoded = false;
        continue;
      }
      parent[static_cast<std::size_t>(xi)] = pi;
      if (entry.rank) rank[static_cast<std::size_t>(xi)] = *entry.rank;
      if (ranked != entry.rank.has_value() && xi == pi) {
        fail(Check::Invariant, i, "root constraint has the wrong arity");
      }
    }
    if (pm.size() != made_count) {
      fail(Check::Invariant, i, "some made element has no root or ~> constraint");
      decoded = false;
    }
    if (!decoded) return report;

    std::vector<std::int64_t> root_of(n, kNone);
    std::vector<std::size_t> tree_size(n, 0);
    bool acyclic = true;
    for (std::size_t x = 0; x < n && acyclic; ++x) {
      if (!made[x]) continue;
      std::size_t cur = x, hops = 0;
      while (parent[cur] != static_cast<std::int64_t>(cur)) {
        if (parent[cur] == kNone || ++hops > n) {
          acyclic = false;
          break;
        }
        cur = static_cast<std::size_t>(parent[cur]);
      }
      if (acyclic) {
        root_of[x] = static_cast<std::int64_t>(cur);
        ++tree_size[cur];
      }
    }
    if (!acyclic) {
      fail(Check::Invariant, i, "parent chain does not end at a root");
      return report;
    }

    // Structural equality with the oracle.
    for (std::size_t x = 0; x < n; ++x) {
      if (!made[x]) continue;
      std::size_t want = oracle.parent(x);
      if (parent[x] != static_cast<std::int64_t>(want)) {
        fail(Check::Structural, i,
             "after " + to_string(op) + ": parent(" + element_name(x) + ") is " +
                 element_name(static_cast<std::size_t>(parent[x])) + ", oracle has " + element_name(want));
        break;
      }
      if (ranked && want == x && rank[x] != oracle.rank(x)) {
        fail(Check::Structural, i,
             "after " + to_string(op) + ": rank(" + element_name(x) + ") is " + std::to_string(rank[x]) +
                 ", oracle has " + std::to_string(oracle.rank(x)));
        break;
      }
    }

    // Same-set relation.
    std::vector<std::size_t> min_in_tree(n, n);
    for (std::size_t x = 0; x < n; ++x) {
      if (made[x]) {
        auto r = static_cast<std::size_t>(root_of[x]);
        min_in_tree[r] = std::min(min_in_tree[r], x);
      }
    }
    std::vector<std::size_t> bf_label(n, n);
    for (const auto& set : bf.sets()) {
      for (std::size_t x : set) bf_label[x] = set.front();
    }
    for (std::size_t x = 0; x < n; ++x) {
      if (!made[x]) continue;
      if (min_in_tree[static_cast<std::size_t>(root_of[x])] != bf_label[x]) {
        fail(Check::Partition, i, "after " + to_string(op) + ": " + element_name(x) + " is in the wrong set");
        break;
      }
    }

    // Invariants.
    if (session.operation_violations().size() != violations_seen) {
      violations_seen = session.operation_violations().size();
      fail(Check::Invariant, i, session.operation_violations().back());
    }
    if (auto problems = session.engine().store().audit(); !problems.empty()) {
      fail(Check::Invariant, i, "store audit: " + problems.front());
    }
    if (ranked) {
      for (std::size_t x = 0; x < n; ++x) {
        if (!made[x]) continue;
        if (parent[x] == static_cast<std::int64_t>(x)) {
          if (rank[x] < last_rank[x]) fail(Check::Invariant, i, "rank of " + element_name(x) + " decreased");
          if (rank[x] >= 63 || (std::size_t{1} << rank[x]) > tree_size[x]) {
            fail(Check::Invariant, i, "2^rank exceeds tree size at " + element_name(x));
          }
          last_rank[x] = rank[x];
        } else {
          auto p = static_cast<std::size_t>(parent[x]);
          std::int64_t prank = parent[p] == static_cast<std::int64_t>(p) ? rank[p] : last_rank[p];
          if (!(last_rank[x] < prank)) {
            fail(Check::Invariant, i, "rank does not increase from " + element_name(x) + " to its parent");
          }
        }
      }
      if (op.kind == Op::Kind::Find) {
        for (std::size_t x : path) {
          if (parent[x] != root_of[op.x]) {
            fail(Check::Invariant, i, to_string(op) + " left " + element_name(x) + " uncompressed");
            break;
          }
        }
      }
    }
  }
  return report;
}

std::vector<Op> shrink(Variant variant, const std::vector<Op>& ops, Check check, const Options& options) {
  auto fails = [&](const std::vector<Op>& seq, std::size_t* at) {
    auto r = check_sequence(variant, seq, options);
    const auto& d = r.first[static_cast<int>(check)];
    if (d && at) *at = d->op_index;
    return d.has_value();
  };
  std::size_t at = 0;
  if (!fails(ops, &at)) return ops;
  std::vector<Op> cur(ops.begin(), ops.begin() + static_cast<std::ptrdiff_t>(at + 1));

  bool changed = true;
  while (changed) {
    changed = false;
    std::size_t i = 0;
    while (i < cur.size()) {
      std::vector<Op> cand = cur;
      cand.erase(cand.begin() + static_cast<std::ptrdiff_t>(i));
      if (well_formed(cand) && fails(cand, &at)) {
        cand.resize(at + 1);
        cur = std::move(cand);
        changed = true;
      } else {
        ++i;
      }
    }
  }
  return cur;
}

}  // namespace chr::verify
