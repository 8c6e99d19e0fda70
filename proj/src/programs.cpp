#include "chr/programs.hpp"

#include "chr/parser.hpp"

namespace chr::programs {

namespace {

constexpr std::string_view kBasic =
    "make @ make(X) <=> root(X).\n"
    "union @ union(X,Y) <=> find(X,A), find(Y,B), link(A,B).\n"
    "findNode @ X ~> PX \\ find(X,R) <=> find(PX,R).\n"
    "findRoot @ root(X) \\ find(X,R) <=> R = X.\n"
    "linkEq @ link(X,X) <=> true.\n"
    "link @ link(X,Y), root(X), root(Y) <=> Y ~> X, root(X).\n";

constexpr std::string_view kRankHead =
    "make @ make(X) <=> root(X,0).\n"
    "union @ union(X,Y) <=> find(X,A), find(Y,B), link(A,B).\n"
    "findNode @ X ~> PX, find(X,R) <=> find(PX,R), X ~> R.\n"
    "findRoot @ root(X,_) \\ find(X,R) <=> R = X.\n"
    "linkEq @ link(X,X) <=> true.\n";
constexpr std::string_view kLinkLeft =
    "linkLeft @ link(X,Y), root(X,RX), root(Y,RY) <=> RX >= RY | Y ~> X, NRX is max(RX,RY+1), root(X,NRX).\n";
constexpr std::string_view kLinkRight =
    "linkRight @ link(X,Y), root(Y,RY), root(X,RX) <=> RY >= RX | X ~> Y, NRY is max(RY,RX+1), root(Y,NRY).\n";

const std::string& rank_text() {
  static const std::string text = std::string(kRankHead) + std::string(kLinkLeft) + std::string(kLinkRight);
  return text;
}

ast::Program program_for(Variant v, bool swapped, const std::string& override_text) {
  if (!override_text.empty()) return parse_program(override_text);
  if (swapped && v == Variant::Rank) return parse_program(swapped_link_source());
  return parse_program(source(v));
}

SymbolId symbol(Engine& e, std::string_view name, std::size_t arity) {
  return e.symbols().intern_symbol(name, arity);
}

}  // namespace

const char* to_string(Variant v) { return v == Variant::Basic ? "basic" : "rank"; }

std::string_view source(Variant v) { return v == Variant::Basic ? kBasic : std::string_view(rank_text()); }

std::string swapped_link_source() {
  return std::string(kRankHead) + std::string(kLinkRight) + std::string(kLinkLeft);
}

UfSession::UfSession(Variant variant, SessionOptions options)
    : variant_(variant),
      engine_(program_for(variant, options.swap_link_order, options.source_override), EngineOptions{options.store, options.trace}) {
  std::size_t root_arity = variant == Variant::Basic ? 1 : 2;
  make_ = symbol(engine_, "make", 1);
  union_ = symbol(engine_, "union", 2);
  find_ = symbol(engine_, "find", 2);
  link_ = symbol(engine_, "link", 2);
  root_ = symbol(engine_, "root", root_arity);
  arrow_ = symbol(engine_, "~>", 2);
  find_node_rule_ = 0;
  const auto& rules = engine_.program().rules;
  for (std::size_t i = 0; i < rules.size(); ++i) {
    if (rules[i].label == "findNode") find_node_rule_ = i;
  }

  if (options.audit_operations) {
    engine_.set_fire_hook([this](const Engine& e, const FireEvent& ev) {
      const Store& s = e.store();
      std::size_t live = 0;
      ConstraintId seen = 0;
      for (SymbolId op : {make_, union_, find_, link_}) {
        for (ConstraintId id : s.live_ids(op)) {
          ++live;
          seen = id;
        }
      }
      if (live > 1 || (live == 1 && seen != ev.active)) {
        violations_.push_back("after firing " + e.program().rules[ev.rule].label + ": " + std::to_string(live) +
                              " operation constraint(s) alive");
      }
    });
  }
}

std::uint64_t UfSession::total_find_steps() const { return engine_.counters().rule_firings[find_node_rule_]; }

void UfSession::run(SymbolId symbol, std::vector<Value> args) {
  std::uint64_t before = total_find_steps();
  if (engine_.call(symbol, std::move(args)) != RunStatus::Success) {
    throw std::logic_error("union-find derivation failed");
  }
  last_find_steps_ = total_find_steps() - before;
}

void UfSession::require_made(const Value& x) const {
  if (!made_.contains(x)) throw UnknownElement("element " + name(x) + " was never made");
}

void UfSession::make(const Value& x) {
  if (made_.contains(x)) throw DuplicateMake("element " + name(x) + " already made");
  made_.insert(x);
  run(make_, {x});
}

void UfSession::unite(const Value& x, const Value& y) {
  require_made(x);
  require_made(y);
  run(union_, {x, y});
}

Value UfSession::find(const Value& x) {
  require_made(x);
  Value result = engine_.fresh_var();
  run(find_, {x, result});
  Value r = engine_.deref(result);
  if (r.is_var()) throw std::logic_error("find(" + name(x) + ") left its result unbound");
  return r;
}

ParentMap UfSession::parents_and_ranks() const {
  ParentMap out;
  const Store& s = engine_.store();
  auto fail = [&](ConstraintId id, const std::string& why) {
    throw ForestViolation(why + ": " + engine_.format(id) + "#" + std::to_string(id));
  };
  for (SymbolId op : {make_, union_, find_, link_}) {
    if (!s.live_ids(op).empty()) fail(s.live_ids(op).front(), "operation constraint left in store");
  }
  if (s.live_count() != s.live_count(root_) + s.live_count(arrow_)) {
    for (ConstraintId id : s.all_live()) {
      SymbolId sym = s.get(id).symbol;
      if (sym != root_ && sym != arrow_) fail(id, "unexpected constraint");
    }
  }
  for (SymbolId sym : {root_, arrow_}) {
    for (ConstraintId id : s.live_ids(sym)) {
      const auto& args = s.get(id).args;
      for (const auto& a : args) {
        if (!engine_.deref(a).ground()) fail(id, "nonground constraint");
      }
      Value x = engine_.deref(args[0]);
      ParentEntry entry;
      if (sym == root_) {
        entry.parent = x;
        if (args.size() == 2) entry.rank = engine_.deref(args[1]).raw;
      } else {
        entry.parent = engine_.deref(args[1]);
      }
      if (!out.emplace(x, entry).second) fail(id, "element has more than one parent/root constraint");
    }
  }
  return out;
}

}  // namespace chr::programs
