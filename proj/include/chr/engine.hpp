#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "chr/ast.hpp"
#include "chr/store.hpp"
#include "chr/value.hpp"

namespace chr {

// ---------------------------------------------------------------------------
// Compiled program
// ---------------------------------------------------------------------------

// A head/guard/body argument: either a rule-local variable slot or a
// constant.
struct ArgRef {
  enum class Kind : std::uint8_t { Slot, Constant };
  Kind kind = Kind::Constant;
  std::size_t slot = 0;
  Value constant;
};

struct CompiledAtom {
  SymbolId symbol = 0;
  std::vector<ArgRef> args;
};

struct CompiledExpr {
  ast::Expr::Op op = ast::Expr::Op::Leaf;
  ArgRef leaf;
  std::vector<CompiledExpr> operands;
};

struct CompiledGuard {
  ast::CmpOp op = ast::CmpOp::Eq;
  CompiledExpr lhs;
  CompiledExpr rhs;
};

struct CompiledBodyItem {
  enum class Kind : std::uint8_t { Constraint, Unify, Is, True };
  Kind kind = Kind::True;
  CompiledAtom atom;  // Constraint
  ArgRef lhs;         // Unify lhs, Is target
  ArgRef rhs;         // Unify rhs
  CompiledExpr expr;  // Is
};

// One partner lookup: match head atom `head` by looking up its argument
// `lookup_pos`, whose value is known by the time this step runs.
struct PartnerStep {
  std::size_t head = 0;
  std::size_t lookup_pos = 0;
};

struct Occurrence {
  std::size_t rule = 0;
  std::size_t head = 0;  // index into CompiledRule::heads
  bool removed = false;
  std::vector<PartnerStep> plan;
};

struct CompiledRule {
  std::string label;
  std::vector<CompiledAtom> heads;  // kept atoms, then removed atoms, textual order
  std::vector<bool> removed;        // parallel to heads
  std::vector<CompiledGuard> guard;
  std::vector<CompiledBodyItem> body;
  std::size_t slot_count = 0;
  bool propagation = false;
};

struct CompiledProgram {
  std::vector<CompiledRule> rules;
  // Occurrences per constraint symbol, ordered by (rule, head position).
  std::vector<std::vector<Occurrence>> occurrences;

  const std::vector<Occurrence>& occurrences_of(SymbolId s) const;
};

class CompileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Builds occurrence lists and partner lookup plans. Each next partner is the
// first remaining head atom (textual order) with an argument that is a
// constant or a variable already fixed by the match so far; that argument is
// the one looked up. Throws CompileError when some partner can never be
// reached through an index.
CompiledProgram compile(const ast::Program& program, SymbolTable& symbols);

// A query goal compiled like a rule body. `slots` maps parser variable ids
// to env slots.
struct CompiledGoal {
  std::vector<CompiledBodyItem> items;
  std::size_t slot_count = 0;
  std::map<int, std::size_t> slots;
};

CompiledGoal compile_goal(const std::vector<ast::BodyItem>& items, SymbolTable& symbols);

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

struct Counters {
  std::uint64_t activations = 0;
  std::uint64_t drops = 0;
  std::uint64_t active_removals = 0;  // activations that ended because the constraint died
  std::uint64_t default_transitions = 0;
  std::uint64_t wake_events = 0;
  std::uint64_t guard_checks = 0;
  std::uint64_t partner_probes = 0;
  std::uint64_t bindings = 0;
  std::uint64_t inserts = 0;  // mirrored from the store
  std::uint64_t deletes = 0;  // mirrored from the store
  std::vector<std::uint64_t> rule_firings;  // by rule index

  std::uint64_t total_firings() const;
};

enum class RunStatus { Success, Failure };

// Raised for errors inside a derivation (instantiation faults, unsupported
// variable aliasing). The engine is unusable afterwards.
class RuntimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EngineOptions {
  StoreOptions store;
  bool trace = false;
};

struct FireEvent {
  std::size_t rule = 0;
  ConstraintId active = 0;
  std::vector<ConstraintId> ids;  // matched ids in head order
};

// Variable -> constant bindings. Bind-once; no aliasing.
class BindingStore {
 public:
  Value fresh();
  void bind(const Value& var, const Value& value);
  Value deref(const Value& v) const {
    if (!v.is_var()) return v;
    return bound_[static_cast<std::size_t>(v.raw)];
  }
  bool bound(const Value& var) const { return !deref(var).is_var(); }
  std::size_t size() const { return bound_.size(); }

 private:
  std::vector<Value> bound_;  // unbound variables map to themselves
};

// Canonical sorted multiset of printed ground constraints.
using Snapshot = std::vector<std::string>;

class NonGroundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One CHR session executing a compiled program under the refined
// operational semantics: goals left to right, occurrences in textual order,
// committed choice, and re-activation of constraints whose variables get
// bound.
class Engine {
 public:
  explicit Engine(const ast::Program& program, EngineOptions options = {});

  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  struct QueryVar {
    std::string name;
    Value var;
  };

  // Runs the goal to quiescence. Named query variables are reported through
  // `vars` when given.
  RunStatus solve(const ast::Query& query, std::vector<QueryVar>* vars = nullptr);
  RunStatus solve(std::string_view query_text, std::vector<QueryVar>* vars = nullptr);
  // Activates a single CHR constraint and runs to quiescence.
  RunStatus call(SymbolId symbol, std::vector<Value> args);

  Value atom(std::string_view name) { return Value::atom(symbols_.intern_atom(name)); }
  Value fresh_var() { return bindings_.fresh(); }
  Value deref(const Value& v) const { return bindings_.deref(v); }

  SymbolTable& symbols() { return symbols_; }
  const SymbolTable& symbols() const { return symbols_; }
  const CompiledProgram& program() const { return program_; }
  const Store& store() const { return store_; }
  // Direct store access for tests that inject constraints.
  Store& mutable_store() { return store_; }
  const BindingStore& bindings() const { return bindings_; }
  Counters counters() const;
  const std::vector<std::string>& trace() const { return trace_; }
  bool failed() const { return failed_; }

  // Called after each rule commits its removals and before its body runs.
  void set_fire_hook(std::function<void(const Engine&, const FireEvent&)> hook) { fire_hook_ = std::move(hook); }

  std::string format(ConstraintId id) const;
  // Live constraints, one per line as "symbol(args)#id", ascending id.
  std::vector<std::string> dump() const;
  // Live constraints printed without ids, sorted. Unbound variables print
  // as V<n>.
  std::vector<std::string> store_lines() const;
  // As store_lines(), but throws NonGroundError naming the first nonground
  // constraint.
  Snapshot snapshot() const;

 private:
  struct GoalFrame {
    const std::vector<CompiledBodyItem>* items;
    std::vector<Value> env;
    std::size_t next;
  };
  struct ActiveFrame {
    ConstraintId id;
    std::size_t cursor;
  };
  struct WakeFrame {
    std::vector<ConstraintId> ids;
    std::size_t next;
  };
  using Frame = std::variant<GoalFrame, ActiveFrame, WakeFrame>;

  struct Match {
    std::vector<std::optional<Value>> env;
    std::vector<ConstraintId> ids;
    std::vector<bool> used;
  };

  RunStatus execute();
  void step_goal();
  void step_active();
  void step_wake();
  void run_item(const CompiledBodyItem& item, const std::vector<Value>& env);
  void activate_new(SymbolId symbol, std::vector<Value> args);
  void unify(const Value& a, const Value& b);
  void bind(const Value& var, const Value& value);

  bool try_occurrence(ConstraintId active, const Occurrence& occ, Match& m);
  bool search_partners(const CompiledRule& rule, const Occurrence& occ, std::size_t step, Match& m);
  bool match_atom(const CompiledAtom& atom, const std::vector<Value>& args,
                  std::vector<std::optional<Value>>& env) const;
  bool eval_guard(const CompiledRule& rule, const std::vector<std::optional<Value>>& env);
  std::optional<std::int64_t> eval_int(const CompiledExpr& e, const std::vector<std::optional<Value>>& env) const;
  void commit(ConstraintId active, const Occurrence& occ, Match& m);

  Value resolve(const ArgRef& a, const std::vector<Value>& env) const;
  std::optional<Value> resolve(const ArgRef& a, const std::vector<std::optional<Value>>& env) const;
  void emit(std::string line) {
    if (options_.trace) trace_.push_back(std::move(line));
  }

  EngineOptions options_;
  SymbolTable symbols_;
  CompiledProgram program_;
  Store store_;
  BindingStore bindings_;
  Counters counters_;
  std::vector<Frame> stack_;
  std::deque<std::vector<CompiledBodyItem>> query_items_;  // goals referenced by frames
  std::set<std::pair<std::size_t, std::vector<ConstraintId>>> history_;
  std::vector<std::string> trace_;
  std::function<void(const Engine&, const FireEvent&)> fire_hook_;
  bool failed_ = false;
};

// ---------------------------------------------------------------------------
// One-shot composition
// ---------------------------------------------------------------------------

struct RunResult {
  RunStatus status = RunStatus::Success;
  std::vector<std::string> store;  // store_lines() at quiescence
  std::vector<std::pair<std::string, std::string>> bindings;  // query variable -> printed value
  Counters counters;
  std::vector<std::string> trace;
};

// Parses both texts, runs the query on a fresh engine. ParseError,
// CompileError and RuntimeError propagate.
RunResult run(std::string_view program_text, std::string_view query_text, EngineOptions options = {});

}  // namespace chr
