#include "chr/engine.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "chr/parser.hpp"

namespace chr {

std::uint64_t Counters::total_firings() const {
  return std::accumulate(rule_firings.begin(), rule_firings.end(), std::uint64_t{0});
}

Value BindingStore::fresh() {
  Value v = Value::var(static_cast<std::int64_t>(bound_.size()));
  bound_.push_back(v);
  return v;
}

void BindingStore::bind(const Value& var, const Value& value) {
  auto& slot = bound_[static_cast<std::size_t>(var.raw)];
  if (!slot.is_var()) throw std::logic_error("bind-once violated for V" + std::to_string(var.raw));
  slot = value;
}

Engine::Engine(const ast::Program& program, EngineOptions options)
    : options_(options), program_(compile(program, symbols_)), store_(options.store) {
  counters_.rule_firings.assign(program_.rules.size(), 0);
}

Counters Engine::counters() const {
  Counters c = counters_;
  c.inserts = store_.counters().inserts;
  c.deletes = store_.counters().deletes;
  return c;
}

// ---------------------------------------------------------------------------
// Entry points
// ---------------------------------------------------------------------------

RunStatus Engine::solve(std::string_view query_text, std::vector<QueryVar>* vars) {
  return solve(parse_query(query_text), vars);
}

RunStatus Engine::solve(const ast::Query& query, std::vector<QueryVar>* vars) {
  if (failed_) return RunStatus::Failure;
  CompiledGoal goal = compile_goal(query.items, symbols_);
  std::vector<Value> env(goal.slot_count);
  for (auto& v : env) v = bindings_.fresh();
  if (vars) {
    for (const auto& qv : query.variables) vars->push_back({qv.name, env[goal.slots.at(qv.id)]});
  }
  query_items_.push_back(std::move(goal.items));
  stack_.push_back(GoalFrame{&query_items_.back(), std::move(env), 0});
  return execute();
}

RunStatus Engine::call(SymbolId symbol, std::vector<Value> args) {
  if (failed_) return RunStatus::Failure;
  for (auto& a : args) a = deref(a);
  activate_new(symbol, std::move(args));
  return execute();
}

RunStatus Engine::execute() {
  try {
    while (!stack_.empty() && !failed_) {
      switch (stack_.back().index()) {
        case 0: step_goal(); break;
        case 1: step_active(); break;
        case 2: step_wake(); break;
      }
    }
  } catch (...) {
    failed_ = true;
    stack_.clear();
    throw;
  }
  stack_.clear();
  query_items_.clear();
  return failed_ ? RunStatus::Failure : RunStatus::Success;
}

// ---------------------------------------------------------------------------
// Transitions
// ---------------------------------------------------------------------------

void Engine::step_goal() {
  auto& f = std::get<GoalFrame>(stack_.back());
  if (f.next == f.items->size()) {
    stack_.pop_back();
    return;
  }
  const CompiledBodyItem& item = (*f.items)[f.next++];
  if (f.next == f.items->size()) {
    // Last item: drop the frame first so recursion through bodies does not
    // grow the stack.
    std::vector<Value> env = std::move(f.env);
    stack_.pop_back();
    run_item(item, env);
  } else {
    std::vector<Value> env = f.env;
    run_item(item, env);
  }
}

void Engine::run_item(const CompiledBodyItem& item, const std::vector<Value>& env) {
  switch (item.kind) {
    case CompiledBodyItem::Kind::True:
      return;
    case CompiledBodyItem::Kind::Constraint: {
      std::vector<Value> args;
      args.reserve(item.atom.args.size());
      for (const auto& a : item.atom.args) args.push_back(deref(resolve(a, env)));
      activate_new(item.atom.symbol, std::move(args));
      return;
    }
    case CompiledBodyItem::Kind::Unify:
      unify(deref(resolve(item.lhs, env)), deref(resolve(item.rhs, env)));
      return;
    case CompiledBodyItem::Kind::Is: {
      std::vector<std::optional<Value>> opt(env.begin(), env.end());
      auto v = eval_int(item.expr, opt);
      if (!v) throw RuntimeError("instantiation fault: arithmetic on an unbound or non-integer value");
      unify(deref(resolve(item.lhs, env)), Value::integer(*v));
      return;
    }
  }
}

void Engine::activate_new(SymbolId symbol, std::vector<Value> args) {
  ConstraintId id = store_.insert(symbol, args);
  ++counters_.activations;
  if (options_.trace) {
    emit("ACT " + symbols_.symbol_name(symbol) + "/" + std::to_string(args.size()) + "#" + std::to_string(id));
  }
  stack_.push_back(ActiveFrame{id, 0});
}

void Engine::step_wake() {
  auto& f = std::get<WakeFrame>(stack_.back());
  while (f.next < f.ids.size() && !store_.alive(f.ids[f.next])) ++f.next;
  if (f.next == f.ids.size()) {
    stack_.pop_back();
    return;
  }
  ConstraintId id = f.ids[f.next++];
  ++counters_.wake_events;
  ++counters_.activations;
  if (options_.trace) {
    const auto& c = store_.get(id);
    emit("WAKE #" + std::to_string(id));
    emit("ACT " + symbols_.symbol_name(c.symbol) + "/" + std::to_string(c.args.size()) + "#" + std::to_string(id));
  }
  stack_.push_back(ActiveFrame{id, 0});
}

void Engine::step_active() {
  auto f = std::get<ActiveFrame>(stack_.back());
  if (!store_.alive(f.id)) {
    ++counters_.active_removals;
    stack_.pop_back();
    return;
  }
  const auto& occs = program_.occurrences_of(store_.get(f.id).symbol);
  if (f.cursor == occs.size()) {
    ++counters_.drops;
    emit("DROP #" + std::to_string(f.id));
    stack_.pop_back();
    return;
  }
  const Occurrence& occ = occs[f.cursor];
  Match m;
  if (!try_occurrence(f.id, occ, m)) {
    ++counters_.default_transitions;
    std::get<ActiveFrame>(stack_.back()).cursor = f.cursor + 1;
    return;
  }
  commit(f.id, occ, m);
}

void Engine::commit(ConstraintId active, const Occurrence& occ, Match& m) {
  const CompiledRule& rule = program_.rules[occ.rule];
  ++counters_.rule_firings[occ.rule];
  if (options_.trace) {
    std::string ids;
    for (std::size_t i = 0; i < m.ids.size(); ++i) {
      if (i) ids += ",";
      ids += std::to_string(m.ids[i]);
    }
    emit("FIRE " + rule.label + " ids=[" + ids + "]");
  }
  if (rule.propagation) history_.emplace(occ.rule, m.ids);

  bool active_removed = false;
  for (std::size_t h = 0; h < rule.heads.size(); ++h) {
    if (!rule.removed[h]) continue;
    store_.erase(m.ids[h]);
    if (m.ids[h] == active) active_removed = true;
  }
  // The active frame is on top of the stack. A removed active constraint
  // ends its activation here; a surviving one resumes at the same
  // occurrence once the body is done.
  if (active_removed) {
    ++counters_.active_removals;
    stack_.pop_back();
  }
  if (fire_hook_) fire_hook_(*this, FireEvent{occ.rule, active, m.ids});

  std::vector<Value> env(rule.slot_count);
  for (std::size_t s = 0; s < rule.slot_count; ++s) env[s] = m.env[s] ? *m.env[s] : bindings_.fresh();
  if (!rule.body.empty()) stack_.push_back(GoalFrame{&rule.body, std::move(env), 0});
}

// ---------------------------------------------------------------------------
// Matching
// ---------------------------------------------------------------------------

bool Engine::try_occurrence(ConstraintId active, const Occurrence& occ, Match& m) {
  const CompiledRule& rule = program_.rules[occ.rule];
  m.env.assign(rule.slot_count, std::nullopt);
  m.ids.assign(rule.heads.size(), 0);
  m.used.assign(rule.heads.size(), false);
  if (!match_atom(rule.heads[occ.head], store_.get(active).args, m.env)) return false;
  m.ids[occ.head] = active;
  m.used[occ.head] = true;
  return search_partners(rule, occ, 0, m);
}

bool Engine::search_partners(const CompiledRule& rule, const Occurrence& occ, std::size_t step, Match& m) {
  if (step == occ.plan.size()) {
    if (rule.propagation && history_.contains({occ.rule, m.ids})) return false;
    return eval_guard(rule, m.env);
  }
  const PartnerStep& ps = occ.plan[step];
  const CompiledAtom& atom = rule.heads[ps.head];
  Value key = deref(*resolve(atom.args[ps.lookup_pos], m.env));
  LookupRange range =
      key.ground() ? store_.lookup(atom.symbol, ps.lookup_pos, key) : store_.lookup_var(atom.symbol, ps.lookup_pos, key);
  counters_.partner_probes += range.cost();

  for (ConstraintId id : range) {
    bool taken = false;
    for (std::size_t h = 0; h < m.ids.size(); ++h) taken |= m.used[h] && m.ids[h] == id;
    if (taken) continue;
    auto saved = m.env;
    if (match_atom(atom, store_.get(id).args, m.env)) {
      m.ids[ps.head] = id;
      m.used[ps.head] = true;
      if (search_partners(rule, occ, step + 1, m)) return true;
      m.used[ps.head] = false;
    }
    m.env = std::move(saved);
  }
  return false;
}

bool Engine::match_atom(const CompiledAtom& atom, const std::vector<Value>& args,
                        std::vector<std::optional<Value>>& env) const {
  for (std::size_t p = 0; p < atom.args.size(); ++p) {
    const ArgRef& h = atom.args[p];
    Value actual = deref(args[p]);
    if (h.kind == ArgRef::Kind::Constant) {
      if (actual != h.constant) return false;
      continue;
    }
    auto& slot = env[h.slot];
    if (!slot) {
      slot = actual;
    } else if (*slot != actual) {
      return false;
    }
  }
  return true;
}

std::optional<std::int64_t> Engine::eval_int(const CompiledExpr& e,
                                             const std::vector<std::optional<Value>>& env) const {
  switch (e.op) {
    case ast::Expr::Op::Leaf: {
      auto v = resolve(e.leaf, env);
      if (!v) return std::nullopt;
      Value d = deref(*v);
      if (d.kind != Value::Kind::Int) return std::nullopt;
      return d.raw;
    }
    case ast::Expr::Op::Add:
    case ast::Expr::Op::Max: {
      auto a = eval_int(e.operands[0], env);
      auto b = eval_int(e.operands[1], env);
      if (!a || !b) return std::nullopt;
      return e.op == ast::Expr::Op::Add ? *a + *b : std::max(*a, *b);
    }
  }
  return std::nullopt;
}

bool Engine::eval_guard(const CompiledRule& rule, const std::vector<std::optional<Value>>& env) {
  for (const auto& g : rule.guard) {
    ++counters_.guard_checks;
    if (g.op == ast::CmpOp::Eq && g.lhs.op == ast::Expr::Op::Leaf && g.rhs.op == ast::Expr::Op::Leaf) {
      auto a = resolve(g.lhs.leaf, env);
      auto b = resolve(g.rhs.leaf, env);
      if (!a || !b) return false;
      Value da = deref(*a), db = deref(*b);
      if (!da.ground() || !db.ground() || da != db) return false;
      continue;
    }
    auto a = eval_int(g.lhs, env);
    auto b = eval_int(g.rhs, env);
    if (!a || !b) return false;
    bool ok = false;
    switch (g.op) {
      case ast::CmpOp::Ge: ok = *a >= *b; break;
      case ast::CmpOp::Gt: ok = *a > *b; break;
      case ast::CmpOp::Le: ok = *a <= *b; break;
      case ast::CmpOp::Lt: ok = *a < *b; break;
      case ast::CmpOp::Eq: ok = *a == *b; break;
    }
    if (!ok) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Built-ins
// ---------------------------------------------------------------------------

void Engine::unify(const Value& a, const Value& b) {
  if (a.ground() && b.ground()) {
    if (a != b) failed_ = true;
    return;
  }
  if (a.is_var() && b.is_var()) {
    if (a == b) return;
    throw RuntimeError("variable aliasing (" + symbols_.format(a) + " = " + symbols_.format(b) +
                       ") is not supported");
  }
  if (a.is_var()) {
    bind(a, b);
  } else {
    bind(b, a);
  }
}

void Engine::bind(const Value& var, const Value& value) {
  bindings_.bind(var, value);
  ++counters_.bindings;
  if (options_.trace) emit("BIND " + symbols_.format(var) + " := " + symbols_.format(value));
  auto woken = store_.rebind_index(var, value);
  if (!woken.empty()) stack_.push_back(WakeFrame{std::move(woken), 0});
}

Value Engine::resolve(const ArgRef& a, const std::vector<Value>& env) const {
  return a.kind == ArgRef::Kind::Constant ? a.constant : env[a.slot];
}

std::optional<Value> Engine::resolve(const ArgRef& a, const std::vector<std::optional<Value>>& env) const {
  if (a.kind == ArgRef::Kind::Constant) return a.constant;
  return env[a.slot];
}

// ---------------------------------------------------------------------------
// Inspection
// ---------------------------------------------------------------------------

std::string Engine::format(ConstraintId id) const {
  const auto& c = store_.get(id);
  std::vector<Value> args;
  for (const auto& a : c.args) args.push_back(deref(a));
  return symbols_.format(c.symbol, args);
}

std::vector<std::string> Engine::dump() const {
  std::vector<std::string> out;
  for (ConstraintId id : store_.all_live()) out.push_back(format(id) + "#" + std::to_string(id));
  return out;
}

std::vector<std::string> Engine::store_lines() const {
  std::vector<std::string> out;
  for (ConstraintId id : store_.all_live()) out.push_back(format(id));
  std::sort(out.begin(), out.end());
  return out;
}

Snapshot Engine::snapshot() const {
  for (ConstraintId id : store_.all_live()) {
    for (const auto& a : store_.get(id).args) {
      if (!deref(a).ground()) throw NonGroundError("nonground constraint in store: " + format(id) + "#" + std::to_string(id));
    }
  }
  return store_lines();
}

RunResult run(std::string_view program_text, std::string_view query_text, EngineOptions options) {
  ast::Program program = parse_program(program_text);
  ast::Query query = parse_query(query_text);
  Engine engine(program, options);
  std::vector<Engine::QueryVar> vars;
  RunResult result;
  result.status = engine.solve(query, &vars);
  result.store = engine.store_lines();
  for (const auto& qv : vars) result.bindings.emplace_back(qv.name, engine.symbols().format(engine.deref(qv.var)));
  result.counters = engine.counters();
  result.trace = engine.trace();
  return result;
}

}  // namespace chr
