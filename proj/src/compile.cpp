#include <map>
#include <variant>

#include "chr/engine.hpp"

namespace chr {

namespace {

class RuleCompiler {
 public:
  explicit RuleCompiler(SymbolTable& symbols) : symbols_(symbols) {}

  ArgRef arg(const ast::Term& t) {
    if (auto* v = std::get_if<ast::Var>(&t)) {
      auto [it, inserted] = slots_.try_emplace(v->id, slots_.size());
      return ArgRef{ArgRef::Kind::Slot, it->second, {}};
    }
    if (auto* c = std::get_if<ast::Const>(&t)) {
      return ArgRef{ArgRef::Kind::Constant, 0, Value::atom(symbols_.intern_atom(c->name))};
    }
    return ArgRef{ArgRef::Kind::Constant, 0, Value::integer(std::get<ast::Int>(t).value)};
  }

  CompiledAtom atom(const ast::Atom& a) {
    CompiledAtom out{symbols_.intern_symbol(a.name, a.arity()), {}};
    for (const auto& t : a.args) out.args.push_back(arg(t));
    return out;
  }

  CompiledExpr expr(const ast::Expr& e) {
    CompiledExpr out;
    out.op = e.op;
    if (e.op == ast::Expr::Op::Leaf) {
      out.leaf = arg(e.leaf);
    } else {
      for (const auto& o : e.operands) out.operands.push_back(expr(o));
    }
    return out;
  }

  CompiledBodyItem body_item(const ast::BodyItem& item) {
    CompiledBodyItem out;
    if (auto* a = std::get_if<ast::Atom>(&item)) {
      out.kind = CompiledBodyItem::Kind::Constraint;
      out.atom = atom(*a);
    } else if (auto* u = std::get_if<ast::Unify>(&item)) {
      out.kind = CompiledBodyItem::Kind::Unify;
      out.lhs = arg(u->lhs);
      out.rhs = arg(u->rhs);
    } else if (auto* is = std::get_if<ast::IsEval>(&item)) {
      out.kind = CompiledBodyItem::Kind::Is;
      out.lhs = arg(is->target);
      out.expr = expr(is->expr);
    } else {
      out.kind = CompiledBodyItem::Kind::True;
    }
    return out;
  }

  std::size_t slot_count() const { return slots_.size(); }
  const std::map<int, std::size_t>& slots() const { return slots_; }

 private:
  SymbolTable& symbols_;
  std::map<int, std::size_t> slots_;
};

std::vector<PartnerStep> plan_partners(const CompiledRule& rule, std::size_t active_head) {
  std::vector<bool> known(rule.slot_count, false);
  auto learn = [&](const CompiledAtom& a) {
    for (const auto& x : a.args)
      if (x.kind == ArgRef::Kind::Slot) known[x.slot] = true;
  };
  learn(rule.heads[active_head]);

  std::vector<bool> done(rule.heads.size(), false);
  done[active_head] = true;
  std::vector<PartnerStep> plan;
  for (std::size_t placed = 1; placed < rule.heads.size(); ++placed) {
    bool found = false;
    for (std::size_t h = 0; h < rule.heads.size() && !found; ++h) {
      if (done[h]) continue;
      const auto& args = rule.heads[h].args;
      for (std::size_t p = 0; p < args.size(); ++p) {
        if (args[p].kind == ArgRef::Kind::Constant || known[args[p].slot]) {
          plan.push_back({h, p});
          done[h] = true;
          learn(rule.heads[h]);
          found = true;
          break;
        }
      }
    }
    if (!found) {
      throw CompileError("rule " + rule.label +
                         ": a partner constraint shares no variable with the rest of the head, so no index "
                         "lookup can find it");
    }
  }
  return plan;
}

}  // namespace

const std::vector<Occurrence>& CompiledProgram::occurrences_of(SymbolId s) const {
  static const std::vector<Occurrence> kNone;
  return s < occurrences.size() ? occurrences[s] : kNone;
}

CompiledProgram compile(const ast::Program& program, SymbolTable& symbols) {
  CompiledProgram out;
  for (const auto& r : program.rules) {
    RuleCompiler rc(symbols);
    CompiledRule cr;
    cr.label = r.label();
    for (const auto& a : r.kept) {
      cr.heads.push_back(rc.atom(a));
      cr.removed.push_back(false);
    }
    for (const auto& a : r.removed) {
      cr.heads.push_back(rc.atom(a));
      cr.removed.push_back(true);
    }
    for (const auto& g : r.guard) cr.guard.push_back({g.op, rc.expr(g.lhs), rc.expr(g.rhs)});
    for (const auto& b : r.body) cr.body.push_back(rc.body_item(b));
    cr.slot_count = rc.slot_count();
    cr.propagation = r.removed.empty();
    out.rules.push_back(std::move(cr));
  }
  // Body-only symbols need (empty) occurrence lists too.
  out.occurrences.resize(symbols.symbol_count());
  for (std::size_t ri = 0; ri < out.rules.size(); ++ri) {
    const auto& rule = out.rules[ri];
    for (std::size_t h = 0; h < rule.heads.size(); ++h) {
      out.occurrences[rule.heads[h].symbol].push_back({ri, h, rule.removed[h], plan_partners(rule, h)});
    }
  }
  return out;
}

CompiledGoal compile_goal(const std::vector<ast::BodyItem>& items, SymbolTable& symbols) {
  RuleCompiler rc(symbols);
  CompiledGoal out;
  for (const auto& b : items) out.items.push_back(rc.body_item(b));
  out.slot_count = rc.slot_count();
  out.slots = rc.slots();
  return out;
}

}  // namespace chr
