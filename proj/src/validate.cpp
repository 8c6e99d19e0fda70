#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>

#include "chr/parser.hpp"

namespace chr {

using namespace ast;

namespace {

void collect_vars(const Term& t, std::set<std::string>& out) {
  if (auto* v = std::get_if<Var>(&t); v && v->name != "_") out.insert(v->name);
}

void collect_vars(const Expr& e, std::set<std::string>& out) {
  if (e.op == Expr::Op::Leaf) {
    collect_vars(e.leaf, out);
    return;
  }
  for (const auto& o : e.operands) collect_vars(o, out);
}

// Value of an expression made only of literals.
std::optional<std::int64_t> literal_value(const Expr& e) {
  switch (e.op) {
    case Expr::Op::Leaf:
      if (auto* i = std::get_if<Int>(&e.leaf)) return i->value;
      return std::nullopt;
    case Expr::Op::Add:
    case Expr::Op::Max: {
      auto a = literal_value(e.operands[0]);
      auto b = literal_value(e.operands[1]);
      if (!a || !b) return std::nullopt;
      return e.op == Expr::Op::Add ? *a + *b : std::max(*a, *b);
    }
  }
  return std::nullopt;
}

bool literally_false(const GuardTest& g) {
  if (g.op == CmpOp::Eq && g.lhs.op == Expr::Op::Leaf && g.rhs.op == Expr::Op::Leaf) {
    auto* a = std::get_if<Const>(&g.lhs.leaf);
    auto* b = std::get_if<Const>(&g.rhs.leaf);
    if (a && b) return a->name != b->name;
  }
  auto a = literal_value(g.lhs);
  auto b = literal_value(g.rhs);
  if (!a || !b) return false;
  switch (g.op) {
    case CmpOp::Ge: return !(*a >= *b);
    case CmpOp::Gt: return !(*a > *b);
    case CmpOp::Le: return !(*a <= *b);
    case CmpOp::Lt: return !(*a < *b);
    case CmpOp::Eq: return *a != *b;
  }
  return false;
}

}  // namespace

std::vector<Warning> validate_program(const Program& program) {
  std::vector<Warning> out;
  std::map<std::string, std::size_t> arity;

  auto check_arity = [&](const Atom& a, std::size_t rule) {
    auto [it, inserted] = arity.try_emplace(a.name, a.arity());
    if (!inserted && it->second != a.arity()) {
      out.push_back({Warning::Kind::ArityMismatch, rule,
                     "symbol " + a.name + " used with arity " + std::to_string(a.arity()) + " and " +
                         std::to_string(it->second)});
    }
  };

  for (std::size_t ri = 0; ri < program.rules.size(); ++ri) {
    const Rule& r = program.rules[ri];
    std::set<std::string> head;
    for (const auto* part : {&r.kept, &r.removed}) {
      for (const auto& a : *part) {
        check_arity(a, ri);
        for (const auto& t : a.args) collect_vars(t, head);
      }
    }

    for (const auto& g : r.guard) {
      if (literally_false(g)) {
        out.push_back({Warning::Kind::DeadRule, ri, r.label() + ": guard '" + to_string(g) + "' is never true"});
      }
      std::set<std::string> vars;
      collect_vars(g.lhs, vars);
      collect_vars(g.rhs, vars);
      for (const auto& v : vars) {
        if (!head.contains(v)) {
          out.push_back({Warning::Kind::UnboundVariable, ri,
                         r.label() + ": guard variable " + v + " does not occur in the head"});
        }
      }
    }

    std::set<std::string> defined = head;
    for (const auto& item : r.body) {
      if (auto* a = std::get_if<Atom>(&item)) {
        check_arity(*a, ri);
        for (const auto& t : a->args) collect_vars(t, defined);
      } else if (auto* u = std::get_if<Unify>(&item)) {
        collect_vars(u->lhs, defined);
        collect_vars(u->rhs, defined);
      } else if (auto* is = std::get_if<IsEval>(&item)) {
        std::set<std::string> used;
        collect_vars(is->expr, used);
        for (const auto& v : used) {
          if (!defined.contains(v)) {
            out.push_back({Warning::Kind::UnboundVariable, ri,
                           r.label() + ": variable " + v + " is evaluated before it is bound"});
          }
        }
        collect_vars(is->target, defined);
      }
    }
  }
  return out;
}

}  // namespace chr
