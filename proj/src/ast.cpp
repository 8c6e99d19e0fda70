#include "chr/ast.hpp"

#include <string>

namespace chr::ast {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

std::string join_atoms(const std::vector<Atom>& atoms) {
  std::string out;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (i) out += ", ";
    out += to_string(atoms[i]);
  }
  return out;
}

}  // namespace

std::string Rule::label() const {
  return name ? *name : "rule" + std::to_string(source_index + 1);
}

const char* to_string(CmpOp op) {
  switch (op) {
    case CmpOp::Ge: return ">=";
    case CmpOp::Gt: return ">";
    case CmpOp::Le: return "=<";
    case CmpOp::Lt: return "<";
    case CmpOp::Eq: return "==";
  }
  return "?";
}

std::string to_string(const Term& t) {
  return std::visit(Overloaded{
                        [](const Var& v) { return v.name; },
                        [](const Const& c) { return c.name; },
                        [](const Int& i) { return std::to_string(i.value); },
                    },
                    t);
}

std::string to_string(const Atom& a) {
  if (a.name == "~>" && a.args.size() == 2) {
    return to_string(a.args[0]) + " ~> " + to_string(a.args[1]);
  }
  if (a.args.empty()) return a.name;
  std::string out = a.name + "(";
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (i) out += ",";
    out += to_string(a.args[i]);
  }
  return out + ")";
}

std::string to_string(const Expr& e) {
  switch (e.op) {
    case Expr::Op::Leaf:
      return to_string(e.leaf);
    case Expr::Op::Add: {
      // `+` is left-associative; only a right operand that is itself a sum
      // needs parentheses.
      std::string rhs = to_string(e.operands[1]);
      if (e.operands[1].op == Expr::Op::Add) rhs = "(" + rhs + ")";
      return to_string(e.operands[0]) + "+" + rhs;
    }
    case Expr::Op::Max:
      return "max(" + to_string(e.operands[0]) + "," + to_string(e.operands[1]) + ")";
  }
  return {};
}

std::string to_string(const GuardTest& g) {
  return to_string(g.lhs) + " " + to_string(g.op) + " " + to_string(g.rhs);
}

std::string to_string(const BodyItem& b) {
  return std::visit(Overloaded{
                        [](const Atom& a) { return to_string(a); },
                        [](const Unify& u) { return to_string(u.lhs) + " = " + to_string(u.rhs); },
                        [](const IsEval& i) { return to_string(i.target) + " is " + to_string(i.expr); },
                        [](const True&) { return std::string("true"); },
                    },
                    b);
}

std::string to_string(const Rule& r) {
  std::string out;
  if (r.name) out += *r.name + " @ ";
  switch (r.kind()) {
    case RuleKind::Simplification:
      out += join_atoms(r.removed) + " <=> ";
      break;
    case RuleKind::Propagation:
      out += join_atoms(r.kept) + " ==> ";
      break;
    case RuleKind::Simpagation:
      out += join_atoms(r.kept) + " \\ " + join_atoms(r.removed) + " <=> ";
      break;
  }
  if (!r.guard.empty()) {
    for (std::size_t i = 0; i < r.guard.size(); ++i) {
      if (i) out += ", ";
      out += to_string(r.guard[i]);
    }
    out += " | ";
  }
  for (std::size_t i = 0; i < r.body.size(); ++i) {
    if (i) out += ", ";
    out += to_string(r.body[i]);
  }
  return out + ".";
}

std::string to_string(const Program& p) {
  std::string out;
  for (const auto& r : p.rules) out += to_string(r) + "\n";
  return out;
}

}  // namespace chr::ast
