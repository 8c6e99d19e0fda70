#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

// Source-level representation of CHR programs and queries. Names are kept
// as strings here; the engine interns them when compiling.
namespace chr::ast {

struct Var {
  int id = 0;
  std::string name;  // "_" for anonymous variables
  bool operator==(const Var&) const = default;
};

struct Const {
  std::string name;
  bool operator==(const Const&) const = default;
};

struct Int {
  std::int64_t value = 0;
  bool operator==(const Int&) const = default;
};

using Term = std::variant<Var, Const, Int>;

struct SourceLoc {
  int line = 1;
  int column = 1;
};

// A CHR constraint occurrence. Infix `X ~> Y` is stored as name "~>" with
// two arguments.
struct Atom {
  std::string name;
  std::vector<Term> args;
  SourceLoc loc;

  std::size_t arity() const { return args.size(); }
  bool operator==(const Atom& o) const { return name == o.name && args == o.args; }
};

// Arithmetic over integers and variables: leaves, `+` and `max/2`.
struct Expr {
  enum class Op { Leaf, Add, Max };
  Op op = Op::Leaf;
  Term leaf;
  std::vector<Expr> operands;

  static Expr of(Term t) { return Expr{Op::Leaf, std::move(t), {}}; }
  static Expr binary(Op op, Expr lhs, Expr rhs) {
    Expr e{op, Term{}, {}};
    e.operands.push_back(std::move(lhs));
    e.operands.push_back(std::move(rhs));
    return e;
  }
  bool operator==(const Expr&) const = default;
};

enum class CmpOp { Ge, Gt, Le, Lt, Eq };

struct GuardTest {
  CmpOp op = CmpOp::Eq;
  Expr lhs;
  Expr rhs;
  bool operator==(const GuardTest&) const = default;
};

// `L = R`: binds a variable to a constant or tests two constants.
struct Unify {
  Term lhs;
  Term rhs;
  bool operator==(const Unify&) const = default;
};

// `Target is Expr`.
struct IsEval {
  Term target;
  Expr expr;
  bool operator==(const IsEval&) const = default;
};

struct True {
  bool operator==(const True&) const = default;
};

using BodyItem = std::variant<Atom, Unify, IsEval, True>;

enum class RuleKind { Simplification, Propagation, Simpagation };

struct Rule {
  std::optional<std::string> name;
  std::vector<Atom> kept;
  std::vector<Atom> removed;
  std::vector<GuardTest> guard;
  std::vector<BodyItem> body;
  std::size_t source_index = 0;
  SourceLoc loc;

  RuleKind kind() const {
    if (kept.empty()) return RuleKind::Simplification;
    if (removed.empty()) return RuleKind::Propagation;
    return RuleKind::Simpagation;
  }
  // Display name: the given name or "rule<N>" (1-based textual position).
  std::string label() const;

  bool operator==(const Rule& o) const {
    return name == o.name && kept == o.kept && removed == o.removed && guard == o.guard &&
           body == o.body && source_index == o.source_index;
  }
};

struct Symbol {
  std::string name;
  std::size_t arity = 0;
  bool operator==(const Symbol&) const = default;
  auto operator<=>(const Symbol&) const = default;
};

struct Program {
  std::vector<Rule> rules;
  std::vector<Symbol> symbols;  // in order of first appearance
  bool operator==(const Program& o) const { return rules == o.rules && symbols == o.symbols; }
};

// A parsed goal. `variables` lists named query variables in order of first
// appearance; anonymous ones are omitted.
struct Query {
  std::vector<BodyItem> items;
  std::vector<Var> variables;
};

std::string to_string(const Term& t);
std::string to_string(const Atom& a);
std::string to_string(const Expr& e);
std::string to_string(const GuardTest& g);
std::string to_string(const BodyItem& b);
std::string to_string(const Rule& r);
// One rule per line, each terminated by ".\n". Reparses to an equal Program.
std::string to_string(const Program& p);

const char* to_string(CmpOp op);

}  // namespace chr::ast
