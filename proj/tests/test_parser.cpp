#include <doctest.h>

#include <random>

#include "chr/parser.hpp"
#include "chr/programs.hpp"

using namespace chr;
using namespace chr::ast;

namespace {

const Atom& atom_of(const BodyItem& b) { return std::get<Atom>(b); }

bool has_warning(const std::vector<Warning>& ws, Warning::Kind k) {
  return std::any_of(ws.begin(), ws.end(), [k](const Warning& w) { return w.kind == k; });
}

std::string parse_error(std::string_view text) {
  try {
    parse_program(text);
  } catch (const ParseError& e) {
    return e.reason();
  }
  return "";
}

}  // namespace

TEST_SUITE("parser") {

TEST_CASE("simplification rule with true body") {
  auto p = parse_program("linkEq @ link(X,X) <=> true.");
  REQUIRE(p.rules.size() == 1);
  const Rule& r = p.rules[0];
  CHECK(r.name == "linkEq");
  CHECK(r.kind() == RuleKind::Simplification);
  CHECK(r.kept.empty());
  REQUIRE(r.removed.size() == 1);
  CHECK(to_string(r.removed[0]) == "link(X,X)");
  CHECK(r.guard.empty());
  REQUIRE(r.body.size() == 1);
  CHECK(std::holds_alternative<True>(r.body[0]));
}

TEST_CASE("simpagation rule with anonymous variable") {
  auto p = parse_program("findRoot @ root(X,_) \\ find(X,R) <=> R=X.");
  const Rule& r = p.rules.at(0);
  CHECK(r.kind() == RuleKind::Simpagation);
  REQUIRE(r.kept.size() == 1);
  REQUIRE(r.removed.size() == 1);
  CHECK(r.kept[0].name == "root");
  CHECK(r.removed[0].name == "find");
  const auto& u = std::get<Unify>(r.body.at(0));
  CHECK(std::get<Var>(u.lhs).name == "R");
  CHECK(std::get<Var>(u.rhs).name == "X");
}

TEST_CASE("each _ is a fresh variable") {
  auto p = parse_program("r @ a(_,_) <=> true.");
  const auto& args = p.rules[0].removed[0].args;
  CHECK(std::get<Var>(args[0]).id != std::get<Var>(args[1]).id);
}

TEST_CASE("propagation rule keeps its whole head") {
  auto p = parse_program("step @ edge(X,Y), path(Y,Z) ==> path(X,Z).");
  const Rule& r = p.rules[0];
  CHECK(r.kind() == RuleKind::Propagation);
  CHECK(r.kept.size() == 2);
  CHECK(r.removed.empty());
}

TEST_CASE("guard, is and max") {
  auto p = parse_program(
      "linkLeft @ link(X,Y), root(X,RX), root(Y,RY) <=> RX >= RY | Y ~> X, NRX is max(RX,RY+1), root(X,NRX).");
  const Rule& r = p.rules[0];
  REQUIRE(r.guard.size() == 1);
  CHECK(r.guard[0].op == CmpOp::Ge);
  REQUIRE(r.body.size() == 3);
  CHECK(atom_of(r.body[0]).name == "~>");
  const auto& is = std::get<IsEval>(r.body[1]);
  CHECK(to_string(is.expr) == "max(RX,RY+1)");
}

TEST_CASE("unnamed rules and comments") {
  auto p = parse_program("% leading comment\na(X) <=> b(X). % trailing\n\nb(X) ==> c(X).\n");
  REQUIRE(p.rules.size() == 2);
  CHECK_FALSE(p.rules[0].name.has_value());
  CHECK(p.rules[0].label() == "rule1");
  CHECK(p.rules[1].label() == "rule2");
}

TEST_CASE("empty program") {
  CHECK(parse_program("").rules.empty());
  CHECK(parse_program("  % only a comment\n").rules.empty());
}

TEST_CASE("symbols in order of first appearance") {
  auto p = parse_program("make @ make(X) <=> root(X).");
  REQUIRE(p.symbols.size() == 2);
  CHECK(p.symbols[0] == Symbol{"make", 1});
  CHECK(p.symbols[1] == Symbol{"root", 1});
}

TEST_CASE("errors carry line and column") {
  try {
    parse_program("a(X) <=> true.\nbad @ <=> true.");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.where().line == 2);
    CHECK(e.reason().find("empty head") != std::string::npos);
  }
}

TEST_CASE("error kinds") {
  CHECK(parse_error("bad @ <=> true.").find("empty head") != std::string::npos);
  CHECK(parse_error("a(X) <=> b(X)").find("unterminated") != std::string::npos);
  CHECK(parse_error("a(X) <=> b(X) | true.").find("guard") != std::string::npos);
  CHECK(parse_error("a(X) <=> X # 1.").find("unknown operator") != std::string::npos);
  CHECK(parse_error("a(X) <=> true.\nb(X) <=> a(X,X).").find("arity") != std::string::npos);
  CHECK(parse_error("r @ a(X) <=> true.\nr @ b(X) <=> true.").find("duplicate") != std::string::npos);
  CHECK(parse_error("a(X) <=> X >= 1.") != "");
}

TEST_CASE("queries") {
  auto q = parse_query("make(a), make(b), union(a,b).");
  REQUIRE(q.items.size() == 3);
  CHECK(atom_of(q.items[2]).name == "union");
  CHECK(q.variables.empty());

  auto f = parse_query("find(a,R).");
  REQUIRE(f.items.size() == 1);
  REQUIRE(f.variables.size() == 1);
  CHECK(f.variables[0].name == "R");

  auto is = parse_query("X is max(1,2).");
  REQUIRE(is.items.size() == 1);
  CHECK(std::holds_alternative<IsEval>(is.items[0]));

  auto shared = parse_query("p(X), q(X,Y).");
  CHECK(std::get<Var>(atom_of(shared.items[0]).args[0]).id == std::get<Var>(atom_of(shared.items[1]).args[0]).id);
  CHECK(shared.variables.size() == 2);

  CHECK_THROWS_AS(parse_query("make(a"), ParseError);
  CHECK_THROWS_AS(parse_query("make(a). make(b)."), ParseError);
  CHECK_THROWS_AS(parse_query("make(a) make(b)."), ParseError);
}

TEST_CASE("negative integers") {
  auto q = parse_query("p(-3).");
  CHECK(std::get<Int>(atom_of(q.items[0]).args[0]).value == -3);
}

TEST_CASE("validation") {
  CHECK(validate_program(parse_program(programs::source(programs::Variant::Rank))).empty());
  CHECK(validate_program(parse_program(programs::source(programs::Variant::Basic))).empty());
  CHECK(has_warning(validate_program(parse_program("r @ a(X) <=> 1 >= 2 | true.")), Warning::Kind::DeadRule));
  CHECK_FALSE(validate_program(parse_program("r @ a(X) <=> 2 >= 1 | true.")).size());
  CHECK(has_warning(validate_program(parse_program("r @ a(X) <=> X >= Y | true.")), Warning::Kind::UnboundVariable));
  CHECK(has_warning(validate_program(parse_program("r @ a(X) <=> Z is Y + 1, b(Z).")),
                    Warning::Kind::UnboundVariable));
}

TEST_CASE("arity warning for mixed root/1 and root/2") {
  ast::Program p;
  Rule r1;
  r1.name = "one";
  r1.removed.push_back(Atom{"root", {Var{0, "X"}}, {}});
  r1.body.push_back(True{});
  Rule r2 = r1;
  r2.name = "two";
  r2.source_index = 1;
  r2.removed[0].args.push_back(Var{1, "Y"});
  p.rules = {r1, r2};
  CHECK(has_warning(validate_program(p), Warning::Kind::ArityMismatch));
}

TEST_CASE("round trip on the program corpus") {
  const char* corpus[] = {
      "make @ make(X) <=> root(X).",
      "a(X) <=> true.",
      "r @ a(X,Y) ==> X >= Y, X == Y | b(Y).",
      "s @ k(X) \\ r(X,Y) <=> Z is X+Y+(1+2), q(Z), Y = X.",
      "t @ a(X) <=> X =< 3, X < 4, X > -1 | Y is max(X,max(1,X+1)), b(Y).",
      "u @ X ~> Y, Y ~> Z ==> X ~> Z.",
      "v @ p(_,X,_) <=> q(X).",
      "w @ a(1,foo,-2) <=> true.",
  };
  for (const char* text : corpus) {
    CAPTURE(text);
    auto p = parse_program(text);
    auto printed = to_string(p);
    CHECK(parse_program(printed) == p);
    CHECK(to_string(parse_program(printed)) == printed);
  }
  for (auto v : {programs::Variant::Basic, programs::Variant::Rank}) {
    auto p = parse_program(programs::source(v));
    CHECK(parse_program(to_string(p)) == p);
  }
}

TEST_CASE("parsing is total on random input") {
  std::mt19937_64 rng(7);
  const std::string alphabet = "abXY_(),.@\\|<=>~-+%0123456789 \n\t#$\"'{}[]isaxm";
  std::size_t errors = 0, programs_parsed = 0;
  for (int i = 0; i < 5000; ++i) {
    std::string text;
    std::size_t len = rng() % 40;
    for (std::size_t k = 0; k < len; ++k) {
      text += (rng() % 16 == 0) ? static_cast<char>(rng() % 256) : alphabet[rng() % alphabet.size()];
    }
    try {
      parse_program(text);
      ++programs_parsed;
    } catch (const ParseError&) {
      ++errors;
    }
    try {
      parse_query(text);
    } catch (const ParseError&) {
    }
  }
  CHECK(errors + programs_parsed == 5000);

  // Mutations of real programs.
  std::string base(programs::source(programs::Variant::Rank));
  for (int i = 0; i < 3000; ++i) {
    std::string text = base;
    for (int k = 0; k < 3; ++k) {
      std::size_t pos = rng() % text.size();
      switch (rng() % 3) {
        case 0: text.erase(pos, 1); break;
        case 1: text.insert(pos, 1, alphabet[rng() % alphabet.size()]); break;
        default: text[pos] = alphabet[rng() % alphabet.size()];
      }
    }
    try {
      auto p = parse_program(text);
      CHECK(parse_program(to_string(p)) == p);
    } catch (const ParseError&) {
    }
  }
}

}  // TEST_SUITE
