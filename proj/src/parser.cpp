#include "chr/parser.hpp"

#include <cctype>
#include <charconv>
#include <map>
#include <optional>
#include <string>
#include <variant>

namespace chr {

using namespace ast;

ParseError::ParseError(std::string message, SourceLoc loc)
    : std::runtime_error(std::to_string(loc.line) + ":" + std::to_string(loc.column) + ": " + message),
      reason_(std::move(message)),
      loc_(loc) {}

namespace {

enum class Tok { Lower, Upper, Int, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourceLoc loc;
};

bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::vector<Token> lex(std::string_view src) {
  static constexpr std::string_view kPuncts[] = {"<=>", "==>", "~>", "==", "=<", ">=", "=", ">", "<", "(",
                                                 ")",   ",",   ".",  "@",  "\\", "|",  "+", "-"};
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == '%') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    SourceLoc loc{line, col};
    unsigned char uc = static_cast<unsigned char>(c);
    if (std::islower(uc) || std::isupper(uc) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      Tok kind = std::islower(uc) ? Tok::Lower : Tok::Upper;
      out.push_back({kind, std::string(src.substr(i, j - i)), loc});
      advance(j - i);
      continue;
    }
    if (std::isdigit(uc)) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      out.push_back({Tok::Int, std::string(src.substr(i, j - i)), loc});
      advance(j - i);
      continue;
    }
    bool matched = false;
    for (auto p : kPuncts) {
      if (src.substr(i, p.size()) == p) {
        out.push_back({Tok::Punct, std::string(p), loc});
        advance(p.size());
        matched = true;
        break;
      }
    }
    if (!matched) {
      std::string shown = uc >= 0x20 && uc < 0x7f ? std::string(1, c) : "\\x" + std::to_string(uc);
      throw ParseError("unknown operator '" + shown + "'", loc);
    }
  }
  out.push_back({Tok::End, "", {line, col}});
  return out;
}

std::optional<CmpOp> comparison(const Token& t) {
  if (t.kind != Tok::Punct) return std::nullopt;
  if (t.text == ">=") return CmpOp::Ge;
  if (t.text == ">") return CmpOp::Gt;
  if (t.text == "=<") return CmpOp::Le;
  if (t.text == "<") return CmpOp::Lt;
  if (t.text == "==") return CmpOp::Eq;
  return std::nullopt;
}

// Either a goal item or a guard comparison; the caller decides which is
// legal in its position.
using Item = std::variant<BodyItem, GuardTest>;

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(lex(text)) {}

  Program program() {
    Program p;
    while (peek().kind != Tok::End) {
      vars_.clear();
      Rule r = rule();
      r.source_index = p.rules.size();
      if (r.name) {
        for (const auto& other : p.rules) {
          if (other.name == r.name) throw ParseError("duplicate rule name '" + *r.name + "'", r.loc);
        }
      }
      p.rules.push_back(std::move(r));
    }
    p.symbols = symbols_;
    return p;
  }

  Query query() {
    Query q;
    if (peek().kind == Tok::End) throw ParseError("empty query", peek().loc);
    for (;;) {
      Item it = item();
      if (std::holds_alternative<GuardTest>(it)) {
        throw ParseError("comparison is only allowed in a rule guard", last_item_loc_);
      }
      q.items.push_back(std::get<BodyItem>(std::move(it)));
      if (accept(",")) continue;
      expect_end_of_clause("query");
      break;
    }
    if (peek().kind != Tok::End) throw ParseError("unexpected input after query", peek().loc);
    for (const auto& [name, id] : var_order_) q.variables.push_back(Var{id, name});
    return q;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t k = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[k];
  }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool is_punct(const Token& t, std::string_view p) const { return t.kind == Tok::Punct && t.text == p; }
  bool accept(std::string_view p) {
    if (is_punct(peek(), p)) {
      next();
      return true;
    }
    return false;
  }
  void expect(std::string_view p) {
    if (!accept(p)) {
      if (peek().kind == Tok::End) throw ParseError("unexpected end of input, expected '" + std::string(p) + "'", peek().loc);
      throw ParseError("expected '" + std::string(p) + "' but found '" + peek().text + "'", peek().loc);
    }
  }
  void expect_end_of_clause(const char* what) {
    if (accept(".")) return;
    if (peek().kind == Tok::End) throw ParseError(std::string("unterminated ") + what + ", missing '.'", peek().loc);
    throw ParseError("expected ',' or '.' but found '" + peek().text + "'", peek().loc);
  }

  static bool head_separator(const Token& t) {
    return t.kind == Tok::Punct && (t.text == "\\" || t.text == "<=>" || t.text == "==>");
  }

  Rule rule() {
    Rule r;
    r.loc = peek().loc;
    if ((peek().kind == Tok::Lower || peek().kind == Tok::Upper) && is_punct(peek(1), "@")) {
      r.name = next().text;
      next();
    }
    std::vector<Atom> first = head_list();
    if (accept("\\")) {
      std::vector<Atom> second = head_list();
      if (is_punct(peek(), "==>")) throw ParseError("simpagation rule requires '<=>'", peek().loc);
      expect("<=>");
      r.kept = std::move(first);
      r.removed = std::move(second);
    } else if (accept("<=>")) {
      r.removed = std::move(first);
    } else {
      expect("==>");
      r.kept = std::move(first);
    }

    std::vector<std::pair<Item, SourceLoc>> items = item_list();
    if (accept("|")) {
      for (auto& [it, loc] : items) {
        if (auto* g = std::get_if<GuardTest>(&it)) {
          r.guard.push_back(std::move(*g));
        } else if (!std::holds_alternative<True>(std::get<BodyItem>(it))) {
          throw ParseError("guard may only contain built-in tests", loc);
        }
      }
      items = item_list();
    }
    for (auto& [it, loc] : items) {
      if (std::holds_alternative<GuardTest>(it)) {
        throw ParseError("comparison is only allowed in a rule guard", loc);
      }
      r.body.push_back(std::get<BodyItem>(std::move(it)));
    }
    expect_end_of_clause("rule");
    return r;
  }

  std::vector<Atom> head_list() {
    std::vector<Atom> atoms;
    if (head_separator(peek()) || peek().kind == Tok::End || is_punct(peek(), ".")) {
      throw ParseError("empty head", peek().loc);
    }
    for (;;) {
      SourceLoc loc = peek().loc;
      Item it = item();
      auto* b = std::get_if<BodyItem>(&it);
      auto* a = b ? std::get_if<Atom>(b) : nullptr;
      if (!a) throw ParseError("head may only contain CHR constraints", loc);
      atoms.push_back(std::move(*a));
      if (!accept(",")) break;
    }
    return atoms;
  }

  std::vector<std::pair<Item, SourceLoc>> item_list() {
    std::vector<std::pair<Item, SourceLoc>> items;
    if (peek().kind == Tok::End) throw ParseError("unterminated rule, missing body", peek().loc);
    for (;;) {
      SourceLoc loc = peek().loc;
      items.emplace_back(item(), loc);
      if (!accept(",")) break;
    }
    return items;
  }

  Item item() {
    const Token& t = peek();
    last_item_loc_ = t.loc;
    if (t.kind == Tok::Lower && t.text == "true" && !is_punct(peek(1), "(")) {
      next();
      return BodyItem{True{}};
    }
    if (t.kind == Tok::Lower && t.text != "max" && is_punct(peek(1), "(")) {
      return BodyItem{compound()};
    }
    Expr lhs = sum();
    const Token& op = peek();
    if (is_punct(op, "~>")) {
      next();
      Term rhs = term();
      Atom a{"~>", {leaf_of(lhs, op.loc), rhs}, t.loc};
      register_symbol(a);
      return BodyItem{std::move(a)};
    }
    if (is_punct(op, "=")) {
      next();
      SourceLoc rloc = peek().loc;
      Expr rhs = sum();
      return BodyItem{Unify{leaf_of(lhs, op.loc), leaf_of(rhs, rloc)}};
    }
    if (op.kind == Tok::Lower && op.text == "is") {
      next();
      return BodyItem{IsEval{leaf_of(lhs, op.loc), sum()}};
    }
    if (auto cmp = comparison(op)) {
      next();
      return GuardTest{*cmp, std::move(lhs), sum()};
    }
    if (lhs.op == Expr::Op::Leaf) {
      if (auto* c = std::get_if<Const>(&lhs.leaf)) {
        Atom a{c->name, {}, t.loc};
        register_symbol(a);
        return BodyItem{std::move(a)};
      }
    }
    if (op.kind == Tok::Punct && op.text != "," && op.text != "." && op.text != "|" && op.text != "\\" &&
        op.text != "<=>" && op.text != "==>") {
      throw ParseError("unknown operator '" + op.text + "'", op.loc);
    }
    throw ParseError("expected a constraint", t.loc);
  }

  Term leaf_of(const Expr& e, SourceLoc loc) {
    if (e.op != Expr::Op::Leaf) throw ParseError("expected a variable or constant", loc);
    return e.leaf;
  }

  Atom compound() {
    const Token& name = next();
    Atom a{name.text, {}, name.loc};
    expect("(");
    for (;;) {
      a.args.push_back(term());
      if (accept(",")) continue;
      expect(")");
      break;
    }
    register_symbol(a);
    return a;
  }

  Term term() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Upper:
        next();
        return variable(t.text);
      case Tok::Lower:
        if (is_punct(peek(1), "(")) throw ParseError("compound terms are not supported as arguments", t.loc);
        next();
        return Const{t.text};
      case Tok::Int:
        next();
        return Int{integer(t.text, false, t.loc)};
      case Tok::Punct:
        if (t.text == "-" && peek(1).kind == Tok::Int) {
          next();
          const Token& n = next();
          return Int{integer(n.text, true, n.loc)};
        }
        break;
      case Tok::End:
        throw ParseError("unexpected end of input", t.loc);
    }
    throw ParseError("expected a term but found '" + t.text + "'", t.loc);
  }

  std::int64_t integer(const std::string& digits, bool negative, SourceLoc loc) {
    std::string s = negative ? "-" + digits : digits;
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) throw ParseError("integer out of range", loc);
    return v;
  }

  Expr sum() {
    Expr e = primary();
    while (accept("+")) e = Expr::binary(Expr::Op::Add, std::move(e), primary());
    return e;
  }

  Expr primary() {
    const Token& t = peek();
    if (is_punct(t, "(")) {
      next();
      Expr e = sum();
      expect(")");
      return e;
    }
    if (t.kind == Tok::Lower && t.text == "max" && is_punct(peek(1), "(")) {
      next();
      next();
      Expr a = sum();
      expect(",");
      Expr b = sum();
      expect(")");
      return Expr::binary(Expr::Op::Max, std::move(a), std::move(b));
    }
    return Expr::of(term());
  }

  Term variable(const std::string& name) {
    if (name == "_") return Var{next_var_++, "_"};
    auto [it, inserted] = vars_.try_emplace(name, next_var_);
    if (inserted) {
      ++next_var_;
      var_order_.emplace_back(name, it->second);
    }
    return Var{it->second, name};
  }

  void register_symbol(const Atom& a) {
    auto [it, inserted] = arity_.try_emplace(a.name, a.arity());
    if (inserted) {
      symbols_.push_back({a.name, a.arity()});
    } else if (it->second != a.arity()) {
      throw ParseError("arity mismatch: " + a.name + "/" + std::to_string(a.arity()) + " previously used as " +
                           a.name + "/" + std::to_string(it->second),
                       a.loc);
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int next_var_ = 0;
  std::map<std::string, int> vars_;
  std::vector<std::pair<std::string, int>> var_order_;
  std::map<std::string, std::size_t> arity_;
  std::vector<Symbol> symbols_;
  SourceLoc last_item_loc_;
};

}  // namespace

Program parse_program(std::string_view text) { return Parser(text).program(); }

Query parse_query(std::string_view text) { return Parser(text).query(); }

}  // namespace chr
