#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace chr {

// Engine-level argument value: an interned atom, an integer, or a logic
// variable reference.
struct Value {
  enum class Kind : std::uint8_t { Var, Atom, Int };
  Kind kind = Kind::Int;
  std::int64_t raw = 0;

  static constexpr Value var(std::int64_t id) { return {Kind::Var, id}; }
  static constexpr Value atom(std::int64_t id) { return {Kind::Atom, id}; }
  static constexpr Value integer(std::int64_t v) { return {Kind::Int, v}; }

  constexpr bool is_var() const { return kind == Kind::Var; }
  constexpr bool ground() const { return kind != Kind::Var; }

  constexpr bool operator==(const Value&) const = default;
  constexpr auto operator<=>(const Value&) const = default;
};

struct ValueHash {
  std::size_t operator()(const Value& v) const noexcept {
    return std::hash<std::int64_t>{}(v.raw) * 3 + static_cast<std::size_t>(v.kind);
  }
};

using SymbolId = std::uint32_t;

// Interns atom names and constraint symbols (name/arity) for one engine
// session.
class SymbolTable {
 public:
  std::int64_t intern_atom(std::string_view name);
  // -1 if never interned.
  std::int64_t find_atom(std::string_view name) const;
  const std::string& atom_name(std::int64_t id) const { return atoms_[static_cast<std::size_t>(id)]; }

  SymbolId intern_symbol(std::string_view name, std::size_t arity);
  // -1 if absent.
  std::int64_t find_symbol(std::string_view name, std::size_t arity) const;
  const std::string& symbol_name(SymbolId s) const { return symbols_[s].name; }
  std::size_t arity(SymbolId s) const { return symbols_[s].arity; }
  std::size_t symbol_count() const { return symbols_.size(); }

  // "root(a,1)", "b ~> a"; unbound variables print as V<id>.
  std::string format(SymbolId s, const std::vector<Value>& args) const;
  std::string format(const Value& v) const;

 private:
  struct Sym {
    std::string name;
    std::size_t arity;
  };
  std::vector<std::string> atoms_;
  std::unordered_map<std::string, std::int64_t> atom_ids_;
  std::vector<Sym> symbols_;
  std::unordered_map<std::string, SymbolId> symbol_ids_;  // keyed by "name/arity"
};

}  // namespace chr
