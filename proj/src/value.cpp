#include "chr/value.hpp"

namespace chr {

namespace {
std::string symbol_key(std::string_view name, std::size_t arity) {
  return std::string(name) + "/" + std::to_string(arity);
}
}  // namespace

std::int64_t SymbolTable::intern_atom(std::string_view name) {
  auto [it, inserted] = atom_ids_.try_emplace(std::string(name), static_cast<std::int64_t>(atoms_.size()));
  if (inserted) atoms_.emplace_back(name);
  return it->second;
}

std::int64_t SymbolTable::find_atom(std::string_view name) const {
  auto it = atom_ids_.find(std::string(name));
  return it == atom_ids_.end() ? -1 : it->second;
}

SymbolId SymbolTable::intern_symbol(std::string_view name, std::size_t arity) {
  auto [it, inserted] = symbol_ids_.try_emplace(symbol_key(name, arity), static_cast<SymbolId>(symbols_.size()));
  if (inserted) symbols_.push_back({std::string(name), arity});
  return it->second;
}

std::int64_t SymbolTable::find_symbol(std::string_view name, std::size_t arity) const {
  auto it = symbol_ids_.find(symbol_key(name, arity));
  return it == symbol_ids_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

std::string SymbolTable::format(const Value& v) const {
  switch (v.kind) {
    case Value::Kind::Var: return "V" + std::to_string(v.raw);
    case Value::Kind::Atom: return atom_name(v.raw);
    case Value::Kind::Int: return std::to_string(v.raw);
  }
  return {};
}

std::string SymbolTable::format(SymbolId s, const std::vector<Value>& args) const {
  const auto& name = symbol_name(s);
  if (name == "~>" && args.size() == 2) return format(args[0]) + " ~> " + format(args[1]);
  if (args.empty()) return name;
  std::string out = name + "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ",";
    out += format(args[i]);
  }
  return out + ")";
}

}  // namespace chr
