#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "chr/engine.hpp"

namespace chr::programs {

// Basic: no path compression, plain linking. Rank: path compression plus
// union-by-rank.
enum class Variant { Basic, Rank };

const char* to_string(Variant v);

// Canonical source text, identical to programs/ufd_basic.chr and
// programs/ufd_rank.chr.
std::string_view source(Variant v);

// Rank program with linkLeft and linkRight swapped, so equal-rank ties go to
// the second argument. Only for exercising the verifier.
std::string swapped_link_source();

class DuplicateMake : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class UnknownElement : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class ForestViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SessionOptions {
  StoreOptions store;
  bool trace = false;
  // Record at every rule firing whether more than one operation constraint
  // (make/union/find/link) is alive, or a live one is not the active one.
  bool audit_operations = false;
  bool swap_link_order = false;
  // Replaces the program text; symbols must keep the variant's arities.
  std::string source_override;
};

struct ParentEntry {
  Value parent;
  std::optional<std::int64_t> rank;  // roots only, Rank variant only
  bool operator==(const ParentEntry&) const = default;
};

using ParentMap = std::map<Value, ParentEntry>;

// Typed union-find API over a CHR engine running one of the two programs.
class UfSession {
 public:
  explicit UfSession(Variant variant, SessionOptions options = {});

  Value element(std::string_view name) { return engine_.atom(name); }
  Value element(std::int64_t v) const { return Value::integer(v); }
  std::string name(const Value& v) const { return engine_.symbols().format(v); }

  void make(const Value& x);
  void unite(const Value& x, const Value& y);
  Value find(const Value& x);

  // Decodes the quiescent store: roots map to themselves. Throws
  // ForestViolation on a store that is not a forest encoding (operation
  // constraints left, an element with two parents, nonground arguments).
  ParentMap parents_and_ranks() const;

  bool made(const Value& x) const { return made_.contains(x); }
  std::size_t size() const { return made_.size(); }

  // findNode firings during the most recent operation.
  std::uint64_t last_find_steps() const { return last_find_steps_; }
  std::uint64_t total_find_steps() const;

  const std::vector<std::string>& operation_violations() const { return violations_; }

  Variant variant() const { return variant_; }
  Engine& engine() { return engine_; }
  const Engine& engine() const { return engine_; }

 private:
  void run(SymbolId symbol, std::vector<Value> args);
  void require_made(const Value& x) const;

  Variant variant_;
  Engine engine_;
  SymbolId make_, union_, find_, link_, root_, arrow_;
  std::size_t find_node_rule_;
  std::set<Value> made_;
  std::uint64_t last_find_steps_ = 0;
  std::vector<std::string> violations_;
};

}  // namespace chr::programs
