#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chr/ops.hpp"
#include "chr/programs.hpp"

namespace chr::verify {

enum class Check {
  Structural,  // parents/ranks equal the imperative oracle's state
  Partition,   // same-set relation equals the brute-force partition
  Counter,     // findNode firings equal the oracle's find steps, per op
  Invariant,   // forest, rank, compression, bind-once, operation-constraint and store audits
};

inline constexpr Check kAllChecks[] = {Check::Structural, Check::Partition, Check::Counter, Check::Invariant};

const char* to_string(Check c);

struct Divergence {
  Check check;
  std::size_t op_index;  // operation after which the check failed
  std::string detail;
};

struct SequenceReport {
  programs::Variant variant;
  std::size_t ops_checked = 0;
  std::uint64_t find_steps = 0;
  // First failure of each check, if any. Checking continues past failures.
  std::optional<Divergence> first[4];

  bool ok() const;
  bool ok(Check c) const { return !first[static_cast<int>(c)]; }
  const Divergence* earliest() const;
};

struct Options {
  bool swap_link_order = false;  // fault injection for the Rank program
  std::string source_override;   // fault injection: run this program instead
  StoreOptions store;
};

// Runs `ops` on a CHR session and the matching oracle (Basic with the naive
// algorithm, Rank with the optimized one) and compares after every op.
SequenceReport check_sequence(programs::Variant variant, const std::vector<Op>& ops, const Options& options = {});

// Shortest failing prefix, then greedily drops single operations (keeping
// the sequence well-formed) while `check` still fails.
std::vector<Op> shrink(programs::Variant variant, const std::vector<Op>& ops, Check check, const Options& options = {});

// True if every element is made exactly once before it is used.
bool well_formed(const std::vector<Op>& ops);

}  // namespace chr::verify
