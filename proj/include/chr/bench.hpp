#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chr/ops.hpp"
#include "chr/store.hpp"

namespace chr::bench {

// splitmix64.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();

 private:
  std::uint64_t state_;
};

enum class WorkloadKind { Random, Contrived };

const char* to_string(WorkloadKind k);

struct WorkloadSpec {
  WorkloadKind kind = WorkloadKind::Random;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::vector<Op> ops;
};

// N makes, N unions of random pairs, N finds of random elements.
WorkloadSpec gen_random_workload(std::size_t n, std::uint64_t seed);

// N makes, then rounds r = 1..log2 N of union(e_i, e_{i+2^(r-1)}) for every
// i = 1 (mod 2^r); optionally N finds of random elements drawn from `seed`.
// Throws std::invalid_argument unless N is a power of two.
WorkloadSpec gen_contrived_workload(std::size_t n, bool trailing_finds = false, std::uint64_t seed = 1);

enum class Runner { Basic, Rank, NaiveOracle, RankOracle };

const char* to_string(Runner r);

struct Metrics {
  Runner runner = Runner::Basic;
  WorkloadKind kind = WorkloadKind::Random;
  std::size_t n = 0;
  std::size_t m = 0;  // total operations
  std::uint64_t find_steps = 0;
  std::uint64_t firings = 0;
  std::map<std::string, std::uint64_t> firings_by_rule;
  std::uint64_t wakes = 0;
  std::uint64_t probes = 0;  // partner_probes
  std::uint64_t inserts = 0;
  std::uint64_t deletes = 0;
  std::uint64_t wall_ns = 0;  // 0 unless timing was requested
};

struct RunOptions {
  StoreOptions store;
  bool presize_auto = true;  // Presized mode: bit_ceil(2N) slots instead of store.presize
  bool timing = false;
  // Final partition is compared with the brute-force partition when N is at
  // most this; throws std::logic_error on mismatch.
  std::size_t partition_check_limit = 512;
};

Metrics run_workload(Runner runner, const WorkloadSpec& spec, const RunOptions& options = {});

struct ReportRow {
  std::size_t n = 0;
  double m = 0, find_steps = 0, firings = 0, wakes = 0, probes = 0, wall_ns = 0;
  // metric(this row) / metric(previous row); absent on the first row.
  std::optional<double> find_steps_ratio, probes_ratio;
};

struct ScalingOptions {
  RunOptions run;
  std::size_t repetitions = 1;
  std::uint64_t seed = 1;  // repetition r uses seed + r
  bool trailing_finds = true;  // Contrived only
  unsigned jobs = 1;
};

struct ScalingReport {
  Runner runner = Runner::Basic;
  WorkloadKind kind = WorkloadKind::Random;
  std::vector<ReportRow> rows;

  static constexpr const char* kCsvHeader = "variant,workload,N,M,find_steps,firings,wakes,probes,wall_ns";
  std::string csv() const;
  std::string table() const;
};

// Sizes must be ascending. Runs may execute on `jobs` threads; results are
// merged in size order.
ScalingReport scaling_report(Runner runner, WorkloadKind kind, const std::vector<std::size_t>& sizes,
                             const ScalingOptions& options = {});

// Shortest decimal form, at most three fractional digits.
std::string format_number(double v);

}  // namespace chr::bench
