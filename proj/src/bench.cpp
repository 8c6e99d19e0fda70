#include "chr/bench.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cstdio>
#include <future>
#include <sstream>
#include <stdexcept>

#include "chr/oracle.hpp"
#include "chr/programs.hpp"

namespace chr::bench {

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

const char* to_string(WorkloadKind k) { return k == WorkloadKind::Random ? "random" : "contrived"; }

const char* to_string(Runner r) {
  switch (r) {
    case Runner::Basic: return "basic";
    case Runner::Rank: return "rank";
    case Runner::NaiveOracle: return "naive";
    case Runner::RankOracle: return "optimized";
  }
  return "?";
}

namespace {

void add_makes(std::vector<Op>& ops, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) ops.push_back({Op::Kind::Make, i, 0});
}

void add_finds(std::vector<Op>& ops, std::size_t n, SplitMix64& rng) {
  for (std::size_t i = 0; i < n; ++i) ops.push_back({Op::Kind::Find, rng.next() % n, 0});
}

}  // namespace

WorkloadSpec gen_random_workload(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("random workload needs N >= 1");
  WorkloadSpec spec{WorkloadKind::Random, n, seed, {}};
  spec.ops.reserve(3 * n);
  SplitMix64 rng(seed);
  add_makes(spec.ops, n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t a = rng.next() % n;
    std::size_t b = rng.next() % n;
    spec.ops.push_back({Op::Kind::Union, a, b});
  }
  add_finds(spec.ops, n, rng);
  return spec;
}

WorkloadSpec gen_contrived_workload(std::size_t n, bool trailing_finds, std::uint64_t seed) {
  if (!std::has_single_bit(n)) throw std::invalid_argument("contrived workload needs N to be a power of two");
  WorkloadSpec spec{WorkloadKind::Contrived, n, seed, {}};
  spec.ops.reserve(3 * n);
  add_makes(spec.ops, n);
  for (std::size_t step = 1; step < n; step *= 2) {
    for (std::size_t i = 0; i + step < n; i += 2 * step) spec.ops.push_back({Op::Kind::Union, i, i + step});
  }
  if (trailing_finds) {
    SplitMix64 rng(seed);
    add_finds(spec.ops, n, rng);
  }
  return spec;
}

namespace {

using Clock = std::chrono::steady_clock;

oracle::Partition partition_from_roots(const std::vector<std::size_t>& root) {
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t x = 0; x < root.size(); ++x) groups[root[x]].push_back(x);
  oracle::Partition out;
  for (auto& [r, members] : groups) out.push_back(std::move(members));
  std::sort(out.begin(), out.end());
  return out;
}

void check_partition(const WorkloadSpec& spec, const std::vector<std::size_t>& root, Runner runner) {
  if (partition_from_roots(root) != oracle::bf_partition(spec.ops)) {
    throw std::logic_error(std::string(to_string(runner)) + ": final partition differs from brute force");
  }
}

Metrics run_chr(Runner runner, const WorkloadSpec& spec, const RunOptions& options) {
  programs::SessionOptions so;
  so.store = options.store;
  if (so.store.mode == StoreMode::Presized && options.presize_auto) so.store.presize = std::bit_ceil(2 * spec.n);
  programs::UfSession session(runner == Runner::Basic ? programs::Variant::Basic : programs::Variant::Rank, so);

  std::vector<Value> elem(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) elem[i] = session.element(element_name(i));

  auto start = Clock::now();
  for (const Op& op : spec.ops) {
    switch (op.kind) {
      case Op::Kind::Make: session.make(elem[op.x]); break;
      case Op::Kind::Union: session.unite(elem[op.x], elem[op.y]); break;
      case Op::Kind::Find: (void)session.find(elem[op.x]); break;
    }
  }
  auto stop = Clock::now();

  const Engine& e = session.engine();
  const Counters& c = e.counters();
  Metrics m;
  m.runner = runner;
  m.kind = spec.kind;
  m.n = spec.n;
  m.m = spec.ops.size();
  m.find_steps = session.total_find_steps();
  m.firings = c.total_firings();
  for (std::size_t r = 0; r < c.rule_firings.size(); ++r) m.firings_by_rule[e.program().rules[r].label] = c.rule_firings[r];
  m.wakes = c.wake_events;
  m.probes = c.partner_probes;
  m.inserts = c.inserts;
  m.deletes = c.deletes;
  if (options.timing) m.wall_ns = static_cast<std::uint64_t>(std::chrono::nanoseconds(stop - start).count());

  if (spec.n <= options.partition_check_limit) {
    auto pm = session.parents_and_ranks();
    std::vector<std::size_t> parent(spec.n), root(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) {
      auto it = pm.find(elem[i]);
      if (it == pm.end()) throw std::logic_error("element missing from the store");
      auto p = std::find(elem.begin(), elem.end(), it->second.parent);
      parent[i] = static_cast<std::size_t>(p - elem.begin());
    }
    for (std::size_t i = 0; i < spec.n; ++i) {
      std::size_t r = i;
      for (std::size_t hops = 0; parent[r] != r; ++hops) {
        if (hops > spec.n) throw std::logic_error("cycle in the decoded forest");
        r = parent[r];
      }
      root[i] = r;
    }
    check_partition(spec, root, runner);
  }
  return m;
}

template <class UF>
Metrics run_oracle(Runner runner, const WorkloadSpec& spec, const RunOptions& options) {
  UF uf;
  auto start = Clock::now();
  for (const Op& op : spec.ops) {
    switch (op.kind) {
      case Op::Kind::Make: uf.make(op.x); break;
      case Op::Kind::Union: uf.unite(op.x, op.y); break;
      case Op::Kind::Find: (void)uf.find(op.x); break;
    }
  }
  auto stop = Clock::now();
  Metrics m;
  m.runner = runner;
  m.kind = spec.kind;
  m.n = spec.n;
  m.m = spec.ops.size();
  m.find_steps = uf.find_steps();
  if (options.timing) m.wall_ns = static_cast<std::uint64_t>(std::chrono::nanoseconds(stop - start).count());
  if (spec.n <= options.partition_check_limit) {
    std::vector<std::size_t> root(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) root[i] = uf.find(i);
    check_partition(spec, root, runner);
  }
  return m;
}

}  // namespace

Metrics run_workload(Runner runner, const WorkloadSpec& spec, const RunOptions& options) {
  switch (runner) {
    case Runner::Basic:
    case Runner::Rank: return run_chr(runner, spec, options);
    case Runner::NaiveOracle: return run_oracle<oracle::NaiveUF<std::size_t>>(runner, spec, options);
    case Runner::RankOracle: return run_oracle<oracle::RankUF<std::size_t>>(runner, spec, options);
  }
  throw std::invalid_argument("unknown runner");
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s = buf;
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  if (s == "-0") s = "0";
  return s;
}

ScalingReport scaling_report(Runner runner, WorkloadKind kind, const std::vector<std::size_t>& sizes,
                             const ScalingOptions& options) {
  if (!std::is_sorted(sizes.begin(), sizes.end())) throw std::invalid_argument("sizes must be ascending");
  ScalingReport report{runner, kind, {}};
  const std::size_t reps = std::max<std::size_t>(options.repetitions, 1);

  struct Task {
    std::size_t n;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (std::size_t n : sizes) {
    for (std::size_t r = 0; r < reps; ++r) tasks.push_back({n, options.seed + r});
  }
  std::vector<Metrics> results(tasks.size());

  auto run_task = [&](std::size_t t) {
    const Task& task = tasks[t];
    WorkloadSpec spec = kind == WorkloadKind::Random
                            ? gen_random_workload(task.n, task.seed)
                            : gen_contrived_workload(task.n, options.trailing_finds, task.seed);
    results[t] = run_workload(runner, spec, options.run);
  };

  unsigned jobs = std::max(1u, options.jobs);
  if (jobs == 1) {
    for (std::size_t t = 0; t < tasks.size(); ++t) run_task(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::future<void>> workers;
    for (unsigned w = 0; w < jobs; ++w) {
      workers.push_back(std::async(std::launch::async, [&] {
        for (std::size_t t; (t = next.fetch_add(1)) < tasks.size();) run_task(t);
      }));
    }
    for (auto& f : workers) f.get();
  }

  for (std::size_t i = 0; i < sizes.size(); ++i) {
    ReportRow row;
    row.n = sizes[i];
    for (std::size_t r = 0; r < reps; ++r) {
      const Metrics& m = results[i * reps + r];
      row.m += static_cast<double>(m.m);
      row.find_steps += static_cast<double>(m.find_steps);
      row.firings += static_cast<double>(m.firings);
      row.wakes += static_cast<double>(m.wakes);
      row.probes += static_cast<double>(m.probes);
      row.wall_ns += static_cast<double>(m.wall_ns);
    }
    auto d = static_cast<double>(reps);
    row.m /= d;
    row.find_steps /= d;
    row.firings /= d;
    row.wakes /= d;
    row.probes /= d;
    row.wall_ns /= d;
    if (!report.rows.empty()) {
      const ReportRow& prev = report.rows.back();
      if (prev.find_steps > 0) row.find_steps_ratio = row.find_steps / prev.find_steps;
      if (prev.probes > 0) row.probes_ratio = row.probes / prev.probes;
    }
    report.rows.push_back(row);
  }
  return report;
}

std::string ScalingReport::csv() const {
  std::ostringstream out;
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << to_string(runner) << ',' << to_string(kind) << ',' << r.n << ',' << format_number(r.m) << ','
        << format_number(r.find_steps) << ',' << format_number(r.firings) << ',' << format_number(r.wakes) << ','
        << format_number(r.probes) << ',' << format_number(r.wall_ns) << '\n';
  }
  return out.str();
}

std::string ScalingReport::table() const {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-10s %12s %14s %8s %14s %8s\n", "N", "M", "find_steps", "ratio", "probes", "ratio");
  out << to_string(runner) << " / " << to_string(kind) << '\n' << line;
  auto ratio = [](const std::optional<double>& r) { return r ? format_number(*r) : std::string("-"); };
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-10zu %12s %14s %8s %14s %8s\n", r.n, format_number(r.m).c_str(),
                  format_number(r.find_steps).c_str(), ratio(r.find_steps_ratio).c_str(),
                  format_number(r.probes).c_str(), ratio(r.probes_ratio).c_str());
    out << line;
  }
  return out.str();
}

}  // namespace chr::bench
