// chruf: run CHR programs, verify the union-find programs against their
// oracles, and benchmark them.
#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "chr/bench.hpp"
#include "chr/engine.hpp"
#include "chr/parser.hpp"
#include "chr/programs.hpp"
#include "chr/verify.hpp"

namespace {

using namespace chr;

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::map<std::string, StoreMode> kStoreModes = {
    {"presized", StoreMode::Presized}, {"doubling", StoreMode::Doubling}, {"poor", StoreMode::Poor}};

// --store, with CHR_STORE_PRESIZE selecting the pre-sized store when no mode
// was given and setting its slot count.
struct StoreFlags {
  std::string mode;

  StoreOptions resolve(bool* presize_from_env = nullptr) const {
    StoreOptions o;
    const char* env = std::getenv("CHR_STORE_PRESIZE");
    std::size_t presize = 0;
    if (env && *env) {
      char* end = nullptr;
      unsigned long long v = std::strtoull(env, &end, 10);
      if (*end != '\0' || v == 0) throw UsageError("CHR_STORE_PRESIZE must be a positive integer");
      presize = static_cast<std::size_t>(v);
    }
    if (!mode.empty()) {
      o.mode = kStoreModes.at(mode);
    } else if (presize) {
      o.mode = StoreMode::Presized;
    }
    if (presize) o.presize = presize;
    if (presize_from_env) *presize_from_env = presize != 0;
    return o;
  }
};

void add_store_option(CLI::App* cmd, StoreFlags& flags) {
  cmd->add_option("--store", flags.mode, "Store indexing: presized, doubling (default) or poor")
      ->check(CLI::IsMember({"presized", "doubling", "poor"}));
}

// ---- run / trace ----------------------------------------------------------

struct RunFlags {
  std::string variant;
  std::string program;
  std::string query;
  std::string query_file;
  bool trace = false;
  bool dump = false;
  bool stats = false;
  StoreFlags store;
};

void print_counters(const Engine& e) {
  Counters c = e.counters();
  std::cout << "activations " << c.activations << "\n"
            << "drops " << c.drops << "\n"
            << "default_transitions " << c.default_transitions << "\n"
            << "wake_events " << c.wake_events << "\n"
            << "guard_checks " << c.guard_checks << "\n"
            << "partner_probes " << c.partner_probes << "\n"
            << "bindings " << c.bindings << "\n"
            << "inserts " << c.inserts << "\n"
            << "deletes " << c.deletes << "\n";
  for (std::size_t r = 0; r < c.rule_firings.size(); ++r) {
    std::cout << "firings " << e.program().rules[r].label << " " << c.rule_firings[r] << "\n";
  }
}

int cmd_run(const RunFlags& f) {
  std::string program_text;
  bool builtin = false;
  if (!f.variant.empty()) {
    program_text = std::string(programs::source(f.variant == "basic" ? programs::Variant::Basic : programs::Variant::Rank));
    builtin = true;
  } else {
    program_text = read_file(f.program);
  }
  std::string query_text = f.query_file.empty() ? f.query : read_file(f.query_file);

  ast::Program program;
  ast::Query query;
  try {
    program = parse_program(program_text);
    query = parse_query(query_text);
  } catch (const ParseError& e) {
    std::cerr << (f.query_file.empty() && builtin ? "query" : "input") << ":" << e.what() << "\n";
    return kUsage;
  }

  EngineOptions eo;
  eo.store = f.store.resolve();
  eo.trace = f.trace;
  std::unique_ptr<Engine> engine;
  try {
    engine = std::make_unique<Engine>(program, eo);
  } catch (const CompileError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }

  std::vector<Engine::QueryVar> vars;
  RunStatus status = RunStatus::Success;
  std::string error;
  try {
    status = engine->solve(query, &vars);
  } catch (const std::exception& e) {
    error = e.what();
  }

  if (f.trace) {
    for (const auto& line : engine->trace()) std::cout << line << "\n";
    std::cout << "--\n";
  }
  if (!error.empty()) {
    std::cerr << "error: " << error << "\n";
    return kFailure;
  }
  if (status == RunStatus::Failure) {
    std::cout << "false.\n";
    return kFailure;
  }
  for (const auto& line : f.dump ? engine->dump() : engine->store_lines()) std::cout << line << "\n";
  for (const auto& qv : vars) std::cout << qv.name << " = " << engine->symbols().format(engine->deref(qv.var)) << "\n";
  if (f.stats) print_counters(*engine);

  if (builtin) {
    for (const char* op : {"make", "union", "find", "link"}) {
      std::size_t arity = std::string_view(op) == "make" ? 1 : 2;
      auto sym = engine->symbols().find_symbol(op, arity);
      if (sym >= 0 && engine->store().live_count(static_cast<SymbolId>(sym)) > 0) {
        std::cerr << "error: " << op << "/" << arity
                  << " constraint left in the store (operation on an element that was never made?)\n";
        return kFailure;
      }
    }
  }
  return kOk;
}

// ---- parse ----------------------------------------------------------------

int cmd_parse(const std::string& path) {
  try {
    ast::Program p = parse_program(read_file(path));
    std::cout << ast::to_string(p);
    for (const auto& w : validate_program(p)) std::cerr << "warning: " << w.message << "\n";
    return kOk;
  } catch (const ParseError& e) {
    std::cerr << path << ":" << e.what() << "\n";
    return kUsage;
  }
}

// ---- verify ---------------------------------------------------------------

struct VerifyFlags {
  std::size_t n = 256;
  std::size_t seeds = 100;
  std::size_t first_seed = 1;
  std::size_t ops = 0;
  bool inject_swap_link = false;
  StoreFlags store;
};

void print_ops(const char* label, const std::vector<Op>& ops) {
  std::cout << label << " (" << ops.size() << " ops):";
  for (const auto& op : ops) std::cout << ' ' << to_string(op);
  std::cout << "\n";
}

int cmd_verify(const VerifyFlags& f) {
  verify::Options opt;
  opt.store = f.store.resolve();
  opt.swap_link_order = f.inject_swap_link;
  bool all_ok = true;
  for (auto variant : {programs::Variant::Basic, programs::Variant::Rank}) {
    const char* oracle = variant == programs::Variant::Basic ? "naive" : "optimized";
    std::size_t total_ops = 0;
    std::uint64_t steps = 0;
    bool variant_ok = true;
    for (std::size_t s = f.first_seed; s < f.first_seed + f.seeds; ++s) {
      auto ops = bench::gen_random_workload(f.n, s).ops;
      if (f.ops && ops.size() > f.ops) ops.resize(f.ops);
      auto report = verify::check_sequence(variant, ops, opt);
      total_ops += report.ops_checked;
      steps += report.find_steps;
      if (report.ok()) continue;

      variant_ok = false;
      const verify::Divergence* d = report.earliest();
      std::cout << programs::to_string(variant) << " vs " << oracle << ": divergence at seed " << s << ", op "
                << d->op_index + 1 << " (" << to_string(ops[d->op_index]) << ")\n";
      for (verify::Check c : verify::kAllChecks) {
        const auto& fd = report.first[static_cast<int>(c)];
        std::cout << "  " << verify::to_string(c) << ": ";
        if (fd) {
          std::cout << "FAIL at op " << fd->op_index + 1 << ": " << fd->detail << "\n";
        } else {
          std::cout << "ok\n";
        }
      }
      print_ops("  prefix", std::vector<Op>(ops.begin(), ops.begin() + static_cast<std::ptrdiff_t>(d->op_index + 1)));
      print_ops("  minimized", verify::shrink(variant, ops, d->check, opt));
      break;
    }
    if (variant_ok) {
      std::cout << programs::to_string(variant) << " vs " << oracle << ": " << f.seeds << " seeds, " << total_ops
                << " ops, " << steps << " find steps, all checks passed\n";
    }
    all_ok = all_ok && variant_ok;
  }
  return all_ok ? kOk : kFailure;
}

// ---- bench ----------------------------------------------------------------

struct BenchFlags {
  std::string variant = "rank";
  std::string workload = "contrived";
  std::vector<std::size_t> sizes;
  std::size_t reps = 1;
  std::uint64_t seed = 1;
  std::string csv;
  bool no_finds = false;
  bool timing = false;
  unsigned jobs = 1;
  StoreFlags store;
};

int cmd_bench(BenchFlags f) {
  static const std::map<std::string, bench::Runner> runners = {{"basic", bench::Runner::Basic},
                                                               {"rank", bench::Runner::Rank},
                                                               {"naive", bench::Runner::NaiveOracle},
                                                               {"optimized", bench::Runner::RankOracle}};
  auto kind = f.workload == "random" ? bench::WorkloadKind::Random : bench::WorkloadKind::Contrived;

  std::vector<std::size_t> sizes = f.sizes;
  std::sort(sizes.begin(), sizes.end());
  if (std::adjacent_find(sizes.begin(), sizes.end()) != sizes.end()) {
    std::cerr << "warning: duplicate sizes ignored\n";
    sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  }
  if (kind == bench::WorkloadKind::Contrived) {
    for (std::size_t n : sizes) {
      if (!std::has_single_bit(n)) throw UsageError("contrived workload sizes must be powers of two");
    }
  }

  bench::ScalingOptions opt;
  bool env_presize = false;
  opt.run.store = f.store.resolve(&env_presize);
  opt.run.presize_auto = !env_presize;
  opt.run.timing = f.timing;
  opt.repetitions = f.reps;
  opt.seed = f.seed;
  opt.trailing_finds = !f.no_finds;
  opt.jobs = f.jobs;

  std::ofstream csv;
  if (!f.csv.empty()) {
    csv.open(f.csv, std::ios::binary);
    if (!csv) {
      std::cerr << "error: cannot write " << f.csv << "\n";
      return kFailure;
    }
  }
  auto report = bench::scaling_report(runners.at(f.variant), kind, sizes, opt);
  std::cout << report.table();
  if (csv.is_open()) {
    csv << report.csv();
    if (!csv.flush()) {
      std::cerr << "error: cannot write " << f.csv << "\n";
      return kFailure;
    }
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CHR union-find engine"};
  app.require_subcommand(1);

  RunFlags run_flags;
  auto add_run = [&](CLI::App* cmd) {
    auto* variant = cmd->add_option("--variant", run_flags.variant, "Builtin program: basic or rank")
                        ->check(CLI::IsMember({"basic", "rank"}));
    auto* program = cmd->add_option("--program", run_flags.program, "Program file");
    variant->excludes(program);
    auto* query = cmd->add_option("--query", run_flags.query, "Goal, e.g. \"make(a), make(b), union(a,b).\"");
    auto* query_file = cmd->add_option("--query-file", run_flags.query_file, "File holding the goal");
    query->excludes(query_file);
    cmd->add_flag("--dump", run_flags.dump, "Print the store with constraint ids");
    cmd->add_flag("--stats", run_flags.stats, "Print engine counters");
    add_store_option(cmd, run_flags.store);
    cmd->callback([=] {
      if (variant->count() + program->count() != 1) throw CLI::ValidationError("give exactly one of --variant, --program");
      if (query->count() + query_file->count() != 1) throw CLI::ValidationError("give exactly one of --query, --query-file");
    });
  };
  auto* run = app.add_subcommand("run", "Run a goal to quiescence and print the store");
  add_run(run);
  run->add_flag("--trace", run_flags.trace, "Print the transition trace first");
  auto* trace = app.add_subcommand("trace", "As run, with the transition trace");
  add_run(trace);

  std::string parse_path;
  auto* parse = app.add_subcommand("parse", "Parse a program and print it back");
  parse->add_option("program", parse_path, "Program file")->required();

  VerifyFlags verify_flags;
  auto* verify = app.add_subcommand("verify", "Compare both programs with their oracles on random workloads");
  verify->add_option("--n", verify_flags.n, "Elements per workload")->check(CLI::PositiveNumber);
  verify->add_option("--seeds", verify_flags.seeds, "Number of seeds")->check(CLI::PositiveNumber);
  verify->add_option("--first-seed", verify_flags.first_seed, "First seed");
  verify->add_option("--ops", verify_flags.ops, "Truncate each workload to this many operations (0: all)");
  verify->add_flag("--inject-swap-link", verify_flags.inject_swap_link)->group("");
  add_store_option(verify, verify_flags.store);

  BenchFlags bench_flags;
  auto* bench = app.add_subcommand("bench", "Run a workload at several sizes and report scaling");
  bench->add_option("--variant", bench_flags.variant, "basic, rank, naive or optimized")
      ->check(CLI::IsMember({"basic", "rank", "naive", "optimized"}));
  bench->add_option("--workload", bench_flags.workload, "random or contrived")
      ->check(CLI::IsMember({"random", "contrived"}));
  bench->add_option("--sizes", bench_flags.sizes, "Comma-separated element counts")
      ->delimiter(',')
      ->required()
      ->check(CLI::PositiveNumber);
  bench->add_option("--reps", bench_flags.reps, "Repetitions per size (seed, seed+1, ...)")->check(CLI::PositiveNumber);
  bench->add_option("--seed", bench_flags.seed, "First seed");
  bench->add_option("--csv", bench_flags.csv, "Write CSV here");
  bench->add_flag("--no-finds", bench_flags.no_finds, "Contrived workload without the trailing finds");
  bench->add_flag("--timing", bench_flags.timing, "Record wall time (output is then not reproducible)");
  bench->add_option("--jobs", bench_flags.jobs, "Worker threads")->check(CLI::PositiveNumber);
  add_store_option(bench, bench_flags.store);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*run) return cmd_run(run_flags);
    if (*trace) {
      run_flags.trace = true;
      return cmd_run(run_flags);
    }
    if (*parse) return cmd_parse(parse_path);
    if (*verify) return cmd_verify(verify_flags);
    if (*bench) return cmd_bench(bench_flags);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}
