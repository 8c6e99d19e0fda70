#include <doctest.h>

#include <fstream>

#include "chr/bench.hpp"
#include "chr/oracle.hpp"

using namespace chr;
using namespace chr::bench;

namespace {

std::vector<std::string> texts(const std::vector<Op>& ops) {
  std::vector<std::string> out;
  for (const auto& op : ops) out.push_back(to_string(op));
  return out;
}

std::vector<Op> union_ops(const WorkloadSpec& s) {
  std::vector<Op> out;
  for (const auto& op : s.ops) {
    if (op.kind == Op::Kind::Union) out.push_back(op);
  }
  return out;
}

}  // namespace

TEST_SUITE("bench") {

TEST_CASE("splitmix64 reference values") {
  // First outputs for seed 0 and seed 1234567.
  SplitMix64 a(0);
  CHECK(a.next() == 0xE220A8397B1DCDAFULL);
  CHECK(a.next() == 0x6E789E6AA1B965F4ULL);
  SplitMix64 b(1234567);
  CHECK(b.next() == 6457827717110365317ULL);
  CHECK(b.next() == 3203168211198807973ULL);
}

TEST_CASE("random workload") {
  auto one = gen_random_workload(1, 99);
  CHECK(texts(one.ops) == std::vector<std::string>{"make(e1)", "union(e1,e1)", "find(e1)"});
  CHECK(gen_random_workload(50, 7).ops == gen_random_workload(50, 7).ops);
  CHECK(gen_random_workload(50, 7).ops != gen_random_workload(50, 8).ops);
  CHECK_THROWS(gen_random_workload(0, 1));
}

TEST_CASE("random workload golden file") {
  std::ifstream in(CHR_SOURCE_DIR "/tests/data/random_n4_seed42.txt");
  REQUIRE(in);
  std::vector<std::string> golden;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) golden.push_back(line);
  }
  CHECK(texts(gen_random_workload(4, 42).ops) == golden);
}

TEST_CASE("contrived workload") {
  CHECK(texts(union_ops(gen_contrived_workload(4))) ==
        std::vector<std::string>{"union(e1,e2)", "union(e3,e4)", "union(e1,e3)"});
  CHECK(union_ops(gen_contrived_workload(2)).size() == 1);
  CHECK(union_ops(gen_contrived_workload(8)).size() == 7);
  CHECK(gen_contrived_workload(8).ops.size() == 15);
  CHECK(gen_contrived_workload(8, true, 1).ops.size() == 23);
  CHECK_THROWS_AS(gen_contrived_workload(6), std::invalid_argument);
  CHECK_THROWS_AS(gen_contrived_workload(0), std::invalid_argument);

  oracle::RankUF<std::size_t> uf;
  for (const auto& op : gen_contrived_workload(8).ops) {
    if (op.kind == Op::Kind::Make) uf.make(op.x);
    if (op.kind == Op::Kind::Union) uf.unite(op.x, op.y);
  }
  CHECK(uf.find(7) == 0);
  CHECK(uf.rank(0) == 3);
}

TEST_CASE("CHR find steps equal the oracle's") {
  auto spec = gen_contrived_workload(8);
  CHECK(run_workload(Runner::Rank, spec).find_steps == run_workload(Runner::RankOracle, spec).find_steps);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto r = gen_random_workload(300, seed);
    CHECK(run_workload(Runner::Rank, r).find_steps == run_workload(Runner::RankOracle, r).find_steps);
    CHECK(run_workload(Runner::Basic, r).find_steps == run_workload(Runner::NaiveOracle, r).find_steps);
  }
}

TEST_CASE("metrics for the one-element workload") {
  auto m = run_workload(Runner::Basic, gen_random_workload(1, 5));
  CHECK(m.n == 1);
  CHECK(m.m == 3);
  CHECK(m.find_steps == 0);
  // make, union, findRoot twice (union's finds), linkEq, findRoot.
  CHECK(m.firings == 6);
  CHECK(m.firings_by_rule.at("findRoot") == 3);
  CHECK(m.firings_by_rule.at("linkEq") == 1);
  CHECK(m.wakes == 0);
  CHECK(m.wall_ns == 0);
}

TEST_CASE("store modes change probes, not steps") {
  auto spec = gen_contrived_workload(256, true, 1);
  RunOptions poor, doubling, presized;
  poor.store.mode = StoreMode::Poor;
  presized.store.mode = StoreMode::Presized;
  auto p = run_workload(Runner::Rank, spec, poor);
  auto d = run_workload(Runner::Rank, spec, doubling);
  auto s = run_workload(Runner::Rank, spec, presized);
  CHECK(p.find_steps == d.find_steps);
  CHECK(s.find_steps == d.find_steps);
  CHECK(s.probes == d.probes);
  CHECK(p.probes > 10 * d.probes);
}

TEST_CASE("scaling report") {
  ScalingOptions o;
  o.repetitions = 2;
  auto r = scaling_report(Runner::Rank, WorkloadKind::Contrived, {64, 128, 256}, o);
  REQUIRE(r.rows.size() == 3);
  CHECK_FALSE(r.rows[0].find_steps_ratio.has_value());
  CHECK(r.rows[1].find_steps_ratio.has_value());
  auto csv = r.csv();
  CHECK(csv.rfind("variant,workload,N,M,find_steps,firings,wakes,probes,wall_ns\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  CHECK(csv.find("\nrank,contrived,64,") != std::string::npos);

  o.jobs = 3;
  CHECK(scaling_report(Runner::Rank, WorkloadKind::Contrived, {64, 128, 256}, o).csv() == csv);

  CHECK(scaling_report(Runner::Basic, WorkloadKind::Random, {}, o).rows.empty());
  CHECK_THROWS(scaling_report(Runner::Basic, WorkloadKind::Random, {8, 4}, o));
}

TEST_CASE("number formatting") {
  CHECK(format_number(3) == "3");
  CHECK(format_number(2.5) == "2.5");
  CHECK(format_number(1.0 / 3) == "0.333");
  CHECK(format_number(0) == "0");
}

}  // TEST_SUITE
