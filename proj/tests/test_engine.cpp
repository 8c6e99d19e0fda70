#include <doctest.h>

#include <fstream>
#include <sstream>

#include "chr/engine.hpp"
#include "chr/parser.hpp"
#include "chr/programs.hpp"

using namespace chr;
using programs::Variant;

namespace {

std::string read(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string basic() { return std::string(programs::source(Variant::Basic)); }
std::string rank() { return std::string(programs::source(Variant::Rank)); }

using Lines = std::vector<std::string>;

std::uint64_t firings(const Engine& e, const Counters& c, std::string_view label) {
  for (std::size_t r = 0; r < e.program().rules.size(); ++r) {
    if (e.program().rules[r].label == label) return c.rule_firings[r];
  }
  return 0;
}

}  // namespace

TEST_SUITE("engine") {

TEST_CASE("make under both programs") {
  CHECK(run(basic(), "make(a).").store == Lines{"root(a)"});
  CHECK(run(rank(), "make(a).").store == Lines{"root(a,0)"});
}

TEST_CASE("true goal") {
  auto r = run(basic(), "true.");
  CHECK(r.status == RunStatus::Success);
  CHECK(r.store.empty());
  CHECK(r.counters.activations == 0);
}

TEST_CASE("basic union then find") {
  auto r = run(basic(), "make(a), make(b), union(a,b), find(b,R).");
  CHECK(r.store == Lines{"b ~> a", "root(a)"});
  REQUIRE(r.bindings.size() == 1);
  CHECK(r.bindings[0] == std::pair<std::string, std::string>{"R", "a"});
}

TEST_CASE("rank union, both argument orders") {
  CHECK(run(rank(), "make(a),make(b),union(a,b).").store == Lines{"b ~> a", "root(a,1)"});
  CHECK(run(rank(), "make(a),make(b),union(b,a).").store == Lines{"a ~> b", "root(b,1)"});
}

TEST_CASE("equal ranks: linkLeft wins by textual order") {
  Engine e(parse_program(rank()), EngineOptions{{}, true});
  REQUIRE(e.solve("make(a), make(b), union(a,b).") == RunStatus::Success);
  Counters c = e.counters();
  CHECK(firings(e, c, "linkLeft") == 1);
  CHECK(firings(e, c, "linkRight") == 0);
}

TEST_CASE("findRoot binds the placeholder and removes find") {
  Engine e(parse_program(rank()));
  std::vector<Engine::QueryVar> vars;
  REQUIRE(e.solve("make(a), find(a,R).", &vars) == RunStatus::Success);
  CHECK(e.symbols().format(e.deref(vars.at(0).var)) == "a");
  CHECK(e.store_lines() == Lines{"root(a,0)"});
  Counters c = e.counters();
  CHECK(firings(e, c, "findRoot") == 1);
  CHECK(firings(e, c, "findNode") == 0);
}

TEST_CASE("linkEq removes the link") {
  Engine e(parse_program(basic()));
  REQUIRE(e.solve("link(a,a).") == RunStatus::Success);
  CHECK(e.store_lines().empty());
  CHECK(firings(e, e.counters(), "linkEq") == 1);
}

TEST_CASE("path compression on a hand-built chain") {
  Engine e(parse_program(rank()), EngineOptions{{}, true});
  REQUIRE(e.solve("root(a,1), b ~> a, c ~> b.") == RunStatus::Success);
  Counters before = e.counters();
  std::vector<Engine::QueryVar> vars;
  REQUIRE(e.solve("find(c,R).", &vars) == RunStatus::Success);
  CHECK(e.symbols().format(e.deref(vars.at(0).var)) == "a");
  CHECK(e.store_lines() == Lines{"b ~> a", "c ~> a", "root(a,1)"});
  Counters after = e.counters();
  CHECK(firings(e, after, "findNode") - firings(e, before, "findNode") == 2);
  // The placeholder is bound before the compressed arrows are added.
  CHECK(after.wake_events == 0);
}

TEST_CASE("basic find leaves the chain alone") {
  auto r = run(basic(), "root(a), b ~> a, c ~> b, find(c,R).");
  CHECK(r.store == Lines{"b ~> a", "c ~> b", "root(a)"});
  CHECK(r.bindings.at(0).second == "a");
}

TEST_CASE("ground data constraint: one activation, one drop") {
  Engine e(parse_program(rank()));
  REQUIRE(e.solve("root(a,0).") == RunStatus::Success);
  Counters before = e.counters();
  REQUIRE(e.solve("b ~> a.") == RunStatus::Success);
  Counters after = e.counters();
  CHECK(after.activations - before.activations == 1);
  CHECK(after.drops - before.drops == 1);
  CHECK(after.total_firings() == before.total_firings());
  SymbolId arrow = e.symbols().intern_symbol("~>", 2);
  CHECK(after.partner_probes - before.partner_probes <= e.program().occurrences_of(arrow).size());
}

TEST_CASE("find on an element never made stays in the store") {
  auto r = run(basic(), "find(a,R).");
  CHECK(r.status == RunStatus::Success);
  CHECK(r.store == Lines{"find(a,V0)"});
  CHECK(r.bindings.at(0).second == "V0");
}

TEST_CASE("partner plans") {
  SymbolTable symbols;
  auto cp = compile(parse_program(rank()), symbols);
  SymbolId link = symbols.intern_symbol("link", 2);
  const CompiledRule* link_left = nullptr;
  const Occurrence* occ = nullptr;
  for (const auto& o : cp.occurrences_of(link)) {
    if (cp.rules[o.rule].label == "linkLeft") {
      occ = &o;
      link_left = &cp.rules[o.rule];
    }
  }
  REQUIRE(occ);
  REQUIRE(occ->plan.size() == 2);
  SymbolId root = symbols.intern_symbol("root", 2);
  CHECK(link_left->heads[occ->plan[0].head].symbol == root);
  CHECK(occ->plan[0].lookup_pos == 0);
  CHECK(link_left->heads[occ->plan[1].head].symbol == root);
  CHECK(occ->plan[1].lookup_pos == 0);
  CHECK(occ->plan[0].head != occ->plan[1].head);

  SymbolTable s2;
  auto cb = compile(parse_program(basic()), s2);
  SymbolId find = s2.intern_symbol("find", 2);
  const auto& find_occs = cb.occurrences_of(find);
  REQUIRE(find_occs.size() == 2);
  CHECK(cb.rules[find_occs[0].rule].label == "findNode");
  REQUIRE(find_occs[0].plan.size() == 1);
  CHECK(find_occs[0].plan[0].lookup_pos == 0);
  SymbolId make = s2.intern_symbol("make", 1);
  CHECK(cb.occurrences_of(make).at(0).plan.empty());
}

TEST_CASE("occurrences are in textual order") {
  SymbolTable symbols;
  auto cp = compile(parse_program(rank()), symbols);
  SymbolId root = symbols.intern_symbol("root", 2);
  Lines labels;
  for (const auto& o : cp.occurrences_of(root)) labels.push_back(cp.rules[o.rule].label + "/" + std::to_string(o.head));
  // findRoot, linkLeft (two root heads), linkRight (two root heads).
  CHECK(labels.size() == 5);
  CHECK(labels.front().rfind("findRoot", 0) == 0);
  for (std::size_t i = 1; i < labels.size(); ++i) CHECK(labels[i - 1] < labels[i]);
}

TEST_CASE("unreachable partner is a compile error") {
  SymbolTable symbols;
  CHECK_THROWS_AS(compile(parse_program("r @ a(X), b(Y) <=> true."), symbols), CompileError);
}

TEST_CASE("wake on bind") {
  const char* program = "p @ q(X), r(X) <=> s(X).";
  Engine e(parse_program(program), EngineOptions{{}, true});
  REQUIRE(e.solve("q(A), r(b), A = b.") == RunStatus::Success);
  CHECK(e.store_lines() == Lines{"s(b)"});
  Counters c = e.counters();
  CHECK(c.wake_events == 1);
  CHECK(c.rule_firings[0] == 1);
  const auto& t = e.trace();
  auto bind = std::find(t.begin(), t.end(), "BIND V0 := b");
  REQUIRE(bind != t.end());
  REQUIRE(bind + 2 < t.end());
  CHECK(*(bind + 1) == "WAKE #0");
  CHECK(*(bind + 2) == "ACT q/1#0");
}

TEST_CASE("wake order is ascending id") {
  const char* program = "p @ w(X) <=> X == b | seen(X).";
  Engine e(parse_program(program), EngineOptions{{}, true});
  REQUIRE(e.solve("w(A), w(A), w(c), A = b.") == RunStatus::Success);
  Lines wakes;
  for (const auto& line : e.trace()) {
    if (line.rfind("WAKE", 0) == 0) wakes.push_back(line);
  }
  CHECK(wakes == Lines{"WAKE #0", "WAKE #1"});
  CHECK(e.store_lines() == Lines{"seen(b)", "seen(b)", "w(c)"});
}

TEST_CASE("binding a variable in no constraint wakes nothing") {
  auto r = run("p @ a(X) <=> true.", "X = b.");
  CHECK(r.counters.wake_events == 0);
  CHECK(r.counters.bindings == 1);
}

TEST_CASE("is evaluates and binds") {
  auto r = run("", "X is max(1,2), Y is X+3.");
  CHECK(r.bindings == std::vector<std::pair<std::string, std::string>>{{"X", "2"}, {"Y", "5"}});
}

TEST_CASE("instantiation fault") {
  CHECK_THROWS_AS(run("", "X is Y + 1."), RuntimeError);
}

TEST_CASE("= on distinct constants fails") {
  CHECK(run("", "a = b.").status == RunStatus::Failure);
  CHECK(run("", "a = a.").status == RunStatus::Success);
  CHECK(run("", "X = a, X = a.").status == RunStatus::Success);
  CHECK(run("", "X = a, X = b.").status == RunStatus::Failure);
}

TEST_CASE("aliasing two variables is refused") {
  CHECK_THROWS_AS(run("", "X = Y."), RuntimeError);
}

TEST_CASE("guards") {
  const char* program =
      "ge @ t(X,Y) <=> X >= Y | out(ge).\n"
      "lt @ t(X,Y) <=> X < Y | out(lt).\n";
  CHECK(run(program, "t(1,0).").store == Lines{"out(ge)"});
  CHECK(run(program, "t(0,0).").store == Lines{"out(ge)"});
  CHECK(run(program, "t(0,1).").store == Lines{"out(lt)"});
  // A nonground guard does not apply.
  CHECK(run(program, "t(A,1).").store == Lines{"t(V0,1)"});
}

TEST_CASE("propagation history") {
  std::string program = read(CHR_SOURCE_DIR "/programs/transitive.chr");
  Engine e(parse_program(program));
  REQUIRE(e.solve("edge(a,b), edge(b,c), edge(c,d).") == RunStatus::Success);
  Lines want = {"edge(a,b)", "edge(b,c)", "edge(c,d)", "path(a,b)", "path(a,c)",
                "path(a,d)", "path(b,c)", "path(b,d)", "path(c,d)"};
  CHECK(e.store_lines() == want);
  Counters c = e.counters();
  CHECK(c.rule_firings[0] == 3);
  CHECK(c.rule_firings[1] == 3);
}

TEST_CASE("propagation fires once per id tuple") {
  Engine e(parse_program("p @ a(X) ==> b(X)."));
  REQUIRE(e.solve("a(1), a(1).") == RunStatus::Success);
  CHECK(e.store_lines() == Lines{"a(1)", "a(1)", "b(1)", "b(1)"});
}

TEST_CASE("transition accounting") {
  for (const char* q : {"make(a), make(b), make(c), union(a,b), union(c,a), find(c,R).",
                        "make(a), make(b), union(a,b), union(b,a), find(b,X), find(a,Y)."}) {
    for (const auto& text : {basic(), rank()}) {
      auto r = run(text, q);
      CHECK(r.counters.activations == r.counters.drops + r.counters.active_removals);
      CHECK(r.counters.inserts - r.counters.deletes == r.store.size());
    }
  }
}

TEST_CASE("runs are deterministic") {
  const char* q = "make(a), make(b), make(c), make(d), union(a,b), union(c,d), union(b,d), find(d,R).";
  for (const auto& text : {basic(), rank()}) {
    auto x = run(text, q, EngineOptions{{}, true});
    auto y = run(text, q, EngineOptions{{}, true});
    CHECK(x.trace == y.trace);
    CHECK(x.store == y.store);
    CHECK(x.bindings == y.bindings);
    CHECK(x.counters.total_firings() == y.counters.total_firings());
  }
}

TEST_CASE("store modes agree") {
  const char* q = "make(a), make(b), make(c), make(d), union(a,b), union(c,d), union(b,d), find(d,R).";
  auto reference = run(rank(), q, EngineOptions{{StoreMode::Doubling, 0}, true});
  for (auto mode : {StoreMode::Presized, StoreMode::Poor}) {
    auto r = run(rank(), q, EngineOptions{{mode, 8}, true});
    CHECK(r.trace == reference.trace);
    CHECK(r.store == reference.store);
  }
}

TEST_CASE("dump shows ids") {
  Engine e(parse_program(rank()));
  REQUIRE(e.solve("make(a), make(b), union(a,b).") == RunStatus::Success);
  auto d = e.dump();
  REQUIRE(d.size() == 2);
  for (const auto& line : d) CHECK(line.find('#') != std::string::npos);
}

TEST_CASE("snapshot rejects nonground constraints") {
  Engine e(parse_program(basic()));
  REQUIRE(e.solve("find(a,R).") == RunStatus::Success);
  CHECK_THROWS_AS(e.snapshot(), NonGroundError);
  Engine f(parse_program(basic()));
  CHECK(f.snapshot().empty());
}

}  // TEST_SUITE
