#include <doctest.h>

#include <fstream>
#include <sstream>

#include "chr/parser.hpp"
#include "chr/programs.hpp"

using namespace chr;
using namespace chr::programs;

namespace {

std::string read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> labels(const ast::Program& p) {
  std::vector<std::string> out;
  for (const auto& r : p.rules) out.push_back(r.label());
  return out;
}

}  // namespace

TEST_SUITE("programs") {

TEST_CASE("program files match the embedded text and its pretty print") {
  std::string basic_file = read(CHR_SOURCE_DIR "/programs/ufd_basic.chr");
  std::string rank_file = read(CHR_SOURCE_DIR "/programs/ufd_rank.chr");
  CHECK(basic_file == source(Variant::Basic));
  CHECK(rank_file == source(Variant::Rank));
  CHECK(ast::to_string(parse_program(basic_file)) == basic_file);
  CHECK(ast::to_string(parse_program(rank_file)) == rank_file);
}

TEST_CASE("rule names and order") {
  CHECK(labels(parse_program(source(Variant::Basic))) ==
        std::vector<std::string>{"make", "union", "findNode", "findRoot", "linkEq", "link"});
  CHECK(labels(parse_program(source(Variant::Rank))) ==
        std::vector<std::string>{"make", "union", "findNode", "findRoot", "linkEq", "linkLeft", "linkRight"});
  CHECK(labels(parse_program(swapped_link_source())) ==
        std::vector<std::string>{"make", "union", "findNode", "findRoot", "linkEq", "linkRight", "linkLeft"});
}

TEST_CASE("rule kinds") {
  auto b = parse_program(source(Variant::Basic));
  CHECK(b.rules[2].kind() == ast::RuleKind::Simpagation);  // findNode keeps X ~> PX
  auto r = parse_program(source(Variant::Rank));
  CHECK(r.rules[2].kind() == ast::RuleKind::Simplification);
  CHECK(r.rules[5].removed.size() == 3);
}

TEST_CASE("make") {
  UfSession rank(Variant::Rank);
  rank.make(rank.element("a"));
  CHECK(rank.engine().snapshot() == Snapshot{"root(a,0)"});
  CHECK_THROWS_AS(rank.make(rank.element("a")), DuplicateMake);

  UfSession basic(Variant::Basic);
  basic.make(basic.element("a"));
  CHECK(basic.engine().snapshot() == Snapshot{"root(a)"});
}

TEST_CASE("union") {
  UfSession rank(Variant::Rank);
  Value a = rank.element("a"), b = rank.element("b");
  rank.make(a);
  rank.make(b);
  rank.unite(a, b);
  CHECK(rank.engine().snapshot() == Snapshot{"b ~> a", "root(a,1)"});
  rank.unite(a, a);
  CHECK(rank.engine().snapshot() == Snapshot{"b ~> a", "root(a,1)"});
  CHECK_THROWS_AS(rank.unite(a, rank.element("zz")), UnknownElement);

  UfSession basic(Variant::Basic);
  Value x = basic.element("a"), y = basic.element("b");
  basic.make(x);
  basic.make(y);
  basic.unite(x, y);
  CHECK(basic.engine().snapshot() == Snapshot{"b ~> a", "root(a)"});
}

TEST_CASE("find") {
  UfSession rank(Variant::Rank);
  Value a = rank.element("a"), b = rank.element("b"), c = rank.element("c"), d = rank.element("d");
  for (Value v : {a, b, c, d}) rank.make(v);
  rank.unite(a, b);
  rank.unite(c, d);
  rank.unite(a, c);
  CHECK(rank.engine().snapshot() == Snapshot{"b ~> a", "c ~> a", "d ~> c", "root(a,2)"});
  CHECK(rank.find(d) == a);
  CHECK(rank.last_find_steps() == 2);
  CHECK(rank.engine().snapshot() == Snapshot{"b ~> a", "c ~> a", "d ~> a", "root(a,2)"});
  CHECK(rank.find(a) == a);
  CHECK(rank.last_find_steps() == 0);
  CHECK_THROWS_AS(rank.find(rank.element("q")), UnknownElement);

  UfSession basic(Variant::Basic);
  Value x = basic.element("a"), y = basic.element("b"), z = basic.element("c"), w = basic.element("d");
  for (Value v : {x, y, z, w}) basic.make(v);
  basic.unite(x, y);
  basic.unite(z, w);
  basic.unite(x, z);
  auto before = basic.engine().snapshot();
  CHECK(basic.find(w) == x);
  CHECK(basic.last_find_steps() == 2);
  CHECK(basic.engine().snapshot() == before);
}

TEST_CASE("integer elements") {
  UfSession s(Variant::Rank);
  Value one = s.element(1), two = s.element(2);
  s.make(one);
  s.make(two);
  s.unite(two, one);
  CHECK(s.find(one) == two);
}

TEST_CASE("parents and ranks") {
  UfSession s(Variant::Rank);
  CHECK(s.parents_and_ranks().empty());
  Value a = s.element("a"), b = s.element("b");
  s.make(a);
  s.make(b);
  s.unite(a, b);
  ParentMap want{{a, {a, 1}}, {b, {a, std::nullopt}}};
  CHECK(s.parents_and_ranks() == want);

  // b ~> a and b ~> c at once.
  s.engine().solve("b ~> c.");
  CHECK_THROWS_AS(s.parents_and_ranks(), ForestViolation);
}

TEST_CASE("operation audit stays quiet") {
  SessionOptions o;
  o.audit_operations = true;
  UfSession s(Variant::Rank, o);
  std::vector<Value> e;
  for (int i = 0; i < 16; ++i) {
    e.push_back(s.element(i));
    s.make(e.back());
  }
  for (int i = 0; i + 1 < 16; ++i) s.unite(e[static_cast<std::size_t>(i)], e[static_cast<std::size_t>(15 - i)]);
  for (auto v : e) (void)s.find(v);
  CHECK(s.operation_violations().empty());
  CHECK(s.engine().counters().wake_events == 0);
}

}  // TEST_SUITE
