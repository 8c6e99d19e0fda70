#include "chr/oracle.hpp"

#include <regex>

namespace chr {

std::string element_name(std::size_t index) { return "e" + std::to_string(index + 1); }

std::string to_string(const Op& op) {
  switch (op.kind) {
    case Op::Kind::Make: return "make(" + element_name(op.x) + ")";
    case Op::Kind::Union: return "union(" + element_name(op.x) + "," + element_name(op.y) + ")";
    case Op::Kind::Find: return "find(" + element_name(op.x) + ")";
  }
  return {};
}

Op parse_op(const std::string& text) {
  static const std::regex re(R"(^(make|find)\(e(\d+)\)$|^union\(e(\d+),e(\d+)\)$)");
  std::smatch m;
  if (!std::regex_match(text, m, re)) throw std::invalid_argument("bad operation: " + text);
  auto idx = [](const std::string& s) {
    auto v = std::stoull(s);
    if (v == 0) throw std::invalid_argument("element numbers start at 1");
    return static_cast<std::size_t>(v - 1);
  };
  if (m[1].matched) return Op{m[1] == "make" ? Op::Kind::Make : Op::Kind::Find, idx(m[2]), 0};
  return Op{Op::Kind::Union, idx(m[3]), idx(m[4])};
}

}  // namespace chr

namespace chr::oracle {

std::size_t BruteForcePartition::set_of(std::size_t x) const {
  for (std::size_t i = 0; i < sets_.size(); ++i) {
    if (std::find(sets_[i].begin(), sets_[i].end(), x) != sets_[i].end()) return i;
  }
  throw UnknownElement("unknown element " + element_name(x));
}

void BruteForcePartition::make(std::size_t x) {
  for (const auto& s : sets_) {
    if (std::find(s.begin(), s.end(), x) != s.end()) throw std::invalid_argument("element made twice");
  }
  sets_.push_back({x});
}

void BruteForcePartition::unite(std::size_t x, std::size_t y) {
  std::size_t a = set_of(x);
  std::size_t b = set_of(y);
  if (a == b) return;
  sets_[a].insert(sets_[a].end(), sets_[b].begin(), sets_[b].end());
  sets_.erase(sets_.begin() + static_cast<std::ptrdiff_t>(b));
}

std::size_t BruteForcePartition::label(std::size_t x) const {
  const auto& s = sets_[set_of(x)];
  return *std::min_element(s.begin(), s.end());
}

std::vector<std::vector<std::size_t>> BruteForcePartition::sets() const {
  auto out = sets_;
  for (auto& s : out) std::sort(s.begin(), s.end());
  std::sort(out.begin(), out.end());
  return out;
}

Partition bf_partition(const std::vector<Op>& ops) {
  BruteForcePartition p;
  for (const auto& op : ops) {
    switch (op.kind) {
      case Op::Kind::Make: p.make(op.x); break;
      case Op::Kind::Union: p.unite(op.x, op.y); break;
      case Op::Kind::Find: (void)p.label(op.x); break;
    }
  }
  return p.sets();
}

}  // namespace chr::oracle
