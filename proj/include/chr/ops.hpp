#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace chr {

// One union-find operation over dense element indices 0..N-1. Element i is
// named e<i+1> when it reaches the CHR engine.
struct Op {
  enum class Kind { Make, Union, Find };
  Kind kind = Kind::Make;
  std::size_t x = 0;
  std::size_t y = 0;

  bool operator==(const Op&) const = default;
};

std::string element_name(std::size_t index);

// "make(e1)", "union(e1,e2)", "find(e1)".
std::string to_string(const Op& op);

// Parses the format produced by to_string; throws std::invalid_argument.
Op parse_op(const std::string& text);

}  // namespace chr
