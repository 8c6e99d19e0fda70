#pragma once

#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace chr::testing {

struct Output {
  int code = -1;
  std::string out;
};

// Runs chruf with `args` through the shell; stderr is discarded. `env` is
// prepended as shell variable assignments.
inline Output chruf(const std::string& args, const std::string& env = "") {
  std::string cmd = env + " " + std::string(CHRUF_PATH) + " " + args + " 2>/dev/null";
  Output o;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return o;
  char buf[4096];
  for (std::size_t n; (n = fread(buf, 1, sizeof buf, p)) > 0;) o.out.append(buf, n);
  int status = pclose(p);
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return o;
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace chr::testing
