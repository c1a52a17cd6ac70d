#pragma once

// Fast self-contained consistency battery (a few seconds, no configuration):
// exercises every module against closed-form values and cross-implementation
// agreement.  The CLI `selftest` subcommand prints one line per check.

#include <string>
#include <vector>

namespace permlaw::selftest {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;  // measured vs expected, for the console line
};

std::vector<CheckResult> run_all();

}  // namespace permlaw::selftest
