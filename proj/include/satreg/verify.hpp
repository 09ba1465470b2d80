#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "satreg/kernels.hpp"

namespace satreg {

struct CheckResult {
  std::string suite;
  std::string name;
  bool passed = false;
  double value = 0.0;  // measured quantity
  double limit = 0.0;  // threshold it is compared with
  std::string detail;
};

struct VerifyOptions {
  /// Adds 1 to one entry of every computed Pi before the residual checks.
  bool corrupt_pi = false;
  unsigned seed = 20240501;
  Exec exec = Exec::Parallel;
};

/// saturation, signals, state_space, regulator, pde, simulator.
const std::vector<std::string>& verify_suite_names();

/// Runs one suite, or every suite for "all". Throws InvalidArgument for an
/// unknown name.
std::vector<CheckResult> run_verify(const std::string& suite, const VerifyOptions& opts = {});

/// One tab-separated line: PASS|FAIL, suite, name, value=..., limit=..., detail.
void print_check(std::ostream& out, const CheckResult& r);

}  // namespace satreg
