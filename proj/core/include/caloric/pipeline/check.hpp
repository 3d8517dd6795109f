#pragma once

#include <string>
#include <vector>

#include "caloric/target/target.hpp"

namespace caloric::pipeline {

struct CheckResult {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

// Invariant suite for one target on an n x n grid of side 2 pi: target
// identities at seeded random points, Parseval, heat energy monotonicity, the
// three gauge identities on a small bump, SL energy drift and time reversal.
std::vector<CheckResult> check_invariants(target::TargetKind kind, int n);

}  // namespace caloric::pipeline
