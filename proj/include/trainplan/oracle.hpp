#pragma once

#include "trainplan/discrete.hpp"

namespace trainplan::oracle {

struct OracleBudget {
  long long max_nodes = 10'000'000;  // cap on game-tree leaves expanded
};

struct OracleResult {
  double value = 0.0;
  long long leaf_count = 0;
};

// Exhaustive min-max over the full finite game tree, tracking exact
// continuous states (no grid, no interpolation). Independent ground truth
// for the dynamic-programming solver: it agrees bit-for-bit only on
// instances whose reachable states are grid nodes, and otherwise bounds the
// DP's interpolation error. stages = 0 yields 0 (empty game).
OracleResult exhaustive_value(const DiscreteProblem& problem,
                              const OracleBudget& budget = {});

}  // namespace trainplan::oracle
