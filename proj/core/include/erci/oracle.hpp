#pragma once

#include "erci/improviser.hpp"
#include "erci/sg_solver.hpp"

namespace erci {

struct OracleCaps {
  int max_env_policies = 4096;
  int max_ego_decision_nodes = 3;
  int max_ego_actions = 3;
};

/// Every deterministic env policy (node-indexed), in a fixed lexicographic
/// order. Throws TooLarge past the cap.
std::vector<DetPolicy> enumerate_env_policies(const CoreSG& core, int cap = 4096);

/// Componentwise minimum of (performance, entropy) over all enumerated env
/// policies. The minimum is taken by a literal loop over policies so it
/// independently checks the backward min passes.
Point oracle_guaranteed_point(const CoreSG& core, const PolicyTable& ego, int cap = 4096);

/// Inner approximation of the Pareto front: ego Markov policies enumerated on
/// a probability grid, mapped through oracle_guaranteed_point, reduced to the
/// non-dominated subset. Requires few ego decision nodes (see caps).
std::vector<Point> oracle_front_lower_bound(const CoreSG& core, double grid_step,
                                            const OracleCaps& caps = {});

/// Re-validates a verdict. Realizable witnesses are re-evaluated exactly
/// against every enumerated env policy (needs the improviser); unrealizable
/// scalarization witnesses are checked as
/// w_p * p + w_h * h < w_p * target.p + w_h * target.h. Unknown verdicts pass
/// vacuously.
bool check_witness(const CoreSG& core, const Verdict& verdict, const Improviser* improviser,
                   int cap = 4096);

}  // namespace erci
