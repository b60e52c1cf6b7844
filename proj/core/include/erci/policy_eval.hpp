#pragma once

#include <vector>

#include "erci/core_sg.hpp"

namespace erci {

/// Performance probability and causal entropy (nats) of a policy pair.
struct Point {
  double p = 0.0;
  double h = 0.0;
};

/// true iff x is componentwise below y (x "no better than" y in both
/// coordinates), i.e. x.p <= y.p and x.h <= y.h.
inline bool dominates(const Point& x, const Point& y) { return x.p <= y.p && x.h <= y.h; }

/// w*x + (1-w)*y, componentwise. Requires w in [0, 1].
Point mix_points(const Point& x, const Point& y, double w);

/// Markov policy for one player: a distribution over edge indices per node.
/// Entries for nodes the player does not own (or terminals) are ignored.
using PolicyTable = std::vector<std::vector<double>>;

/// Deterministic policy: chosen edge index per node (-1 where not owned).
using DetPolicy = std::vector<int>;

PolicyTable uniform_policy(const CoreSG& core, Owner who);
PolicyTable det_to_table(const CoreSG& core, const DetPolicy& choice, Owner who);

/// Validates support/probability-sum of a policy for its owner; throws
/// InvalidPolicy on violations.
void check_policy(const CoreSG& core, const PolicyTable& policy, Owner who);

/// Node-indexed backward value tables; entry [n] is the value from node n.
std::vector<double> performance_table(const CoreSG& core, const PolicyTable& ego,
                                      const PolicyTable& env);
std::vector<double> entropy_table(const CoreSG& core, const PolicyTable& ego,
                                  const PolicyTable& env);

/// Probability that a path ends in the top terminal.
double performance(const CoreSG& core, const PolicyTable& ego, const PolicyTable& env);

/// Causal entropy of ego's actions, in nats. Ego nodes add their local
/// entropy; env and chance only average.
double causal_entropy(const CoreSG& core, const PolicyTable& ego, const PolicyTable& env);

struct GuaranteedPoint {
  Point point;
  DetPolicy env_min_performance;  // deterministic minimizer of the p coordinate
  DetPolicy env_min_entropy;      // deterministic minimizer of the h coordinate
};

/// Componentwise worst case over env policies for a fixed ego policy,
/// computed by two independent backward min passes (env may use different
/// counter-policies against p and against h).
GuaranteedPoint guaranteed_point(const CoreSG& core, const PolicyTable& ego);

}  // namespace erci
