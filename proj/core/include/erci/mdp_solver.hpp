#pragma once

#include <vector>

#include "erci/core_sg.hpp"
#include "erci/verdict.hpp"

namespace erci {

/// Soft Bellman solution at one rationality. sigma(a|s) = exp(Q(s,a) - V(s));
/// V is the log-sum-exp of Q at ego nodes and the plain expectation at the
/// single-action env/chance nodes; terminals carry V(top) = lambda, V(bot) = 0.
struct RationalityPolicy {
  double lambda = 0.0;
  std::vector<double> V;                 // per node
  std::vector<std::vector<double>> Q;    // per node, per edge
  PolicyTable sigma;                     // ego rows only
};

/// Throws NotAnMDP unless every env node has exactly one action. lambda must
/// be finite and >= 0; the lambda = infinity endpoint is hard_max_policy.
RationalityPolicy smooth_bellman(const CoreSG& mdp, double lambda);

/// The rationality = infinity endpoint: standard hard-max backward pass with
/// the ego policy uniform over actions whose Q ties the maximum within 1e-9.
/// V here is in performance units (V(top) = 1).
RationalityPolicy hard_max_policy(const CoreSG& mdp);

/// (performance, entropy) of sigma_lambda; accepts lambda = infinity.
Point rationality_point(const CoreSG& mdp, double lambda);

/// Max guaranteed performance p* and the entropy of the uniform-over-argmax
/// optimal policy (the h of the front's performance endpoint).
std::pair<Point, RationalityPolicy> limit_point_max_performance(const CoreSG& mdp);

struct MdpExploreConfig {
  double rat_resolution = 1e-6;  // binary search stops below this bracket width
  double lambda_max = 100.0;     // doubling cap; beyond it the infinity endpoint is used
};

/// Three-stage search over rationality: endpoints, doubling from 1, binary
/// search in the final bracket. Produces a realizable witness (single point
/// or adjacent pair), an unrealizable scalarization witness with weights
/// (lambda, 1), or unknown with the residual bracket. Appends every sampled
/// (lambda, h, p) to `front` when given.
Verdict pareto_explore_mdp(const CoreSG& mdp, const Target& target,
                           const MdpExploreConfig& config = {},
                           std::vector<FrontSample>* front = nullptr);

/// Resolves a regret target against the front endpoints:
/// p = eps*(p_star - p_floor) + p_floor, h = delta*(h_star - h_floor) + h_floor.
Point resolve_target(const Target& target, const Point& max_entropy_end,
                     const Point& max_performance_end);

}  // namespace erci
