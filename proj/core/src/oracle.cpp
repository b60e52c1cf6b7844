#include "erci/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "erci/errors.hpp"

namespace erci {

std::vector<DetPolicy> enumerate_env_policies(const CoreSG& core, int cap) {
  std::vector<int> env_nodes;
  long long count = 1;
  for (int n = 0; n < core.size(); ++n) {
    const CoreNode& node = core.nodes[n];
    if (node.owner == Owner::env && node.edges.size() > 1) {
      env_nodes.push_back(n);
      count *= static_cast<long long>(node.edges.size());
      if (count > cap)
        fail("TooLarge", "env policy space exceeds the cap of " + std::to_string(cap));
    }
  }
  std::vector<DetPolicy> out;
  out.reserve(static_cast<std::size_t>(count));
  DetPolicy base(core.nodes.size(), -1);
  for (int n = 0; n < core.size(); ++n)
    if (core.nodes[n].owner == Owner::env && !core.nodes[n].edges.empty()) base[n] = 0;
  // Odometer over the nodes with real choices, most significant first.
  std::vector<int> digits(env_nodes.size(), 0);
  while (true) {
    DetPolicy policy = base;
    for (std::size_t i = 0; i < env_nodes.size(); ++i) policy[env_nodes[i]] = digits[i];
    out.push_back(std::move(policy));
    int pos = static_cast<int>(env_nodes.size()) - 1;
    while (pos >= 0) {
      if (++digits[pos] < static_cast<int>(core.nodes[env_nodes[pos]].edges.size())) break;
      digits[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  return out;
}

Point oracle_guaranteed_point(const CoreSG& core, const PolicyTable& ego, int cap) {
  Point worst{kInfinity, kInfinity};
  for (const DetPolicy& env : enumerate_env_policies(core, cap)) {
    PolicyTable env_table = det_to_table(core, env, Owner::env);
    worst.p = std::min(worst.p, performance(core, ego, env_table));
    worst.h = std::min(worst.h, causal_entropy(core, ego, env_table));
  }
  return worst;
}

namespace {

/// Probability grid over the simplex of k actions with the given step.
void simplex_grid(int k, int steps, std::vector<std::vector<double>>& out) {
  std::vector<int> counts(k, 0);
  std::function<void(int, int)> rec = [&](int idx, int remaining) {
    if (idx == k - 1) {
      counts[idx] = remaining;
      std::vector<double> dist(k);
      for (int i = 0; i < k; ++i) dist[i] = static_cast<double>(counts[i]) / steps;
      out.push_back(std::move(dist));
      return;
    }
    for (int c = 0; c <= remaining; ++c) {
      counts[idx] = c;
      rec(idx + 1, remaining - c);
    }
  };
  rec(0, steps);
}

}  // namespace

std::vector<Point> oracle_front_lower_bound(const CoreSG& core, double grid_step,
                                            const OracleCaps& caps) {
  if (!(grid_step > 0 && grid_step <= 1)) fail("InvalidArgument", "grid step must be in (0, 1]");
  std::vector<int> decision_nodes;
  for (int n = 0; n < core.size(); ++n) {
    const CoreNode& node = core.nodes[n];
    if (node.owner == Owner::ego && node.edges.size() > 1) {
      if (static_cast<int>(node.edges.size()) > caps.max_ego_actions)
        fail("TooLarge", "ego node with too many actions for front enumeration");
      decision_nodes.push_back(n);
    }
  }
  if (static_cast<int>(decision_nodes.size()) > caps.max_ego_decision_nodes)
    fail("TooLarge", "too many ego decision nodes for front enumeration");

  int steps = std::max(1, static_cast<int>(std::lround(1.0 / grid_step)));
  std::vector<std::vector<std::vector<double>>> per_node;
  for (int n : decision_nodes) {
    std::vector<std::vector<double>> dists;
    simplex_grid(static_cast<int>(core.nodes[n].edges.size()), steps, dists);
    per_node.push_back(std::move(dists));
  }

  PolicyTable ego = uniform_policy(core, Owner::ego);  // single-action nodes stay Dirac
  std::vector<Point> points;
  std::vector<std::size_t> pick(per_node.size(), 0);
  while (true) {
    for (std::size_t i = 0; i < decision_nodes.size(); ++i)
      ego[decision_nodes[i]] = per_node[i][pick[i]];
    points.push_back(oracle_guaranteed_point(core, ego, caps.max_env_policies));
    int pos = static_cast<int>(pick.size()) - 1;
    while (pos >= 0) {
      if (++pick[pos] < per_node[pos].size()) break;
      pick[pos] = 0;
      --pos;
    }
    if (pos < 0 || pick.empty()) break;
  }

  // Non-dominated subset (maximal points under the product order).
  std::vector<Point> front;
  for (const Point& x : points) {
    bool dominated = false;
    for (const Point& y : points)
      if ((y.p > x.p + 1e-12 && y.h >= x.h - 1e-12) ||
          (y.h > x.h + 1e-12 && y.p >= x.p - 1e-12))
        dominated = true;
    if (!dominated) front.push_back(x);
  }
  std::sort(front.begin(), front.end(), [](const Point& a, const Point& b) { return a.h < b.h; });
  return front;
}

bool check_witness(const CoreSG& core, const Verdict& verdict, const Improviser* improviser,
                   int cap) {
  switch (verdict.kind) {
    case Feasibility::unknown:
      return true;
    case Feasibility::unrealizable: {
      const Point& x = verdict.dominating;
      double lhs = verdict.weight_p * x.p + verdict.weight_h * x.h;
      double rhs = verdict.weight_p * verdict.target.p + verdict.weight_h * verdict.target.h;
      return lhs < rhs;
    }
    case Feasibility::realizable: {
      if (improviser == nullptr) return false;
      Point claimed = verdict.witness_point();
      if (!dominates(verdict.target, claimed)) return false;
      // The policy must guarantee the claimed point against every env policy,
      // up to the producing solver's certified p band. Exact evaluation when
      // the adversary space is enumerable, simulation bounds otherwise.
      double p_slack = verdict.p_error_band + 1e-9;
      double h_slack = 1e-6;
      try {
        for (const DetPolicy& env : enumerate_env_policies(core, cap)) {
          Point achieved = exact_improviser_eval(*improviser, env);
          if (achieved.p < claimed.p - p_slack) return false;
          if (achieved.h < claimed.h - h_slack) return false;
        }
        return true;
      } catch (const Error& err) {
        if (err.code() != "TooLarge") throw;
      }
      for (EnvMode mode : {EnvMode::worst_case_performance, EnvMode::worst_case_entropy}) {
        EnvSpec spec;
        spec.mode = mode;
        SimulationReport r = simulate(*improviser, spec, 20000, 0x5eed);
        double half = 0.5 * (r.p_hi - r.p_lo);
        if (r.p_hat < claimed.p - verdict.p_error_band - 3 * half) return false;
        if (r.h_hat < claimed.h - 0.02) return false;
      }
      return true;
    }
  }
  return false;
}

}  // namespace erci
