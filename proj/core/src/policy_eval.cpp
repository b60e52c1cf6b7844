#include "erci/policy_eval.hpp"

#include <cmath>
#include <limits>

#include "erci/errors.hpp"

namespace erci {

Point mix_points(const Point& x, const Point& y, double w) {
  if (w < 0.0 || w > 1.0) fail("InvalidWeight", "mixing weight must be in [0, 1]");
  return Point{w * x.p + (1 - w) * y.p, w * x.h + (1 - w) * y.h};
}

PolicyTable uniform_policy(const CoreSG& core, Owner who) {
  PolicyTable table(core.nodes.size());
  for (int n = 0; n < core.size(); ++n) {
    const CoreNode& node = core.nodes[n];
    if (node.owner != who || node.edges.empty()) continue;
    table[n].assign(node.edges.size(), 1.0 / static_cast<double>(node.edges.size()));
  }
  return table;
}

PolicyTable det_to_table(const CoreSG& core, const DetPolicy& choice, Owner who) {
  PolicyTable table(core.nodes.size());
  for (int n = 0; n < core.size(); ++n) {
    const CoreNode& node = core.nodes[n];
    if (node.owner != who || node.edges.empty()) continue;
    if (choice[n] < 0 || choice[n] >= static_cast<int>(node.edges.size()))
      fail("InvalidPolicy", "deterministic choice out of range at node " + std::to_string(n));
    table[n].assign(node.edges.size(), 0.0);
    table[n][choice[n]] = 1.0;
  }
  return table;
}

void check_policy(const CoreSG& core, const PolicyTable& policy, Owner who) {
  if (policy.size() != core.nodes.size())
    fail("InvalidPolicy", "policy table size does not match the game");
  for (int n = 0; n < core.size(); ++n) {
    const CoreNode& node = core.nodes[n];
    if (node.owner != who || node.edges.empty()) continue;
    if (policy[n].size() != node.edges.size())
      fail("InvalidPolicy", "distribution arity mismatch at node " + std::to_string(n));
    double sum = 0;
    for (double q : policy[n]) {
      if (q < -1e-12) fail("InvalidPolicy", "negative action probability");
      sum += q;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      fail("InvalidPolicy", "action distribution at node " + std::to_string(n) +
                                " sums to " + std::to_string(sum));
  }
}

namespace {

double edge_expectation(const CoreEdge& edge, const std::vector<double>& value) {
  double v = 0;
  for (const auto& [m, p] : edge.succ) v += p * value[m];
  return v;
}

}  // namespace

std::vector<double> performance_table(const CoreSG& core, const PolicyTable& ego,
                                      const PolicyTable& env) {
  std::vector<double> value(core.nodes.size(), 0.0);
  value[core.top] = 1.0;
  for (int n = core.size() - 1; n >= 0; --n) {
    const CoreNode& node = core.nodes[n];
    if (node.edges.empty()) continue;
    const auto& dist = node.owner == Owner::ego ? ego[n] : env[n];
    double v = 0;
    for (std::size_t e = 0; e < node.edges.size(); ++e)
      if (dist[e] > 0) v += dist[e] * edge_expectation(node.edges[e], value);
    value[n] = v;
  }
  return value;
}

std::vector<double> entropy_table(const CoreSG& core, const PolicyTable& ego,
                                  const PolicyTable& env) {
  std::vector<double> value(core.nodes.size(), 0.0);
  for (int n = core.size() - 1; n >= 0; --n) {
    const CoreNode& node = core.nodes[n];
    if (node.edges.empty()) continue;
    const auto& dist = node.owner == Owner::ego ? ego[n] : env[n];
    double v = 0;
    for (std::size_t e = 0; e < node.edges.size(); ++e) {
      if (dist[e] <= 0) continue;  // 0 * ln 0 := 0
      double cont = edge_expectation(node.edges[e], value);
      if (node.owner == Owner::ego) {
        v += dist[e] * (-std::log(dist[e]) + cont);
      } else {
        v += dist[e] * cont;
      }
    }
    value[n] = v;
  }
  return value;
}

double performance(const CoreSG& core, const PolicyTable& ego, const PolicyTable& env) {
  return performance_table(core, ego, env)[core.initial];
}

double causal_entropy(const CoreSG& core, const PolicyTable& ego, const PolicyTable& env) {
  return entropy_table(core, ego, env)[core.initial];
}

GuaranteedPoint guaranteed_point(const CoreSG& core, const PolicyTable& ego) {
  GuaranteedPoint result;
  result.env_min_performance.assign(core.nodes.size(), -1);
  result.env_min_entropy.assign(core.nodes.size(), -1);

  // Performance min pass.
  {
    std::vector<double> value(core.nodes.size(), 0.0);
    value[core.top] = 1.0;
    for (int n = core.size() - 1; n >= 0; --n) {
      const CoreNode& node = core.nodes[n];
      if (node.edges.empty()) continue;
      if (node.owner == Owner::ego) {
        double v = 0;
        for (std::size_t e = 0; e < node.edges.size(); ++e)
          if (ego[n][e] > 0) v += ego[n][e] * edge_expectation(node.edges[e], value);
        value[n] = v;
      } else {
        double best = std::numeric_limits<double>::infinity();
        int arg = 0;
        for (std::size_t e = 0; e < node.edges.size(); ++e) {
          double v = edge_expectation(node.edges[e], value);
          if (v < best) {
            best = v;
            arg = static_cast<int>(e);
          }
        }
        value[n] = best;
        result.env_min_performance[n] = arg;
      }
    }
    result.point.p = value[core.initial];
  }

  // Entropy min pass.
  {
    std::vector<double> value(core.nodes.size(), 0.0);
    for (int n = core.size() - 1; n >= 0; --n) {
      const CoreNode& node = core.nodes[n];
      if (node.edges.empty()) continue;
      if (node.owner == Owner::ego) {
        double v = 0;
        for (std::size_t e = 0; e < node.edges.size(); ++e) {
          if (ego[n][e] <= 0) continue;
          v += ego[n][e] * (-std::log(ego[n][e]) + edge_expectation(node.edges[e], value));
        }
        value[n] = v;
      } else {
        double best = std::numeric_limits<double>::infinity();
        int arg = 0;
        for (std::size_t e = 0; e < node.edges.size(); ++e) {
          double v = edge_expectation(node.edges[e], value);
          if (v < best) {
            best = v;
            arg = static_cast<int>(e);
          }
        }
        value[n] = best;
        result.env_min_entropy[n] = arg;
      }
    }
    result.point.h = value[core.initial];
  }
  return result;
}

}  // namespace erci
