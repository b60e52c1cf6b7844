#include "erci/improviser.hpp"

#include <cmath>
#include <ostream>

#include "erci/errors.hpp"

namespace erci {

Episode::Episode(const Improviser& imp, std::uint64_t seed, std::uint64_t index)
    : imp_(imp), rng_(derive_stream(seed, 2 * index)) {
  const CoreSG& core = *imp_.core;
  node_ = core.initial;
  if (imp_.matching()) {
    Match m = imp_.m1;
    if (imp_.has_second && rng_.uniform() >= imp_.w) m = imp_.m2;
    // Bracket mixtures commit to one grid rationality per episode.
    grid_idx_ = m.pure() ? m.lo : (rng_.uniform() < m.w ? m.lo : m.hi);
  } else {
    markov_ = imp_.pi1.get();
    if (imp_.has_second && rng_.uniform() >= imp_.w) markov_ = imp_.pi2.get();
  }
}

bool Episode::done() const { return imp_.core->is_terminal(node_); }

Owner Episode::owner() const { return imp_.core->nodes[node_].owner; }

double Episode::owed() const {
  if (!imp_.matching() || done()) return 0.0;
  return imp_.tables->h(grid_idx_, node_);
}

double Episode::active_lambda() const {
  if (!imp_.matching()) return std::numeric_limits<double>::quiet_NaN();
  return imp_.tables->grid[grid_idx_];
}

Episode::StepOut Episode::step() {
  const CoreSG& core = *imp_.core;
  if (done()) fail("EpisodeDone", "step() after the episode ended");
  const CoreNode& node = core.nodes[node_];
  if (node.owner != Owner::ego) fail("StepOnEnvNode", "step() is only valid at ego nodes");
  StepOut out;
  out.dist = imp_.matching() ? matching_sigma(core, *imp_.tables, grid_idx_, node_)
                             : (*markov_)[node_];
  if (out.dist.size() != node.edges.size())
    fail("InvalidPolicy", "policy distribution arity mismatch at node " + std::to_string(node_));
  out.edge = rng_.sample(out.dist);
  out.action = node.edges[out.edge].action;
  pending_step_ = true;
  pending_edge_ = out.edge;
  return out;
}

void Episode::observe(int edge, int next_node) {
  const CoreSG& core = *imp_.core;
  if (done()) fail("EpisodeDone", "observe() after the episode ended");
  const CoreNode& node = core.nodes[node_];
  if (edge < 0 || edge >= static_cast<int>(node.edges.size()))
    fail("UnknownAction", "edge index out of range at node " + std::to_string(node_));
  if (node.owner == Owner::ego && pending_step_ && edge != pending_edge_)
    fail("ProtocolViolation", "observed ego action differs from the sampled one");
  bool in_support = false;
  for (const auto& [m, pr] : node.edges[edge].succ)
    if (m == next_node) in_support = true;
  if (!in_support)
    fail("OffSupportObservation", "next node " + std::to_string(next_node) +
                                      " is not in the support of the chosen action");

  if (imp_.matching() && node.owner == Owner::env) {
    // Owed-entropy transfer: re-match the chosen branch at the owed value.
    // Expectation over chance and the bracket coin preserves the owed
    // entropy; the active rationality never decreases.
    double owed_h = imp_.tables->h(grid_idx_, node_);
    Match m = match_on_curve(branch_curve(core, *imp_.tables, node_, edge), owed_h);
    grid_idx_ = m.pure() ? m.lo : (rng_.uniform() < m.w ? m.lo : m.hi);
  }
  node_ = next_node;
  pending_step_ = false;
  pending_edge_ = -1;
}

std::pair<double, double> wilson_interval(double successes, int n) {
  const double z = 1.959963984540054;  // 95%
  double phat = successes / n;
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = (phat + z2 / (2.0 * n)) / denom;
  double half = z * std::sqrt(phat * (1 - phat) / n + z2 / (4.0 * n * n)) / denom;
  return {center - half, center + half};
}

namespace {

void log_half_step(std::ostream& os, const CoreSG& core, int node, Owner owner,
                   const std::vector<double>* dist, int action, double owed, double lambda) {
  os << "{\"node\":" << node << ",\"owner\":\"" << owner_name(owner) << "\"";
  if (dist != nullptr) {
    os << ",\"dist\":[";
    for (std::size_t i = 0; i < dist->size(); ++i) os << (i ? "," : "") << (*dist)[i];
    os << "]";
  }
  os << ",\"action\":\"" << (action >= 0 ? core.action_names[action] : "") << "\"";
  os << ",\"owed_h\":" << owed << ",\"lambda\":";
  if (std::isinf(lambda))
    os << "\"inf\"";
  else if (std::isnan(lambda))
    os << "null";
  else
    os << lambda;
  os << "}\n";
}

struct EnvChoice {
  EnvMode mode;
  const PolicyTable* table = nullptr;  // scripted / worst-case table form
};

}  // namespace

SimulationReport simulate(const Improviser& imp, const EnvSpec& env, int n, std::uint64_t seed,
                          std::ostream* log) {
  if (n < 1) fail("InvalidArgument", "episode count must be at least 1");
  const CoreSG& core = *imp.core;

  // Worst-case adversaries depend on the ego policy; fix them once.
  PolicyTable env_table;
  if (env.mode == EnvMode::scripted) {
    env_table = env.scripted;
    check_policy(core, env_table, Owner::env);
  } else if (env.mode != EnvMode::uniform_random) {
    GuaranteedPoint gp = guaranteed_point(core, flatten_improviser(imp));
    const DetPolicy& det = env.mode == EnvMode::worst_case_performance ? gp.env_min_performance
                                                                       : gp.env_min_entropy;
    env_table = det_to_table(core, det, Owner::env);
  }

  SimulationReport report;
  report.episodes = n;
  double successes = 0;
  double entropy_sum = 0;

  for (int i = 0; i < n; ++i) {
    Episode ep(imp, seed, static_cast<std::uint64_t>(i));
    SplitMix64 world(derive_stream(seed, 2 * static_cast<std::uint64_t>(i) + 1));
    while (!ep.done()) {
      int node = ep.node();
      const CoreNode& cn = core.nodes[node];
      int edge;
      const std::vector<double>* dist = nullptr;
      std::vector<double> emitted;
      if (cn.owner == Owner::ego) {
        auto stepped = ep.step();
        emitted = std::move(stepped.dist);
        edge = stepped.edge;
        dist = &emitted;
        entropy_sum += -std::log(emitted[edge]);
      } else if (env.mode == EnvMode::uniform_random) {
        edge = static_cast<int>(world.below(cn.edges.size()));
      } else {
        edge = world.sample(env_table[node]);
      }
      int next = cn.edges[edge].succ.size() == 1
                     ? cn.edges[edge].succ[0].first
                     : [&] {
                         std::vector<double> probs;
                         probs.reserve(cn.edges[edge].succ.size());
                         for (const auto& [m, pr] : cn.edges[edge].succ) probs.push_back(pr);
                         return cn.edges[edge].succ[world.sample(probs)].first;
                       }();
      if (log != nullptr)
        log_half_step(*log, core, node, cn.owner, dist, cn.edges[edge].action, ep.owed(),
                      ep.active_lambda());
      ep.observe(edge, next);
    }
    if (ep.node() == core.top) successes += 1;
  }

  report.p_hat = successes / n;
  std::tie(report.p_lo, report.p_hi) = wilson_interval(successes, n);
  report.h_hat = entropy_sum / n;
  return report;
}

std::vector<SimulationReport> simulate_vs_each_env(const Improviser& imp,
                                                   const std::vector<DetPolicy>& envs, int n,
                                                   std::uint64_t seed) {
  std::vector<SimulationReport> reports;
  reports.reserve(envs.size());
  for (std::size_t i = 0; i < envs.size(); ++i) {
    EnvSpec spec;
    spec.mode = EnvMode::scripted;
    spec.scripted = det_to_table(*imp.core, envs[i], Owner::env);
    SimulationReport r = simulate(imp, spec, n, derive_stream(seed, 1000003 + i));
    r.env_policy_index = static_cast<int>(i);
    reports.push_back(r);
  }
  return reports;
}

}  // namespace erci
