#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>

#include "erci/rng.hpp"
#include "erci/sg_solver.hpp"

namespace erci {

/// One seeded run of an improviser. The driver calls step() at ego nodes to
/// obtain the emitted distribution and a sampled action, and observe() after
/// every resolved move (both players) with the action taken and the chance
/// outcome. Observations at env nodes apply the owed-entropy transfer rule,
/// which may raise the active rationality.
class Episode {
 public:
  Episode(const Improviser& imp, std::uint64_t seed, std::uint64_t index);

  bool done() const;
  int node() const { return node_; }
  Owner owner() const;

  struct StepOut {
    std::vector<double> dist;  // emitted distribution over edge indices
    int edge = -1;             // sampled edge index
    int action = -1;           // action name index
  };
  /// Emits and samples at the current (ego) node; throws StepOnEnvNode.
  StepOut step();

  /// Advances past the current node; next_node must be in the support of the
  /// chosen edge (OffSupportObservation otherwise).
  void observe(int edge, int next_node);

  /// Entropy still owed from the current node.
  double owed() const;
  /// Active rationality (grid value; +inf for the hard-max endpoint).
  double active_lambda() const;

 private:
  const Improviser& imp_;
  SplitMix64 rng_;
  int node_ = -1;
  int grid_idx_ = 0;       // matching form: active grid rationality
  bool pending_step_ = false;
  int pending_edge_ = -1;
  const PolicyTable* markov_ = nullptr;  // explicit form: committed branch
};

enum class EnvMode { worst_case_performance, worst_case_entropy, scripted, uniform_random };

struct EnvSpec {
  EnvMode mode = EnvMode::uniform_random;
  PolicyTable scripted;  // used when mode == scripted
};

struct SimulationReport {
  int episodes = 0;
  double p_hat = 0.0;
  double p_lo = 0.0, p_hi = 0.0;  // Wilson 95% interval
  double h_hat = 0.0;             // plug-in causal entropy estimate
  int env_policy_index = -1;      // set by per-env breakdowns
};

/// Runs n seeded episodes of the improviser against the chosen environment.
/// Worst-case environments are the deterministic minimizers from the
/// guaranteed-point passes against the improviser's flattened base policy,
/// precomputed once. Episodes derive their streams from (seed, index), so
/// reports are reproducible and episodes merge associatively. When `log` is
/// given, one JSON line per half-step is written:
/// {"node","owner","dist","action","owed_h","lambda"}.
SimulationReport simulate(const Improviser& imp, const EnvSpec& env, int n, std::uint64_t seed,
                          std::ostream* log = nullptr);

/// Per-env-policy breakdown over every enumerable deterministic env policy.
std::vector<SimulationReport> simulate_vs_each_env(const Improviser& imp,
                                                   const std::vector<DetPolicy>& envs, int n,
                                                   std::uint64_t seed);

/// 95% Wilson score interval for x successes out of n.
std::pair<double, double> wilson_interval(double successes, int n);

}  // namespace erci
