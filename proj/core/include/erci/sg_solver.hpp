#pragma once

#include <memory>
#include <vector>

#include "erci/core_sg.hpp"
#include "erci/verdict.hpp"

namespace erci {

/// Per-node sampled Pareto front, as exposed to callers: samples sorted by
/// strictly increasing rationality with h nonincreasing and p nondecreasing,
/// chord interpolation between adjacent samples, and the certified maximum
/// interpolation error on the p axis.
struct FrontTable {
  int node = -1;
  std::vector<FrontSample> samples;
  double kappa = 0.0;
};

/// Front samples for every node over one shared rationality grid, so a single
/// backward sweep per grid value fills all tables. The grid always ends with
/// the infinity endpoint.
class FrontTables {
 public:
  std::vector<double> grid;  // ascending; grid.back() == +infinity

  double h(int grid_idx, int node) const { return h_[grid_idx][node]; }
  double p(int grid_idx, int node) const { return p_[grid_idx][node]; }
  int grid_size() const { return static_cast<int>(grid.size()); }
  int node_count() const { return h_.empty() ? 0 : static_cast<int>(h_[0].size()); }

  double kappa_requested = 0.0;
  double kappa_certified = 0.0;

  FrontTable table(int node) const;

  /// Sample point of one node at one grid index.
  Point at(int grid_idx, int node) const { return {p(grid_idx, node), h(grid_idx, node)}; }

  std::vector<std::vector<double>> h_, p_;  // [grid index][node]
};

/// Interpolated position on a front table: mixture weight w on grid index lo,
/// (1 - w) on hi, with expected entropy == the owed value it was matched at
/// (after clamping) and p the chord value.
struct Match {
  int lo = 0;
  int hi = 0;
  double w = 1.0;
  double h = 0.0;
  double p = 0.0;
  bool pure() const { return lo == hi || w >= 1.0; }
};

struct SgConfig {
  double lambda_max = 100.0;
  int sample_budget = 10000;   // max shared grid size; ResolutionExhausted beyond
  double kappa_min_factor = 1.0 / (1 << 24);  // halving floor relative to kappa0
  int jobs = 1;                // parallelism across grid values in a sweep
};

/// Lexicographic min-entropy environment response at one rationality: a
/// single reverse-topological pass where ego uses the smooth backup and env
/// picks the action minimizing expected child entropy, tie-broken by expected
/// child performance, then action index. Returns the deterministic env policy
/// and the induced per-node entropy/performance tables.
struct MinEntropyEnvResult {
  DetPolicy env;
  std::vector<double> h;
  std::vector<double> p;
};
MinEntropyEnvResult min_entropy_env(const CoreSG& core, double lambda);

/// Builds kappa-resolved front tables for every node: terminals get constant
/// tables, ego and chance combine child samples gridpoint-wise, and env nodes
/// take the pointwise minimum of their action-branch curves (the front at an
/// env node is the intersection of its children's fronts). The shared grid is
/// refined until adjacent samples of every node differ by at most kappa in p.
/// Throws ResolutionExhausted when the sample budget is hit.
FrontTables build_front_tables(const CoreSG& core, double kappa, const SgConfig& config = {});

/// Tables over a caller-fixed grid (no refinement); used to reload persisted
/// improvisers deterministically. The grid must start at 0 and end at +inf.
FrontTables compute_front_tables_on_grid(const CoreSG& core, std::vector<double> grid,
                                         int jobs = 1);

/// Match a front table at the owed entropy: bracketing samples on the h axis
/// mixed so the expected entropy equals owed exactly; out-of-range values are
/// clamped to the endpoints.
Match match_rationality(const FrontTable& table, double owed_h);

/// Branch curve of one env action: expectation of the child tables over the
/// action's chance distribution, per grid index.
std::vector<Point> branch_curve(const CoreSG& core, const FrontTables& tables, int node,
                                int edge);

/// Match on a raw grid-indexed curve (h nonincreasing with the index).
Match match_on_curve(const std::vector<Point>& curve, double owed_h);

/// Reactive randomized policy: a top-level coin over at most two entropy
/// matching branches (or two explicit Markov policies for MDP witnesses).
struct Improviser {
  std::shared_ptr<const CoreSG> core;
  // entropy-matching form
  std::shared_ptr<const FrontTables> tables;
  Match m1, m2;
  // explicit Markov form
  std::shared_ptr<const PolicyTable> pi1, pi2;
  double w = 1.0;
  bool has_second = false;

  bool matching() const { return tables != nullptr; }
};

/// Packages an entropy-matching policy with initial rationality given by a
/// table match (pure grid point or bracket mixture).
Improviser entropy_matching_policy(std::shared_ptr<const CoreSG> core,
                                   std::shared_ptr<const FrontTables> tables,
                                   const Match& initial);

/// Episode-start mixture of two explicit Markov ego policies.
Improviser mix_policies(std::shared_ptr<const CoreSG> core, PolicyTable pi1, PolicyTable pi2,
                        double w);

/// Ego action distribution emitted at `node` when playing with the pure grid
/// rationality grid[grid_idx]; recomputed from the child tables.
std::vector<double> matching_sigma(const CoreSG& core, const FrontTables& tables, int grid_idx,
                                   int node);

/// Exact evaluation of an entropy-matching policy against a fixed
/// deterministic env policy: performance and the conditional (coin-resolved)
/// entropy, which lower-bounds the true causal entropy.
Point exact_matching_eval(const CoreSG& core, const FrontTables& tables, const Match& initial,
                          const DetPolicy& env);
Point exact_improviser_eval(const Improviser& imp, const DetPolicy& env);

/// Markov flattening used to pick worst-case adversaries: each node gets the
/// blended emission distribution of the improviser's initial rationality
/// state (replanning ignored).
PolicyTable flatten_improviser(const Improviser& imp);

struct SgVerdict {
  Verdict verdict;
  Improviser improviser;          // populated for realizable verdicts
  std::shared_ptr<const FrontTables> tables;
};

/// Full stochastic-game synthesis: builds front tables at decreasing kappa
/// until the target can be decided outside the kappa*tau error band (and no
/// env min-entropy action is ambiguous at the working resolution), then
/// returns the verdict together with an entropy-matching improviser for
/// realizable instances. Unknown carries the final kappa and residual gap.
SgVerdict sg_pareto_explore(const CoreSG& core, const Target& target, double kappa0 = 0.1,
                            const SgConfig& config = {});

}  // namespace erci
