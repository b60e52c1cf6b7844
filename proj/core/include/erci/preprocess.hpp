#pragma once

#include <optional>

#include "erci/core_sg.hpp"
#include "erci/monitor.hpp"

namespace erci {

/// Node of the raw tau-step unrolling, before hard pruning and terminal
/// merging. Cut nodes carry the classification of both monitors.
struct UnrolledNode {
  Owner owner = Owner::ego;
  int game_state = -1;
  int hard_q = -1;
  int soft_q = -1;
  int depth = 0;     // half-steps from the root
  bool cut = false;  // terminal game state reached or horizon hit
  bool hard_ok = false;
  bool soft_ok = false;
  std::vector<CoreEdge> edges;
};

struct UnrolledGraph {
  std::vector<UnrolledNode> nodes;  // topological: sorted by depth, stable keys
  int initial = 0;
  std::vector<std::string> action_names;
  std::vector<std::string> state_ids;
};

/// Product of the game with both monitors, unrolled for tau logical steps
/// (2*tau half-steps; one logical step is one ego move plus one env move).
/// Paths are cut when they reach a terminal game state or the horizon, and
/// the cut is classified by both monitors. Requires a validated alternating
/// game; throws HorizonZero for tau < 1.
UnrolledGraph unroll(const StochasticGame& game, const Monitor& hard, const Monitor& soft,
                     int tau);

struct PruneResult {
  std::optional<CoreSG> core;  // nullopt <=> UnrealizableHard
  int losing_nodes = 0;
  int removed_ego_actions = 0;
  bool unrealizable_hard() const { return !core.has_value(); }
};

/// Backward pass that removes every node from which env can force violating
/// the hard constraint, plus every ego action whose support touches such a
/// node. Surviving cut nodes are merged into the two terminals by their soft
/// classification. UnrealizableHard (initial node losing) is a verdict, not
/// an error.
PruneResult prune_hard(const UnrolledGraph& graph);

/// validate + normalize + unroll + prune in one step.
PruneResult build_core(const StochasticGame& game, const Monitor& hard, const Monitor& soft,
                       int tau);

}  // namespace erci
