#pragma once

#include <string>
#include <vector>

#include "erci/game.hpp"

namespace erci {

struct CoreEdge {
  int action = -1;                            // index into CoreSG::action_names
  std::vector<std::pair<int, double>> succ;   // (node, probability)
};

/// Node of the unrolled, pruned game. The provenance fields identify the
/// original game state, the hard/soft monitor states and the half-step depth
/// this node was produced at (-1 for the merged terminals).
struct CoreNode {
  Owner owner = Owner::ego;
  std::vector<CoreEdge> edges;   // empty only for the two terminals
  int game_state = -1;
  int hard_q = -1;
  int soft_q = -1;
  int depth = -1;
};

/// Finite acyclic game with exactly two terminals. Nodes are numbered
/// topologically: non-terminals sorted by (depth, provenance), then top,
/// then bot, so every edge points to a strictly larger index. Backward
/// passes iterate indices in descending order.
struct CoreSG {
  std::vector<CoreNode> nodes;
  int initial = 0;
  int top = -1;  // all paths ending here satisfy the soft constraint
  int bot = -1;  // all paths ending here violate it
  int longest_path = 0;  // edges on the longest root-to-terminal path
  std::vector<std::string> action_names;
  std::vector<std::string> state_ids;  // original game state ids (provenance)

  bool is_terminal(int n) const { return n == top || n == bot; }
  int size() const { return static_cast<int>(nodes.size()); }
};

struct CoreStats {
  int node_count = 0;
  int edge_count = 0;
  int longest_path = 0;      // the tau of the error-budget analysis
  bool top_reachable = false;
  bool bot_reachable = false;
};

CoreStats core_stats(const CoreSG& core);

/// Structural check used by tests and after deserialization: topological
/// numbering, two terminals, nonempty edge lists, distributions ~1.
void check_core(const CoreSG& core);

}  // namespace erci
