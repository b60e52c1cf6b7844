#include "erci/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "erci/errors.hpp"

namespace erci {

CoreStats core_stats(const CoreSG& core) {
  CoreStats stats;
  std::vector<bool> reach(core.nodes.size(), false);
  reach[core.initial] = true;
  for (int n = 0; n < core.size(); ++n) {
    if (!reach[n]) continue;
    for (const auto& edge : core.nodes[n].edges) {
      ++stats.edge_count;
      for (const auto& [m, p] : edge.succ) reach[m] = true;
    }
  }
  for (int n = 0; n < core.size(); ++n)
    if (reach[n]) ++stats.node_count;
  stats.top_reachable = reach[core.top];
  stats.bot_reachable = reach[core.bot];
  stats.longest_path = core.longest_path;
  return stats;
}

void check_core(const CoreSG& core) {
  if (core.top < 0 || core.bot < 0 || core.top == core.bot)
    fail("BadCore", "terminals missing");
  if (!core.nodes[core.top].edges.empty() || !core.nodes[core.bot].edges.empty())
    fail("BadCore", "terminals must have no edges");
  for (int n = 0; n < core.size(); ++n) {
    if (core.is_terminal(n)) continue;
    if (core.nodes[n].edges.empty()) fail("BadCore", "non-terminal node without actions");
    for (const auto& edge : core.nodes[n].edges) {
      double sum = 0;
      if (edge.succ.empty()) fail("BadCore", "edge with empty support");
      for (const auto& [m, p] : edge.succ) {
        if (m <= n && !core.is_terminal(m))
          fail("BadCore", "edge does not increase the topological index");
        if (!(p > 0)) fail("BadCore", "non-positive transition probability");
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-9) fail("BadCore", "edge distribution does not sum to 1");
    }
  }
}

UnrolledGraph unroll(const StochasticGame& game, const Monitor& hard, const Monitor& soft,
                     int tau) {
  if (tau < 1) fail("HorizonZero", "horizon must be at least 1 logical step");
  if (game.initial < 0) fail("NO_INITIAL", "game has no initial state");

  CompiledMonitor chard(hard, game);
  CompiledMonitor csoft(soft, game);

  const int max_depth = 2 * tau;  // half-steps

  UnrolledGraph out;
  out.action_names = game.action_names;
  out.state_ids.reserve(game.states.size());
  for (const auto& s : game.states) out.state_ids.push_back(s.id);

  // Deterministic numbering: BFS layer by layer, keys sorted inside a layer.
  using Key = std::tuple<int, int, int>;  // (game state, hard q, soft q)
  std::map<Key, int> layer_ids;
  std::vector<std::pair<Key, int>> frontier;  // key -> node index

  auto make_node = [&](int depth, const Key& key) {
    const auto& [s, qh, qs] = key;
    UnrolledNode node;
    node.game_state = s;
    node.hard_q = qh;
    node.soft_q = qs;
    node.depth = depth;
    node.owner = game.states[s].owner;
    if (game.is_terminal(s) || depth == max_depth) {
      node.cut = true;
      node.hard_ok = chard.accepts(qh);
      node.soft_ok = csoft.accepts(qs);
    }
    out.nodes.push_back(std::move(node));
    return static_cast<int>(out.nodes.size() - 1);
  };

  Key root{game.initial, chard.step(chard.init(), game.initial), csoft.step(csoft.init(), game.initial)};
  out.initial = make_node(0, root);
  frontier.push_back({root, out.initial});

  for (int depth = 0; depth < max_depth && !frontier.empty(); ++depth) {
    layer_ids.clear();
    std::vector<std::pair<Key, int>> next_frontier;
    // First pass: discover the next layer with deterministic ordering.
    std::map<Key, bool> discovered;
    for (const auto& [key, idx] : frontier) {
      if (out.nodes[idx].cut) continue;
      int s = std::get<0>(key);
      for (const auto& act : game.states[s].actions)
        for (const auto& tr : act.support) {
          Key child{tr.target, chard.step(std::get<1>(key), tr.target),
                    csoft.step(std::get<2>(key), tr.target)};
          discovered[child] = true;
        }
    }
    for (const auto& [key, unused] : discovered) {
      (void)unused;
      int idx = make_node(depth + 1, key);
      layer_ids[key] = idx;
      next_frontier.push_back({key, idx});
    }
    // Second pass: connect edges.
    for (const auto& [key, idx] : frontier) {
      if (out.nodes[idx].cut) continue;
      int s = std::get<0>(key);
      for (const auto& act : game.states[s].actions) {
        CoreEdge edge;
        edge.action = act.action;
        for (const auto& tr : act.support) {
          Key child{tr.target, chard.step(std::get<1>(key), tr.target),
                    csoft.step(std::get<2>(key), tr.target)};
          edge.succ.push_back({layer_ids.at(child), tr.prob.value});
        }
        out.nodes[idx].edges.push_back(std::move(edge));
      }
    }
    frontier = std::move(next_frontier);
  }
  return out;
}

PruneResult prune_hard(const UnrolledGraph& graph) {
  const int n = static_cast<int>(graph.nodes.size());
  PruneResult result;

  // Reverse topological pass: a cut node loses iff it rejects the hard
  // monitor; an env node loses iff some action can reach a losing node; an
  // ego node loses iff every action touches a losing node.
  std::vector<bool> losing(n, false);
  auto edge_touches_losing = [&](const CoreEdge& e) {
    for (const auto& [m, p] : e.succ)
      if (losing[m]) return true;
    return false;
  };
  for (int i = n - 1; i >= 0; --i) {
    const UnrolledNode& node = graph.nodes[i];
    if (node.cut) {
      losing[i] = !node.hard_ok;
    } else if (node.owner == Owner::env) {
      losing[i] = false;
      for (const auto& e : node.edges)
        if (edge_touches_losing(e)) {
          losing[i] = true;
          break;
        }
    } else {
      losing[i] = true;
      for (const auto& e : node.edges)
        if (!edge_touches_losing(e)) {
          losing[i] = false;
          break;
        }
    }
  }
  for (int i = 0; i < n; ++i)
    if (losing[i]) ++result.losing_nodes;
  if (losing[graph.initial]) return result;  // UnrealizableHard

  if (graph.nodes[graph.initial].cut) {
    // Degenerate instance: the whole game is one classified point.
    CoreSG core;
    core.action_names = graph.action_names;
    core.state_ids = graph.state_ids;
    core.top = 0;
    core.bot = 1;
    core.nodes.push_back({Owner::ego, {}, -1, -1, -1, -1});
    core.nodes.push_back({Owner::ego, {}, -1, -1, -1, -1});
    core.initial = graph.nodes[graph.initial].soft_ok ? core.top : core.bot;
    core.longest_path = 0;
    result.core = std::move(core);
    return result;
  }

  // Survivors keep their relative (depth-major) order; terminals merge last.
  std::vector<int> remap(n, -1);
  CoreSG core;
  core.action_names = graph.action_names;
  core.state_ids = graph.state_ids;
  std::vector<int> survivors;
  for (int i = 0; i < n; ++i) {
    if (losing[i] || graph.nodes[i].cut) continue;
    // Nodes that became unreachable stay harmless; they are dropped by the
    // reachability sweep below.
    survivors.push_back(i);
  }

  // Reachability under the pruned action sets, from the initial node.
  std::vector<bool> reach(n, false);
  reach[graph.initial] = true;
  for (int i = 0; i < n; ++i) {
    if (!reach[i] || graph.nodes[i].cut || losing[i]) continue;
    const UnrolledNode& node = graph.nodes[i];
    for (const auto& e : node.edges) {
      if (node.owner == Owner::ego && edge_touches_losing(e)) continue;
      for (const auto& [m, p] : e.succ) reach[m] = true;
    }
  }

  for (int i : survivors) {
    if (!reach[i]) continue;
    remap[i] = core.size();
    CoreNode cn;
    cn.owner = graph.nodes[i].owner;
    cn.game_state = graph.nodes[i].game_state;
    cn.hard_q = graph.nodes[i].hard_q;
    cn.soft_q = graph.nodes[i].soft_q;
    cn.depth = graph.nodes[i].depth;
    core.nodes.push_back(std::move(cn));
  }
  core.top = core.size();
  core.nodes.push_back({Owner::ego, {}, -1, -1, -1, -1});
  core.bot = core.size();
  core.nodes.push_back({Owner::ego, {}, -1, -1, -1, -1});

  for (int i : survivors) {
    if (!reach[i]) continue;
    const UnrolledNode& node = graph.nodes[i];
    for (const auto& e : node.edges) {
      if (node.owner == Owner::ego && edge_touches_losing(e)) {
        ++result.removed_ego_actions;
        continue;
      }
      CoreEdge edge;
      edge.action = e.action;
      for (const auto& [m, p] : e.succ) {
        int target;
        if (graph.nodes[m].cut) {
          target = graph.nodes[m].soft_ok ? core.top : core.bot;
        } else {
          target = remap[m];
        }
        edge.succ.push_back({target, p});
      }
      // Merge duplicate targets produced by the terminal merge.
      std::sort(edge.succ.begin(), edge.succ.end());
      std::vector<std::pair<int, double>> merged;
      for (const auto& [t, p] : edge.succ) {
        if (!merged.empty() && merged.back().first == t)
          merged.back().second += p;
        else
          merged.push_back({t, p});
      }
      edge.succ = std::move(merged);
      core.nodes[remap[i]].edges.push_back(std::move(edge));
    }
  }
  core.initial = remap[graph.initial];

  // Longest root-to-terminal path, for the kappa*tau error budget.
  std::vector<int> longest(core.size(), 0);
  for (int i = core.size() - 1; i >= 0; --i) {
    for (const auto& e : core.nodes[i].edges)
      for (const auto& [m, p] : e.succ) longest[i] = std::max(longest[i], longest[m] + 1);
  }
  core.longest_path = longest[core.initial];

  result.core = std::move(core);
  return result;
}

PruneResult build_core(const StochasticGame& game, const Monitor& hard, const Monitor& soft,
                       int tau) {
  ValidationReport report = validate_game(game);
  bool only_alternation = true;
  for (const auto& issue : report.errors)
    if (issue.code != "NONALT") only_alternation = false;
  if (!report.ok() && !only_alternation)
    fail("InvalidGame", report.errors.front().code + " at " + report.errors.front().where + ": " +
                            report.errors.front().message);
  StochasticGame normalized = normalize_alternation(game);
  return prune_hard(unroll(normalized, hard, soft, tau));
}

}  // namespace erci
