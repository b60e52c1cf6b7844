#pragma once

#include <algorithm>
#include <vector>

#include "erci/core_sg.hpp"
#include "erci/policy_eval.hpp"
#include "erci/rng.hpp"

namespace erci::testing {

struct RandomCoreOpts {
  int min_layers = 2;
  int max_layers = 5;
  int max_width = 4;
  int max_ego_actions = 3;
  int max_env_actions = 2;
  int max_env_choice_nodes = 6;   // env nodes with more than one action
  int max_ego_decision_nodes = 64;
  int max_chance = 2;             // support size per edge
  bool mdp = false;
};

/// Layered random core: owners alternate by layer, the last layer feeds the
/// terminals, every node is reachable, probabilities are small rationals.
inline CoreSG random_core(SplitMix64& rng, const RandomCoreOpts& opts = {}) {
  const int layers =
      opts.min_layers + static_cast<int>(rng.below(opts.max_layers - opts.min_layers + 1));
  std::vector<std::vector<int>> layer_nodes(layers);

  std::vector<CoreNode> nodes;
  int env_choices_left = opts.mdp ? 0 : opts.max_env_choice_nodes;
  int ego_decisions_left = opts.max_ego_decision_nodes;
  for (int l = 0; l < layers; ++l) {
    int width = l == 0 ? 1 : 1 + static_cast<int>(rng.below(opts.max_width));
    for (int i = 0; i < width; ++i) {
      CoreNode n;
      n.owner = l % 2 == 0 ? Owner::ego : Owner::env;
      n.depth = l;
      n.game_state = static_cast<int>(nodes.size());
      n.hard_q = n.soft_q = 0;
      layer_nodes[l].push_back(static_cast<int>(nodes.size()));
      nodes.push_back(std::move(n));
    }
  }
  const int top = static_cast<int>(nodes.size());
  const int bot = top + 1;

  for (int l = 0; l < layers; ++l) {
    for (int idx : layer_nodes[l]) {
      CoreNode& node = nodes[idx];
      int max_actions = node.owner == Owner::ego ? opts.max_ego_actions : opts.max_env_actions;
      int actions = 1 + static_cast<int>(rng.below(max_actions));
      if (node.owner == Owner::env && actions > 1 && env_choices_left == 0) actions = 1;
      if (node.owner == Owner::env && actions > 1) --env_choices_left;
      if (node.owner == Owner::ego && actions > 1 && ego_decisions_left == 0) actions = 1;
      if (node.owner == Owner::ego && actions > 1) --ego_decisions_left;
      for (int a = 0; a < actions; ++a) {
        CoreEdge e;
        e.action = a;
        int fanout = 1 + static_cast<int>(rng.below(opts.max_chance));
        std::vector<int> targets;
        for (int f = 0; f < fanout; ++f) {
          bool to_terminal = l + 1 >= layers || rng.uniform() < 0.25;
          int target = to_terminal
                           ? (rng.uniform() < 0.5 ? top : bot)
                           : layer_nodes[l + 1][rng.below(layer_nodes[l + 1].size())];
          if (std::find(targets.begin(), targets.end(), target) == targets.end())
            targets.push_back(target);
        }
        std::vector<int> weights(targets.size());
        int total = 0;
        for (auto& w : weights) {
          w = 1 + static_cast<int>(rng.below(4));
          total += w;
        }
        for (std::size_t t = 0; t < targets.size(); ++t)
          e.succ.push_back({targets[t], static_cast<double>(weights[t]) / total});
        std::sort(e.succ.begin(), e.succ.end());
        node.edges.push_back(std::move(e));
      }
    }
  }

  // Drop unreachable nodes; edges only ever point forward, so surviving
  // structure stays valid.
  std::vector<bool> reach(nodes.size() + 2, false);
  reach[0] = true;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!reach[i]) continue;
    for (const auto& e : nodes[i].edges)
      for (const auto& [m, p] : e.succ) reach[m] = true;
  }
  std::vector<int> remap(nodes.size() + 2, -1);
  CoreSG core;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!reach[i]) continue;
    remap[i] = static_cast<int>(core.nodes.size());
    core.nodes.push_back(nodes[i]);
  }
  core.top = static_cast<int>(core.nodes.size());
  core.nodes.push_back({Owner::ego, {}, -1, -1, -1, -1});
  core.bot = static_cast<int>(core.nodes.size());
  core.nodes.push_back({Owner::ego, {}, -1, -1, -1, -1});
  remap[top] = core.top;
  remap[bot] = core.bot;
  for (auto& node : core.nodes)
    for (auto& e : node.edges)
      for (auto& [m, p] : e.succ) m = remap[m];
  core.initial = 0;
  core.action_names = {"a", "b", "c"};
  for (std::size_t n = 0; n < core.nodes.size(); ++n)
    core.state_ids.push_back("n" + std::to_string(n));
  std::vector<int> longest(core.nodes.size(), 0);
  for (int i = static_cast<int>(core.nodes.size()) - 1; i >= 0; --i)
    for (const auto& e : core.nodes[i].edges)
      for (const auto& [m, p] : e.succ) longest[i] = std::max(longest[i], longest[m] + 1);
  core.longest_path = longest[core.initial];
  return core;
}

/// Random Markov policy for one player with strictly positive probabilities.
inline PolicyTable random_policy(SplitMix64& rng, const CoreSG& core, Owner who) {
  PolicyTable table(core.nodes.size());
  for (int n = 0; n < core.size(); ++n) {
    const CoreNode& node = core.nodes[n];
    if (node.owner != who || node.edges.empty()) continue;
    table[n].resize(node.edges.size());
    double total = 0;
    for (auto& q : table[n]) {
      q = 0.05 + rng.uniform();
      total += q;
    }
    for (auto& q : table[n]) q /= total;
  }
  return table;
}

}  // namespace erci::testing
