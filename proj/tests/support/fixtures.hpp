#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "erci/core_sg.hpp"
#include "erci/monitor.hpp"
#include "erci/preprocess.hpp"

namespace erci::testing {

inline double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log(p) - (1 - p) * std::log(1 - p);
}

/// Hand-assembled cores for tests: nodes added in topological order, edges
/// may point to the sentinels kTop/kBot, resolved when build() appends the
/// two terminal nodes.
class CoreBuilder {
 public:
  static constexpr int kTop = -1;
  static constexpr int kBot = -2;

  explicit CoreBuilder(std::vector<std::string> actions = {"a", "b", "c", "d", "e"})
      : actions_(std::move(actions)) {}

  int add(Owner owner, int depth) {
    CoreNode node;
    node.owner = owner;
    node.depth = depth;
    node.game_state = static_cast<int>(nodes_.size());
    node.hard_q = 0;
    node.soft_q = 0;
    nodes_.push_back(std::move(node));
    return static_cast<int>(nodes_.size()) - 1;
  }

  void edge(int from, int action, std::vector<std::pair<int, double>> succ) {
    CoreEdge e;
    e.action = action;
    e.succ = std::move(succ);
    nodes_[from].edges.push_back(std::move(e));
  }

  CoreSG build(int initial = 0) {
    CoreSG core;
    core.action_names = actions_;
    core.nodes = nodes_;
    core.top = static_cast<int>(core.nodes.size());
    core.nodes.push_back({Owner::ego, {}, -1, -1, -1, -1});
    core.bot = static_cast<int>(core.nodes.size());
    core.nodes.push_back({Owner::ego, {}, -1, -1, -1, -1});
    for (auto& node : core.nodes)
      for (auto& e : node.edges)
        for (auto& [m, p] : e.succ) {
          if (m == kTop) m = core.top;
          if (m == kBot) m = core.bot;
        }
    core.initial = initial;
    for (std::size_t n = 0; n < core.nodes.size(); ++n)
      core.state_ids.push_back("n" + std::to_string(n));
    std::vector<int> longest(core.nodes.size(), 0);
    for (int i = static_cast<int>(core.nodes.size()) - 1; i >= 0; --i)
      for (const auto& e : core.nodes[i].edges)
        for (const auto& [m, p] : e.succ)
          longest[i] = std::max(longest[i], longest[m] + 1);
    core.longest_path = longest[initial];
    return core;
  }

 private:
  std::vector<std::string> actions_;
  std::vector<CoreNode> nodes_;
};

/// The six-state running example: s0 (ego) branches to env states s1/s2;
/// s1 can reach top with 1/3 or hand control to s3; s3 (ego) mirrors that.
inline StochasticGame fig2_game() {
  StochasticGame g;
  g.action_names = {"a", "b"};
  auto add = [&](const std::string& id, Owner owner) {
    g.states.push_back({id, owner, {}, false, id});
    return static_cast<int>(g.states.size()) - 1;
  };
  int s0 = add("s0", Owner::ego);
  int s1 = add("s1", Owner::env);
  int s2 = add("s2", Owner::env);
  int s3 = add("s3", Owner::ego);
  int top = add("top", Owner::env);
  int bot = add("bot", Owner::env);
  auto dirac = [&](int target) {
    return std::vector<Transition>{{target, Prob::from_rational(1, 1)}};
  };
  g.states[s0].actions.push_back({0, dirac(s1)});
  g.states[s0].actions.push_back({1, dirac(s2)});
  g.states[s1].actions.push_back(
      {0, {{top, Prob::from_rational(1, 3)}, {bot, Prob::from_rational(2, 3)}}});
  g.states[s1].actions.push_back({1, dirac(s3)});
  g.states[s2].actions.push_back({0, dirac(s3)});
  g.states[s3].actions.push_back(
      {0, {{top, Prob::from_rational(1, 3)}, {bot, Prob::from_rational(2, 3)}}});
  g.states[s3].actions.push_back({1, dirac(bot)});
  g.initial = s0;
  g.reindex();
  return g;
}

inline CoreSG fig2_core() {
  StochasticGame g = fig2_game();
  PruneResult r = build_core(g, make_trivial_monitor(), make_reach_monitor(g, "top"), 4);
  return *r.core;
}

/// Minimal one-decision MDP: a reaches top, b reaches bot.
inline CoreSG fig4a_core() {
  CoreBuilder b;
  int s0 = b.add(Owner::ego, 0);
  b.edge(s0, 0, {{CoreBuilder::kTop, 1.0}});
  b.edge(s0, 1, {{CoreBuilder::kBot, 1.0}});
  return b.build(s0);
}

/// Env node where different actions refute different coordinates: branch a
/// offers entropy (two equivalent ego actions, p = 0.3), branch b offers
/// performance (no ego choice, p = 0.9). Every ego policy guarantees exactly
/// (p, h) = (0.3, 0).
inline CoreSG coordinate_split_core() {
  CoreBuilder b;
  int root = b.add(Owner::ego, 0);
  int env = b.add(Owner::env, 1);
  int choice = b.add(Owner::ego, 2);
  b.edge(root, 0, {{env, 1.0}});
  b.edge(env, 0, {{choice, 1.0}});
  b.edge(env, 1, {{CoreBuilder::kTop, 0.9}, {CoreBuilder::kBot, 0.1}});
  b.edge(choice, 0, {{CoreBuilder::kTop, 0.3}, {CoreBuilder::kBot, 0.7}});
  b.edge(choice, 1, {{CoreBuilder::kTop, 0.3}, {CoreBuilder::kBot, 0.7}});
  return b.build(root);
}

/// Re-expresses a core as a plain stochastic game (states named by node
/// index, terminals "top"/"bot"), so pipeline stages can be driven with
/// generated structures.
inline StochasticGame game_from_core(const CoreSG& core) {
  StochasticGame g;
  g.action_names = core.action_names;
  for (int n = 0; n < core.size(); ++n) {
    std::string id = n == core.top ? "top" : n == core.bot ? "bot" : "n" + std::to_string(n);
    g.states.push_back({id, core.nodes[n].owner, {}, false, id});
  }
  for (int n = 0; n < core.size(); ++n)
    for (const auto& e : core.nodes[n].edges) {
      GameAction act{e.action, {}};
      for (const auto& [m, p] : e.succ) act.support.push_back({m, Prob::from_double(p)});
      g.states[n].actions.push_back(std::move(act));
    }
  g.initial = core.initial;
  g.reindex();
  return g;
}

/// Absorbing avoid-monitor: rejects every path that visits one of the given
/// state ids.
inline Monitor make_avoid_monitor(const StochasticGame& game,
                                  const std::vector<std::string>& bad) {
  Monitor m;
  m.mstates = {"ok", "bad"};
  m.init = 0;
  m.accepting = {true, false};
  for (const auto& s : game.states) {
    bool is_bad = std::find(bad.begin(), bad.end(), s.id) != bad.end();
    m.delta[{0, s.id}] = is_bad ? 1 : 0;
    m.delta[{1, s.id}] = 1;
  }
  return m;
}

/// Env choice between a two-action and a three-action all-top subtree; the
/// guaranteed entropy is ln 2 and the worst-case-entropy play is branch a.
inline CoreSG fig6_style_core() {
  CoreBuilder b;
  int root = b.add(Owner::ego, 0);
  int env = b.add(Owner::env, 1);
  int two = b.add(Owner::ego, 2);
  int three = b.add(Owner::ego, 2);
  b.edge(root, 0, {{env, 1.0}});
  b.edge(env, 0, {{two, 1.0}});
  b.edge(env, 1, {{three, 1.0}});
  for (int a = 0; a < 2; ++a) b.edge(two, a, {{CoreBuilder::kTop, 1.0}});
  for (int a = 0; a < 3; ++a) b.edge(three, a, {{CoreBuilder::kTop, 1.0}});
  return b.build(root);
}

}  // namespace erci::testing
