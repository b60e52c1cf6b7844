#include "erci/game.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "erci/errors.hpp"

namespace erci {

void StochasticGame::reindex() {
  index_.clear();
  index_.reserve(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) index_[states[i].id] = static_cast<int>(i);
}

namespace {

constexpr double kDistTolerance = 1e-12;

std::vector<bool> reachable_set(const StochasticGame& game) {
  std::vector<bool> seen(game.states.size(), false);
  if (game.initial < 0 || game.initial >= static_cast<int>(game.states.size())) return seen;
  std::deque<int> queue{game.initial};
  seen[game.initial] = true;
  while (!queue.empty()) {
    int s = queue.front();
    queue.pop_front();
    for (const auto& act : game.states[s].actions)
      for (const auto& tr : act.support)
        if (tr.target >= 0 && tr.target < static_cast<int>(game.states.size()) && !seen[tr.target]) {
          seen[tr.target] = true;
          queue.push_back(tr.target);
        }
  }
  return seen;
}

}  // namespace

ValidationReport validate_game(const StochasticGame& game) {
  ValidationReport report;
  auto error = [&](std::string code, std::string where, std::string msg) {
    report.errors.push_back({std::move(code), std::move(where), std::move(msg)});
  };

  if (game.states.empty()) {
    error("EMPTY_GAME", "", "game has no states");
    return report;
  }
  if (game.initial < 0 || game.initial >= static_cast<int>(game.states.size())) {
    error("NO_INITIAL", "", "initial state missing or unknown");
  } else if (game.states[game.initial].owner != Owner::ego) {
    error("INIT_OWNER", game.states[game.initial].id, "initial state must be ego-owned");
  }

  // Deterministic report order: states sorted by id, actions by index.
  std::vector<int> order(game.states.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return game.states[a].id < game.states[b].id; });

  for (int s : order) {
    const GameState& state = game.states[s];
    for (const auto& act : state.actions) {
      std::string where = state.id + "/" +
                          (act.action >= 0 && act.action < static_cast<int>(game.action_names.size())
                               ? game.action_names[act.action]
                               : "?");
      if (act.action < 0 || act.action >= static_cast<int>(game.action_names.size())) {
        error("UNKNOWN_ACTION", where, "action index out of range");
        continue;
      }
      if (act.support.empty()) {
        error("EMPTY_SUPPORT", where, "transition has empty support");
        continue;
      }
      bool all_exact = true;
      double sum = 0;
      std::optional<Rational> exact_sum = Rational{0, 1};
      for (const auto& tr : act.support) {
        if (tr.target < 0 || tr.target >= static_cast<int>(game.states.size())) {
          error("UNKNOWN_STATE", where, "transition target out of range");
          continue;
        }
        if (!(tr.prob.value > 0.0)) {
          error("NEG_PROB", where, "probabilities must be positive, got " +
                                        std::to_string(tr.prob.value) + " -> " +
                                        game.states[tr.target].id);
        }
        sum += tr.prob.value;
        if (tr.prob.exact && exact_sum) {
          exact_sum = rational_add(*exact_sum, *tr.prob.exact);
        } else {
          all_exact = false;
        }
      }
      if (all_exact && exact_sum) {
        if (!rational_is_one(*exact_sum))
          error("DIST_SUM", where,
                "exact distribution sums to " + std::to_string(exact_sum->num) + "/" +
                    std::to_string(exact_sum->den));
      } else if (std::abs(sum - 1.0) > kDistTolerance) {
        error("DIST_SUM", where, "distribution sums to " + std::to_string(sum));
      }

      // Alternation: edges between non-terminal states must switch owner.
      for (const auto& tr : act.support) {
        if (tr.target < 0 || tr.target >= static_cast<int>(game.states.size())) continue;
        const GameState& target = game.states[tr.target];
        if (!target.actions.empty() && target.owner == state.owner) {
          error("NONALT", where,
                "edge to " + target.id + " does not alternate (" +
                    owner_name(state.owner) + " -> " + owner_name(target.owner) + ")");
        }
      }
    }
  }

  auto seen = reachable_set(game);
  for (int s : order) {
    if (!seen[s])
      report.warnings.push_back({"DEAD_STATE", game.states[s].id,
                                 "state unreachable from initial; it will be pruned"});
  }
  return report;
}

StochasticGame normalize_alternation(const StochasticGame& game) {
  StochasticGame out;
  out.action_names = game.action_names;

  auto seen = reachable_set(game);
  std::vector<int> remap(game.states.size(), -1);
  for (std::size_t s = 0; s < game.states.size(); ++s) {
    if (!seen[s]) continue;
    remap[s] = static_cast<int>(out.states.size());
    GameState copy = game.states[s];
    if (copy.origin.empty()) copy.origin = copy.id;
    copy.actions.clear();
    out.states.push_back(std::move(copy));
  }
  out.initial = remap[game.initial];

  int pass_action = -1;
  auto ensure_pass_action = [&]() {
    if (pass_action >= 0) return pass_action;
    std::string name = "pass";
    while (std::find(out.action_names.begin(), out.action_names.end(), name) !=
           out.action_names.end())
      name += "_";
    pass_action = static_cast<int>(out.action_names.size());
    out.action_names.push_back(name);
    return pass_action;
  };

  int fresh = 0;
  for (std::size_t s = 0; s < game.states.size(); ++s) {
    if (!seen[s]) continue;
    const GameState& src = game.states[s];
    for (const auto& act : src.actions) {
      GameAction copy{act.action, {}};
      for (const auto& tr : act.support) {
        const GameState& target = game.states[tr.target];
        bool needs_split = !target.actions.empty() && target.owner == src.owner;
        if (!needs_split) {
          copy.support.push_back({remap[tr.target], tr.prob});
          continue;
        }
        // Insert a single-action pass-through owned by the other player.
        GameState mid;
        mid.id = src.id + "__alt" + std::to_string(fresh++);
        mid.owner = src.owner == Owner::ego ? Owner::env : Owner::ego;
        mid.inserted = true;
        mid.origin = target.origin.empty() ? target.id : target.origin;
        mid.actions.push_back({ensure_pass_action(), {{remap[tr.target], Prob::from_rational(1, 1)}}});
        int mid_idx = static_cast<int>(out.states.size());
        out.states.push_back(std::move(mid));
        copy.support.push_back({mid_idx, tr.prob});
      }
      out.states[remap[s]].actions.push_back(std::move(copy));
    }
  }
  out.reindex();
  return out;
}

const std::vector<Transition>& successors(const StochasticGame& game, int s, int action) {
  if (s < 0 || s >= static_cast<int>(game.states.size()))
    fail("UnknownState", "state index " + std::to_string(s));
  for (const auto& act : game.states[s].actions)
    if (act.action == action) return act.support;
  fail("UnknownAction", "action " +
                            (action >= 0 && action < static_cast<int>(game.action_names.size())
                                 ? game.action_names[action]
                                 : std::to_string(action)) +
                            " not enabled at " + game.states[s].id);
}

const std::vector<Transition>& successors(const StochasticGame& game, const std::string& state_id,
                                          const std::string& action_name) {
  int s = game.state_index(state_id);
  if (s < 0) fail("UnknownState", "no state with id " + state_id);
  int a = game.action_index(action_name);
  if (a < 0) fail("UnknownAction", "no action named " + action_name);
  return successors(game, s, a);
}

}  // namespace erci
