#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "erci/rational.hpp"

namespace erci {

enum class Owner { ego, env };

inline const char* owner_name(Owner o) { return o == Owner::ego ? "ego" : "env"; }

/// Transition probability. Kept both as a double (all solver arithmetic) and,
/// when the input was given as num/den, as an exact rational (validation only).
struct Prob {
  double value = 0.0;
  std::optional<Rational> exact;

  static Prob from_double(double v) { return Prob{v, std::nullopt}; }
  static Prob from_rational(std::int64_t num, std::int64_t den) {
    auto r = Rational::make(num, den);
    if (!r) return Prob{-1.0, std::nullopt};
    return Prob{r->value(), r};
  }
};

struct Transition {
  int target = -1;
  Prob prob;
};

/// One enabled action at a state together with its successor distribution.
struct GameAction {
  int action = -1;
  std::vector<Transition> support;
};

struct GameState {
  std::string id;
  Owner owner = Owner::ego;
  std::vector<GameAction> actions;  // sorted by action index; empty set = terminal
  bool inserted = false;            // pass-through added by normalize_alternation
  std::string origin;               // original state id (== id for original states)
};

/// Turn-based stochastic game. Chance lives inside the transition
/// distributions; states carry an ego/env ownership tag and terminal states
/// are exactly the states with no enabled action.
struct StochasticGame {
  std::vector<GameState> states;
  std::vector<std::string> action_names;
  int initial = -1;

  int state_index(const std::string& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? -1 : it->second;
  }
  int action_index(const std::string& name) const {
    for (std::size_t i = 0; i < action_names.size(); ++i)
      if (action_names[i] == name) return static_cast<int>(i);
    return -1;
  }
  bool is_terminal(int s) const { return states[s].actions.empty(); }

  /// Rebuilds the id -> index map; call after mutating states.
  void reindex();

 private:
  std::unordered_map<std::string, int> index_;
};

struct Issue {
  std::string code;
  std::string where;    // "state" or "state/action"
  std::string message;
};

/// Errors empty iff the game satisfies every structural invariant
/// (including alternation). Dead states are reported as warnings.
struct ValidationReport {
  std::vector<Issue> errors;
  std::vector<Issue> warnings;
  bool ok() const { return errors.empty(); }
};

/// Lists every invariant violation, ordered by state id then action.
/// Checked: distributions sum to one (exactly when given as rationals,
/// within 1e-12 otherwise), probabilities positive, ego-owned initial state,
/// nonempty supports, valid references, strict ego/env alternation on edges
/// between non-terminal states.
ValidationReport validate_game(const StochasticGame& game);

/// Returns an equivalent game in which ego and env strictly alternate,
/// obtained by inserting fresh single-action pass-through states with Dirac
/// transitions. Inserted states contribute zero causal entropy and leave all
/// path probabilities unchanged. Unreachable states are dropped. Idempotent.
StochasticGame normalize_alternation(const StochasticGame& game);

/// Successor distribution of (s, action). Throws UnknownAction when the
/// action is not enabled at s.
const std::vector<Transition>& successors(const StochasticGame& game, int s, int action);
const std::vector<Transition>& successors(const StochasticGame& game, const std::string& state_id,
                                          const std::string& action_name);

}  // namespace erci
