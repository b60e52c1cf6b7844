#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "erci/game.hpp"

namespace erci {

/// Deterministic finite monitor over observed game states. Acceptance is
/// decided only when a path terminates or reaches the horizon, so the path
/// set a monitor describes is prefix free by construction.
struct Monitor {
  std::vector<std::string> mstates;
  int init = -1;
  std::vector<bool> accepting;                       // indexed like mstates
  std::map<std::pair<int, std::string>, int> delta;  // (mstate, observed state id) -> mstate
  std::optional<int> fallback;                       // target for unlisted pairs

  int mstate_index(const std::string& id) const {
    for (std::size_t i = 0; i < mstates.size(); ++i)
      if (mstates[i] == id) return static_cast<int>(i);
    return -1;
  }
};

/// One observation step. Throws UnknownMonitorState / UnknownGameState.
int monitor_step(const Monitor& m, int q, const std::string& observed_state_id);

/// Acceptance at termination/horizon.
bool classify(const Monitor& m, int q);

/// Single always-accepting state; usable as a vacuous hard constraint.
Monitor make_trivial_monitor();

/// Two-state reach monitor ("seeking"/"seen") for paths that visit the given
/// state; deltas are written out explicitly for every state of the game.
Monitor make_reach_monitor(const StochasticGame& game, const std::string& target_state_id);

/// Monitor with the step function resolved into a dense table for one game.
/// Inserted pass-through states (normalize_alternation) are transparent:
/// observing them leaves the monitor state unchanged.
class CompiledMonitor {
 public:
  CompiledMonitor(const Monitor& m, const StochasticGame& game);

  int init() const { return init_; }
  int num_mstates() const { return num_mstates_; }
  int step(int q, int state) const { return table_[static_cast<std::size_t>(q) * num_states_ + state]; }
  bool accepts(int q) const { return accepting_[q]; }

 private:
  int num_mstates_ = 0;
  int num_states_ = 0;
  int init_ = 0;
  std::vector<int> table_;
  std::vector<bool> accepting_;
};

}  // namespace erci
