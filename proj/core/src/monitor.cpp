#include "erci/monitor.hpp"

#include "erci/errors.hpp"

namespace erci {

int monitor_step(const Monitor& m, int q, const std::string& observed_state_id) {
  if (q < 0 || q >= static_cast<int>(m.mstates.size()))
    fail("UnknownMonitorState", "monitor state index " + std::to_string(q));
  auto it = m.delta.find({q, observed_state_id});
  if (it != m.delta.end()) return it->second;
  if (m.fallback) return *m.fallback;
  fail("UnknownGameState",
       "no monitor transition from " + m.mstates[q] + " on observation " + observed_state_id);
}

bool classify(const Monitor& m, int q) {
  if (q < 0 || q >= static_cast<int>(m.mstates.size()))
    fail("UnknownMonitorState", "monitor state index " + std::to_string(q));
  return m.accepting[q];
}

Monitor make_trivial_monitor() {
  Monitor m;
  m.mstates = {"ok"};
  m.init = 0;
  m.accepting = {true};
  m.fallback = 0;
  return m;
}

Monitor make_reach_monitor(const StochasticGame& game, const std::string& target_state_id) {
  Monitor m;
  m.mstates = {"seeking", "seen"};
  m.init = 0;
  m.accepting = {false, true};
  for (const auto& state : game.states) {
    bool hit = state.id == target_state_id;
    m.delta[{0, state.id}] = hit ? 1 : 0;
    m.delta[{1, state.id}] = 1;
  }
  return m;
}

CompiledMonitor::CompiledMonitor(const Monitor& m, const StochasticGame& game) {
  num_mstates_ = static_cast<int>(m.mstates.size());
  num_states_ = static_cast<int>(game.states.size());
  init_ = m.init;
  if (init_ < 0 || init_ >= num_mstates_) fail("UnknownMonitorState", "bad monitor init state");
  accepting_.assign(m.accepting.begin(), m.accepting.end());
  table_.resize(static_cast<std::size_t>(num_mstates_) * num_states_);
  for (int q = 0; q < num_mstates_; ++q) {
    for (int s = 0; s < num_states_; ++s) {
      const GameState& state = game.states[s];
      int next;
      if (state.inserted) {
        next = q;  // pass-through states are not part of the observation alphabet
      } else {
        next = monitor_step(m, q, state.id);
        if (next < 0 || next >= num_mstates_)
          fail("UnknownMonitorState", "delta target out of range for " + m.mstates[q]);
      }
      table_[static_cast<std::size_t>(q) * num_states_ + s] = next;
    }
  }
}

}  // namespace erci
