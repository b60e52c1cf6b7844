#include "erci/bench_drone.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <set>

#include "erci/errors.hpp"

namespace erci {

namespace {

struct Cell {
  int x = 0;
  int y = 0;
  bool operator==(const Cell&) const = default;
  auto operator<=>(const Cell&) const = default;
};

// Patrol circuit: the rectangle through the four houses, as an ordered cycle
// (left edge up, top edge right, right edge down, bottom edge left).
std::vector<Cell> circuit_cells(int a, int b) {
  std::vector<Cell> cycle;
  Cell c{a, a};
  do {
    cycle.push_back(c);
    if (c.x == a && c.y < b)
      c.y += 1;
    else if (c.y == b && c.x < b)
      c.x += 1;
    else if (c.x == b && c.y > a)
      c.y -= 1;
    else
      c.x -= 1;
  } while (!(c == Cell{a, a}));
  return cycle;
}

struct DroneState {
  Cell ego;
  Cell env;
  bool cw = true;
  bool ego_turn = true;
  auto operator<=>(const DroneState&) const = default;
};

std::string state_id(const DroneState& s) {
  return std::string(s.ego_turn ? "ego" : "env") + "_e" + std::to_string(s.ego.x) + "x" +
         std::to_string(s.ego.y) + "_d" + std::to_string(s.env.x) + "x" +
         std::to_string(s.env.y) + (s.cw ? "_cw" : "_ccw");
}

}  // namespace

DroneBenchmark gen_drone_benchmark(const BenchmarkSpec& spec) {
  if (spec.k < 4) fail("SpecInvalid", "grid side must be at least 4");
  if (spec.horizon < 1) fail("SpecInvalid", "horizon must be at least 1");
  if (!(spec.lo <= spec.hi) || spec.lo < 0.01 - 1e-12 || spec.hi > 0.02 + 1e-12)
    fail("SpecInvalid", "drift interval must lie inside [1/100, 1/50]");

  const int a = spec.k / 3;
  const int b = 2 * spec.k / 3;
  DroneBenchmark out;
  out.houses = {{a, a}, {a, b}, {b, b}, {b, a}};
  std::set<Cell> houses;
  for (auto [hx, hy] : out.houses) houses.insert(Cell{hx, hy});

  const std::vector<Cell> cycle = circuit_cells(a, b);
  std::map<Cell, int> cycle_index;
  for (std::size_t i = 0; i < cycle.size(); ++i) cycle_index[cycle[i]] = static_cast<int>(i);
  const int cycle_len = static_cast<int>(cycle.size());
  auto circuit_step = [&](const Cell& c, bool cw) {
    int i = cycle_index.at(c);
    return cycle[(i + (cw ? 1 : cycle_len - 1)) % cycle_len];
  };

  StochasticGame& game = out.game;
  game.action_names = {"stay", "up", "down", "left", "right", "patrol", "drift_lo", "drift_hi"};
  const int kStay = 0, kPatrol = 5, kDriftLo = 6, kDriftHi = 7;

  // Probabilities as exact rationals where cleanly representable.
  auto drift_prob = [&](double q) {
    long long den = std::llround(1.0 / q);
    if (std::abs(1.0 / static_cast<double>(den) - q) < 1e-12)
      return Prob::from_rational(1, den);
    return Prob::from_double(q);
  };
  auto keep_prob = [&](double q) {
    long long den = std::llround(1.0 / q);
    if (std::abs(1.0 / static_cast<double>(den) - q) < 1e-12)
      return Prob::from_rational(den - 1, den);
    return Prob::from_double(1.0 - q);
  };

  DroneState init{{0, 0}, {b, b}, true, true};

  std::map<DroneState, int> index;
  std::deque<DroneState> queue{init};
  index[init] = 0;
  game.states.push_back({state_id(init), Owner::ego, {}, false, state_id(init)});

  auto intern = [&](const DroneState& s) {
    auto it = index.find(s);
    if (it != index.end()) return it->second;
    int idx = static_cast<int>(game.states.size());
    index[s] = idx;
    game.states.push_back(
        {state_id(s), s.ego_turn ? Owner::ego : Owner::env, {}, false, state_id(s)});
    queue.push_back(s);
    return idx;
  };

  while (!queue.empty()) {
    DroneState s = queue.front();
    queue.pop_front();
    int idx = index.at(s);
    // intern() may grow game.states, so finish building each action before
    // touching game.states[idx] again.
    std::vector<GameAction> actions;
    if (s.ego_turn) {
      const int dxs[5] = {0, 0, 0, -1, 1};
      const int dys[5] = {0, 1, -1, 0, 0};
      for (int m = 0; m < 5; ++m) {
        Cell next{s.ego.x + dxs[m], s.ego.y + dys[m]};
        if (next.x < 0 || next.y < 0 || next.x >= spec.k || next.y >= spec.k) continue;
        DroneState t = s;
        t.ego = next;
        t.ego_turn = false;
        int target = intern(t);
        actions.push_back({kStay + m, {{target, Prob::from_rational(1, 1)}}});
      }
    } else {
      bool at_house = houses.count(s.env) > 0;
      auto move_env = [&](bool cw) {
        DroneState t = s;
        t.cw = cw;
        t.env = circuit_step(s.env, cw);
        t.ego_turn = true;
        return intern(t);
      };
      if (!at_house) {
        int target = move_env(s.cw);
        actions.push_back({kPatrol, {{target, Prob::from_rational(1, 1)}}});
      } else {
        auto drift_edge = [&](double q) {
          int keep = move_env(s.cw);
          int flip = move_env(!s.cw);
          std::vector<Transition> support;
          if (keep == flip) {
            support.push_back({keep, Prob::from_rational(1, 1)});
          } else {
            support.push_back({keep, keep_prob(q)});
            support.push_back({flip, drift_prob(q)});
          }
          return support;
        };
        if (spec.mode == DriftMode::point) {
          actions.push_back({kPatrol, drift_edge(spec.lo)});
        } else {
          actions.push_back({kDriftLo, drift_edge(spec.lo)});
          actions.push_back({kDriftHi, drift_edge(spec.hi)});
        }
      }
    }
    game.states[idx].actions = std::move(actions);
  }
  game.initial = 0;
  game.reindex();

  out.hard = make_trivial_monitor();

  // Soft monitor: visited-house bitmask plus an absorbing crash state.
  Monitor& soft = out.soft;
  for (int mask = 0; mask < 16; ++mask) soft.mstates.push_back("m" + std::to_string(mask));
  soft.mstates.push_back("crash");
  const int kCrash = 16;
  soft.init = 0;
  soft.accepting.assign(17, false);
  soft.accepting[15] = true;
  auto house_bit = [&](const Cell& c) {
    for (std::size_t i = 0; i < out.houses.size(); ++i)
      if (Cell{out.houses[i].first, out.houses[i].second} == c) return 1 << i;
    return 0;
  };
  for (const auto& [state, unused] : index) {
    (void)unused;
    const std::string id = state_id(state);
    bool crash = state.ego == state.env;
    int bit = house_bit(state.ego);
    for (int mask = 0; mask < 16; ++mask)
      soft.delta[{mask, id}] = crash ? kCrash : (mask | bit);
    soft.delta[{kCrash, id}] = kCrash;
  }
  return out;
}

}  // namespace erci
