#pragma once

#include "erci/game.hpp"
#include "erci/monitor.hpp"

namespace erci {

enum class DriftMode { point, interval };

/// Delivery-drone grid benchmark. Ego starts in the bottom-left cell and
/// moves deterministically in the 4-neighborhood (plus stay). The env drone
/// patrols the four houses at {k/3, 2k/3}^2 along the rectangle through
/// them, clockwise or counter-clockwise; on every house arrival the
/// orientation flips with a small probability. In point mode the flip is a
/// chance event at probability lo; in interval mode env chooses between the
/// two extreme probabilities lo and hi. Soft constraint: ego visits all four
/// houses and the drones never share a cell; hard constraint: trivial.
struct BenchmarkSpec {
  int k = 4;
  int horizon = 6;
  double lo = 0.01;
  double hi = 0.02;
  DriftMode mode = DriftMode::point;
};

struct DroneBenchmark {
  StochasticGame game;
  Monitor hard;
  Monitor soft;
  std::vector<std::pair<int, int>> houses;
};

/// Throws SpecInvalid for k < 4, horizon < 1 or a drift interval outside
/// [1/100, 1/50]. Output is deterministic: same spec, same game, field by
/// field.
DroneBenchmark gen_drone_benchmark(const BenchmarkSpec& spec);

}  // namespace erci
