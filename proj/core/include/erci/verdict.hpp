#pragma once

#include <cmath>
#include <limits>

#include "erci/policy_eval.hpp"

namespace erci {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Feasibility { realizable, unrealizable, unknown };

inline const char* feasibility_name(Feasibility f) {
  switch (f) {
    case Feasibility::realizable: return "realizable";
    case Feasibility::unrealizable: return "unrealizable";
    default: return "unknown";
  }
}

/// Point target (p, h) or regret target (epsilon, delta); regret targets are
/// resolved against the front endpoints before the search starts.
struct Target {
  bool regret = false;
  double p = 0.0;
  double h = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;

  static Target point(double p, double h) { return Target{false, p, h, 0, 0}; }
  static Target regret_of(double eps, double del) { return Target{true, 0, 0, eps, del}; }
};

/// Realizability decision with a machine-checkable witness.
///
/// realizable: a single front point x1 (weight == 1) or a witness pair
///   (x1 at lambda1, x2 at lambda2, mixed with `weight` on x1) dominating
///   the target.
/// unrealizable: a front point `dominating` that optimizes the scalarization
///   weight_p * p + weight_h * h, with
///   weight_p * p + weight_h * h < weight_p * target.p + weight_h * target.h.
/// unknown: the bracketing interval / resolution the search stopped at.
struct Verdict {
  Feasibility kind = Feasibility::unknown;
  Point target;  // resolved point form

  // realizable
  double lambda1 = std::numeric_limits<double>::quiet_NaN();
  double lambda2 = std::numeric_limits<double>::quiet_NaN();
  double weight = 1.0;
  Point x1, x2;
  bool pair = false;

  // unrealizable
  Point dominating;
  double weight_p = 0.0;
  double weight_h = 0.0;
  double margin = 0.0;  // J(target) - J(dominating) under the weights

  // unknown
  double bracket_lo = std::numeric_limits<double>::quiet_NaN();
  double bracket_hi = std::numeric_limits<double>::quiet_NaN();
  double gap = std::numeric_limits<double>::quiet_NaN();

  // error band the producing solver certified on the p axis
  // (0 for exact MDP verdicts, kappa * tau for table-based ones)
  double p_error_band = 0.0;
  double kappa = std::numeric_limits<double>::quiet_NaN();

  Point witness_point() const {
    return pair ? mix_points(x1, x2, weight) : x1;
  }
};

struct FrontSample {
  double lambda = 0;
  double h = 0;
  double p = 0;
};

}  // namespace erci
