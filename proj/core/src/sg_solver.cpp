#include "erci/sg_solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <thread>

#include "erci/errors.hpp"
#include "erci/logging.hpp"
#include "erci/mdp_solver.hpp"

namespace erci {

namespace {

constexpr double kArgmaxTol = 1e-9;
constexpr double kTieNoise = 1e-12;  // exact-tie noise floor for ambiguity tests

void parallel_for(int count, int jobs, const std::function<void(int)>& fn) {
  if (jobs <= 1 || count < 2 * jobs) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> workers;
  workers.reserve(jobs);
  for (int j = 0; j < jobs; ++j) {
    workers.emplace_back([&, j] {
      for (int i = j; i < count; i += jobs) fn(i);
    });
  }
  for (auto& w : workers) w.join();
}

double smax(const std::vector<double>& xs) {
  double m = *std::max_element(xs.begin(), xs.end());
  double acc = 0;
  for (double x : xs) acc += std::exp(x - m);
  return m + std::log(acc);
}

/// Chord value of a grid-indexed curve (h nonincreasing with the index) at a
/// given entropy; flat extension below the min-entropy endpoint.
double curve_value(const std::vector<Point>& c, double h) {
  if (h >= c.front().h) return c.front().p;
  if (h <= c.back().h) return c.back().p;
  int lo = 0;
  int hi = static_cast<int>(c.size()) - 1;
  // invariant: c[lo].h >= h > c[hi].h
  while (hi - lo > 1) {
    int mid = (lo + hi) / 2;
    if (c[mid].h >= h)
      lo = mid;
    else
      hi = mid;
  }
  double dh = c[lo].h - c[hi].h;
  if (dh <= 1e-15) return std::max(c[lo].p, c[hi].p);
  double w = (h - c[hi].h) / dh;
  return w * c[lo].p + (1 - w) * c[hi].p;
}

}  // namespace

FrontTable FrontTables::table(int node) const {
  FrontTable t;
  t.node = node;
  t.kappa = kappa_certified;
  t.samples.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    t.samples.push_back({grid[i], h_[i][node], p_[i][node]});
  return t;
}

MinEntropyEnvResult min_entropy_env(const CoreSG& core, double lambda) {
  const int n = core.size();
  MinEntropyEnvResult out;
  out.env.assign(n, -1);
  out.h.assign(n, 0.0);
  out.p.assign(n, 0.0);
  std::vector<double> soft(n, 0.0);  // V for the ego backup (finite lambda)
  const bool inf = std::isinf(lambda);
  out.p[core.top] = 1.0;
  soft[core.top] = inf ? 1.0 : lambda;

  for (int i = n - 1; i >= 0; --i) {
    const CoreNode& node = core.nodes[i];
    if (node.edges.empty()) continue;
    const std::size_t k = node.edges.size();
    std::vector<double> eh(k, 0.0), ep(k, 0.0), ev(k, 0.0);
    for (std::size_t e = 0; e < k; ++e)
      for (const auto& [m, pr] : node.edges[e].succ) {
        eh[e] += pr * out.h[m];
        ep[e] += pr * out.p[m];
        ev[e] += pr * soft[m];
      }
    if (node.owner == Owner::env) {
      int best = 0;
      for (std::size_t e = 1; e < k; ++e) {
        if (eh[e] < eh[best] || (eh[e] == eh[best] && ep[e] < ep[best])) best = static_cast<int>(e);
      }
      out.env[i] = best;
      out.h[i] = eh[best];
      out.p[i] = ep[best];
      soft[i] = ev[best];
    } else if (!inf) {
      double v = smax(ev);
      soft[i] = v;
      double h = 0, p = 0;
      for (std::size_t e = 0; e < k; ++e) {
        double s = std::exp(ev[e] - v);
        if (s <= 0) continue;
        h += s * (-std::log(s) + eh[e]);
        p += s * ep[e];
      }
      out.h[i] = h;
      out.p[i] = p;
    } else {
      double best = *std::max_element(ev.begin(), ev.end());
      int ties = 0;
      for (double q : ev)
        if (q >= best - kArgmaxTol) ++ties;
      double h = std::log(static_cast<double>(ties)), p = 0;
      for (std::size_t e = 0; e < k; ++e) {
        if (ev[e] < best - kArgmaxTol) continue;
        h += (eh[e]) / ties;
        p += ep[e] / ties;
      }
      soft[i] = best;
      out.h[i] = h;
      out.p[i] = p;
    }
  }
  return out;
}

namespace {

std::vector<Point> branch_curve_impl(const CoreSG& core, const FrontTables& t, int node,
                                     int edge) {
  const auto& succ = core.nodes[node].edges[edge].succ;
  const int G = t.grid_size();
  std::vector<Point> curve(G);
  for (int gi = 0; gi < G; ++gi) {
    double h = 0, p = 0;
    for (const auto& [m, pr] : succ) {
      h += pr * t.h_[gi][m];
      p += pr * t.p_[gi][m];
    }
    curve[gi] = {p, h};
  }
  // Guard against floating-point wiggle: child tables are monotone, so the
  // expectation must be as well.
  for (int gi = 1; gi < G; ++gi) {
    curve[gi].h = std::min(curve[gi].h, curve[gi - 1].h);
    curve[gi].p = std::max(curve[gi].p, curve[gi - 1].p);
  }
  return curve;
}

/// J_lambda argmax over the pointwise minimum of the branch curves,
/// restricted to the common entropy domain [0, min over branches of h_max].
Point env_sample(const std::vector<std::vector<Point>>& branches, double lambda) {
  double hcap = std::numeric_limits<double>::infinity();
  for (const auto& b : branches) hcap = std::min(hcap, b.front().h);
  hcap = std::max(hcap, 0.0);

  std::vector<double> candidates{0.0, hcap};
  for (const auto& b : branches)
    for (const auto& pt : b)
      if (pt.h > 0 && pt.h < hcap) candidates.push_back(pt.h);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  auto min_value = [&](double h) {
    double v = std::numeric_limits<double>::infinity();
    for (const auto& b : branches) v = std::min(v, curve_value(b, h));
    return v;
  };

  if (std::isinf(lambda)) {
    // Lexicographic (max p, then max h) endpoint of the min-curve.
    double pmax = min_value(0.0);
    double hext = 0.0;
    for (std::size_t ci = 0; ci + 1 < candidates.size(); ++ci) {
      double ha = candidates[ci], hb = candidates[ci + 1];
      if (min_value(hb) >= pmax - 1e-12) {
        hext = hb;
        continue;
      }
      // The extension ends inside (ha, hb], where every branch is linear:
      // first crossing of pmax among the falling branches.
      double cut = hb;
      for (const auto& b : branches) {
        double va = curve_value(b, ha), vb = curve_value(b, hb);
        if (vb >= pmax - 1e-12) continue;
        double t = va <= vb + 1e-18 ? 0.0 : (va - pmax) / (va - vb);
        cut = std::min(cut, ha + std::max(0.0, std::min(1.0, t)) * (hb - ha));
      }
      hext = std::max(hext, cut);
      break;
    }
    return Point{pmax, hext};
  }

  double best_phi = -std::numeric_limits<double>::infinity();
  Point best{0, 0};
  auto consider = [&](double h) {
    double p = min_value(h);
    double phi = h + lambda * p;
    if (phi > best_phi) {
      best_phi = phi;
      best = Point{p, h};
    }
  };
  for (double h : candidates) consider(h);
  // Crossings of branch lines inside each candidate interval are the only
  // other vertices of the min-curve.
  for (std::size_t ci = 0; ci + 1 < candidates.size(); ++ci) {
    double ha = candidates[ci], hb = candidates[ci + 1];
    if (hb - ha <= 1e-15) continue;
    for (std::size_t b1 = 0; b1 + 1 < branches.size(); ++b1)
      for (std::size_t b2 = b1 + 1; b2 < branches.size(); ++b2) {
        double a1 = curve_value(branches[b1], ha), c1 = curve_value(branches[b1], hb);
        double a2 = curve_value(branches[b2], ha), c2 = curve_value(branches[b2], hb);
        double denom = (c2 - a2) - (c1 - a1);
        if (std::abs(denom) <= 1e-18) continue;
        double t = (a1 - a2) / denom;
        if (t <= 0 || t >= 1) continue;
        consider(ha + t * (hb - ha));
      }
  }
  return best;
}

FrontTables compute_tables(const CoreSG& core, const std::vector<double>& grid, int jobs) {
  const int N = core.size();
  const int G = static_cast<int>(grid.size());
  FrontTables t;
  t.grid = grid;
  t.h_.assign(G, std::vector<double>(N, 0.0));
  t.p_.assign(G, std::vector<double>(N, 0.0));
  for (int gi = 0; gi < G; ++gi) {
    t.p_[gi][core.top] = 1.0;
    t.p_[gi][core.bot] = 0.0;
  }

  // Nodes grouped by depth, processed deepest-first; nodes inside one layer
  // are independent of each other.
  std::map<int, std::vector<int>, std::greater<>> layers;
  for (int n = 0; n < N; ++n)
    if (!core.is_terminal(n)) layers[core.nodes[n].depth].push_back(n);

  for (const auto& [depth, nodes] : layers) {
    (void)depth;
    parallel_for(static_cast<int>(nodes.size()), jobs, [&](int idx) {
      const int n = nodes[idx];
      const CoreNode& node = core.nodes[n];
      const std::size_t k = node.edges.size();
      if (node.owner == Owner::env && k > 1) {
        std::vector<std::vector<Point>> branches(k);
        for (std::size_t e = 0; e < k; ++e)
          branches[e] = branch_curve_impl(core, t, n, static_cast<int>(e));
        for (int gi = 0; gi < G; ++gi) {
          Point s = env_sample(branches, grid[gi]);
          t.h_[gi][n] = s.h;
          t.p_[gi][n] = s.p;
        }
      } else if (node.owner == Owner::env) {
        // single action: plain expectation
        for (int gi = 0; gi < G; ++gi) {
          double h = 0, p = 0;
          for (const auto& [m, pr] : node.edges[0].succ) {
            h += pr * t.h_[gi][m];
            p += pr * t.p_[gi][m];
          }
          t.h_[gi][n] = h;
          t.p_[gi][n] = p;
        }
      } else {
        for (int gi = 0; gi < G; ++gi) {
          std::vector<double> eh(k, 0.0), ep(k, 0.0);
          for (std::size_t e = 0; e < k; ++e)
            for (const auto& [m, pr] : node.edges[e].succ) {
              eh[e] += pr * t.h_[gi][m];
              ep[e] += pr * t.p_[gi][m];
            }
          if (gi == G - 1) {  // infinity endpoint: uniform over performance argmax
            double best = *std::max_element(ep.begin(), ep.end());
            int ties = 0;
            for (double q : ep)
              if (q >= best - kArgmaxTol) ++ties;
            double h = std::log(static_cast<double>(ties)), p = 0;
            for (std::size_t e = 0; e < k; ++e) {
              if (ep[e] < best - kArgmaxTol) continue;
              h += eh[e] / ties;
              p += ep[e] / ties;
            }
            t.h_[gi][n] = h;
            t.p_[gi][n] = p;
          } else {
            const double lambda = grid[gi];
            std::vector<double> q(k);
            for (std::size_t e = 0; e < k; ++e) q[e] = eh[e] + lambda * ep[e];
            double v = smax(q);
            double h = 0, p = 0;
            for (std::size_t e = 0; e < k; ++e) {
              double s = std::exp(q[e] - v);
              if (s <= 0) continue;
              h += s * (-std::log(s) + eh[e]);
              p += s * ep[e];
            }
            t.h_[gi][n] = h;
            t.p_[gi][n] = p;
          }
        }
      }
    });
  }
  return t;
}

/// Certified interpolation error of one segment: gap between the chord and
/// the scalarization upper bounds the two sample rationalities imply.
double sandwich_gap(double l1, const Point& x1, double l2, const Point& x2) {
  double h1 = x1.h, p1 = x1.p, h2 = x2.h, p2 = x2.p;
  if (h1 - h2 <= 1e-15) return 0.0;
  auto upper = [&](double h) {
    double u = std::numeric_limits<double>::infinity();
    if (l1 > 0) u = std::min(u, p1 + (h1 - h) / l1);
    if (std::isinf(l2))
      u = std::min(u, p2);
    else if (l2 > 0)
      u = std::min(u, p2 + (h2 - h) / l2);
    return u;
  };
  auto chord = [&](double h) { return p1 + (h1 - h) / (h1 - h2) * (p2 - p1); };
  double gap = 0.0;
  for (double h : {h1, h2, 0.5 * (h1 + h2)}) gap = std::max(gap, upper(h) - chord(h));
  // crossing of the two upper lines, when both are finite
  if (l1 > 0 && !std::isinf(l2) && std::abs(1.0 / l2 - 1.0 / l1) > 1e-18) {
    double h = (p2 - p1 + h2 / l2 - h1 / l1) / (1.0 / l2 - 1.0 / l1);
    if (h > h2 && h < h1) gap = std::max(gap, upper(h) - chord(h));
  }
  return std::max(gap, 0.0);
}

}  // namespace

std::vector<Point> branch_curve(const CoreSG& core, const FrontTables& tables, int node,
                                int edge) {
  return branch_curve_impl(core, tables, node, edge);
}

FrontTables compute_front_tables_on_grid(const CoreSG& core, std::vector<double> grid,
                                         int jobs) {
  if (grid.size() < 2 || grid.front() != 0.0 || !std::isinf(grid.back()))
    fail("InvalidArgument", "grid must start at 0 and end at infinity");
  FrontTables tables = compute_tables(core, grid, jobs);
  double certified = 0.0;
  for (int gi = 0; gi + 1 < tables.grid_size(); ++gi)
    for (int n = 0; n < core.size(); ++n)
      certified = std::max(certified,
                           sandwich_gap(tables.grid[gi], tables.at(gi, n), tables.grid[gi + 1],
                                        tables.at(gi + 1, n)));
  tables.kappa_certified = certified;
  tables.kappa_requested = certified;
  return tables;
}

FrontTables build_front_tables(const CoreSG& core, double kappa, const SgConfig& config) {
  if (!(kappa > 0 && kappa < 1)) fail("InvalidKappa", "kappa must lie in (0, 1)");
  std::vector<double> grid{0.0};
  for (double l = 1.0; l < config.lambda_max; l *= 2) grid.push_back(l);
  grid.push_back(config.lambda_max);
  grid.push_back(kInfinity);

  FrontTables tables;
  while (true) {
    tables = compute_tables(core, grid, config.jobs);
    // Refine wherever adjacent samples of any node are more than kappa apart
    // on the p axis.
    std::vector<double> inserts;
    const int G = tables.grid_size();
    for (int gi = 0; gi + 1 < G; ++gi) {
      bool violated = false;
      for (int n = 0; n < core.size() && !violated; ++n)
        if (tables.p_[gi + 1][n] - tables.p_[gi][n] > kappa) violated = true;
      if (!violated) continue;
      double lo = grid[gi], hi = grid[gi + 1];
      inserts.push_back(std::isinf(hi) ? 2.0 * std::max(lo, 1.0) : 0.5 * (lo + hi));
    }
    if (inserts.empty()) break;
    for (double l : inserts) grid.push_back(l);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    if (static_cast<int>(grid.size()) > config.sample_budget)
      fail("ResolutionExhausted", "rationality grid exceeded the sample budget of " +
                                      std::to_string(config.sample_budget));
  }

  tables.kappa_requested = kappa;
  double certified = 0.0;
  for (int gi = 0; gi + 1 < tables.grid_size(); ++gi)
    for (int n = 0; n < core.size(); ++n)
      certified = std::max(certified,
                           sandwich_gap(tables.grid[gi], tables.at(gi, n), tables.grid[gi + 1],
                                        tables.at(gi + 1, n)));
  tables.kappa_certified = certified;
  return tables;
}

Match match_on_curve(const std::vector<Point>& curve, double owed_h) {
  Match m;
  const int G = static_cast<int>(curve.size());
  if (owed_h >= curve.front().h) {
    m.lo = m.hi = 0;
    m.w = 1.0;
    m.h = curve.front().h;
    m.p = curve.front().p;
    return m;
  }
  if (owed_h <= curve.back().h) {  // clamp to the max-performance endpoint
    m.lo = m.hi = G - 1;
    m.w = 1.0;
    m.h = curve.back().h;
    m.p = curve.back().p;
    return m;
  }
  int lo = 0, hi = G - 1;
  while (hi - lo > 1) {  // invariant: curve[lo].h >= owed > curve[hi].h
    int mid = (lo + hi) / 2;
    if (curve[mid].h >= owed_h)
      lo = mid;
    else
      hi = mid;
  }
  // Prefer the largest index on an exact plateau (best performance).
  double dh = curve[lo].h - curve[hi].h;
  if (dh <= 1e-15) {
    m.lo = m.hi = hi;
    m.w = 1.0;
    m.h = curve[hi].h;
    m.p = curve[hi].p;
    return m;
  }
  m.lo = lo;
  m.hi = hi;
  m.w = (owed_h - curve[hi].h) / dh;
  m.h = owed_h;
  m.p = m.w * curve[lo].p + (1 - m.w) * curve[hi].p;
  return m;
}

Match match_rationality(const FrontTable& table, double owed_h) {
  std::vector<Point> curve;
  curve.reserve(table.samples.size());
  for (const auto& s : table.samples) curve.push_back({s.p, s.h});
  return match_on_curve(curve, owed_h);
}

std::vector<double> matching_sigma(const CoreSG& core, const FrontTables& tables, int grid_idx,
                                   int node) {
  const CoreNode& cn = core.nodes[node];
  if (cn.owner != Owner::ego || cn.edges.empty())
    fail("StepOnEnvNode", "sigma is only defined at non-terminal ego nodes");
  const std::size_t k = cn.edges.size();
  std::vector<double> eh(k, 0.0), ep(k, 0.0);
  for (std::size_t e = 0; e < k; ++e)
    for (const auto& [m, pr] : cn.edges[e].succ) {
      eh[e] += pr * tables.h_[grid_idx][m];
      ep[e] += pr * tables.p_[grid_idx][m];
    }
  std::vector<double> sigma(k, 0.0);
  if (grid_idx == tables.grid_size() - 1) {
    double best = *std::max_element(ep.begin(), ep.end());
    int ties = 0;
    for (double q : ep)
      if (q >= best - kArgmaxTol) ++ties;
    for (std::size_t e = 0; e < k; ++e)
      if (ep[e] >= best - kArgmaxTol) sigma[e] = 1.0 / ties;
  } else {
    const double lambda = tables.grid[grid_idx];
    std::vector<double> q(k);
    for (std::size_t e = 0; e < k; ++e) q[e] = eh[e] + lambda * ep[e];
    double v = smax(q);
    for (std::size_t e = 0; e < k; ++e) sigma[e] = std::exp(q[e] - v);
  }
  return sigma;
}

Improviser entropy_matching_policy(std::shared_ptr<const CoreSG> core,
                                   std::shared_ptr<const FrontTables> tables,
                                   const Match& initial) {
  Improviser imp;
  imp.core = std::move(core);
  imp.tables = std::move(tables);
  imp.m1 = initial;
  imp.w = 1.0;
  imp.has_second = false;
  return imp;
}

Improviser mix_policies(std::shared_ptr<const CoreSG> core, PolicyTable pi1, PolicyTable pi2,
                        double w) {
  if (w < 0 || w > 1) fail("InvalidWeight", "mixing weight must be in [0, 1]");
  check_policy(*core, pi1, Owner::ego);
  check_policy(*core, pi2, Owner::ego);
  Improviser imp;
  imp.core = std::move(core);
  imp.pi1 = std::make_shared<PolicyTable>(std::move(pi1));
  imp.pi2 = std::make_shared<PolicyTable>(std::move(pi2));
  imp.w = w;
  imp.has_second = true;
  return imp;
}

namespace {

struct MatchingEval {
  const CoreSG& core;
  const FrontTables& tables;
  const DetPolicy& env;
  std::vector<std::vector<std::optional<Point>>> memo;  // [node][grid]

  MatchingEval(const CoreSG& c, const FrontTables& t, const DetPolicy& e)
      : core(c), tables(t), env(e), memo(c.size(), std::vector<std::optional<Point>>(t.grid_size())) {}

  Point eval(int n, int gi) {
    if (n == core.top) return {1.0, 0.0};
    if (n == core.bot) return {0.0, 0.0};
    if (memo[n][gi]) return *memo[n][gi];
    const CoreNode& node = core.nodes[n];
    Point out{0, 0};
    if (node.owner == Owner::ego) {
      std::vector<double> sigma = matching_sigma(core, tables, gi, n);
      for (std::size_t e = 0; e < node.edges.size(); ++e) {
        if (sigma[e] <= 0) continue;
        double cp = 0, ch = 0;
        for (const auto& [m, pr] : node.edges[e].succ) {
          Point c = eval(m, gi);
          cp += pr * c.p;
          ch += pr * c.h;
        }
        out.p += sigma[e] * cp;
        out.h += sigma[e] * (-std::log(sigma[e]) + ch);
      }
    } else {
      int e = env[n];
      if (e < 0 || e >= static_cast<int>(node.edges.size()))
        fail("InvalidPolicy", "env policy undefined at node " + std::to_string(n));
      double owed = tables.h_[gi][n];
      Match m = match_on_curve(branch_curve_impl(core, tables, n, e), owed);
      for (const auto& [child, pr] : node.edges[e].succ) {
        Point lo = eval(child, m.lo);
        Point hi = m.pure() ? lo : eval(child, m.hi);
        out.p += pr * (m.w * lo.p + (1 - m.w) * hi.p);
        out.h += pr * (m.w * lo.h + (1 - m.w) * hi.h);
      }
    }
    memo[n][gi] = out;
    return out;
  }

  Point eval_match(const Match& m) {
    Point lo = eval(core.initial, m.lo);
    if (m.pure()) return lo;
    Point hi = eval(core.initial, m.hi);
    return mix_points(lo, hi, m.w);
  }
};

}  // namespace

Point exact_matching_eval(const CoreSG& core, const FrontTables& tables, const Match& initial,
                          const DetPolicy& env) {
  MatchingEval ev(core, tables, env);
  return ev.eval_match(initial);
}

Point exact_improviser_eval(const Improviser& imp, const DetPolicy& env) {
  const CoreSG& core = *imp.core;
  if (imp.matching()) {
    MatchingEval ev(core, *imp.tables, env);
    Point a = ev.eval_match(imp.m1);
    if (!imp.has_second) return a;
    Point b = ev.eval_match(imp.m2);
    return mix_points(a, b, imp.w);
  }
  PolicyTable env_table = det_to_table(core, env, Owner::env);
  Point a{performance(core, *imp.pi1, env_table), causal_entropy(core, *imp.pi1, env_table)};
  if (!imp.has_second) return a;
  Point b{performance(core, *imp.pi2, env_table), causal_entropy(core, *imp.pi2, env_table)};
  return mix_points(a, b, imp.w);
}

PolicyTable flatten_improviser(const Improviser& imp) {
  const CoreSG& core = *imp.core;
  PolicyTable out(core.nodes.size());
  if (!imp.matching()) {
    for (int n = 0; n < core.size(); ++n) {
      const CoreNode& node = core.nodes[n];
      if (node.owner != Owner::ego || node.edges.empty()) continue;
      out[n].assign(node.edges.size(), 0.0);
      for (std::size_t e = 0; e < node.edges.size(); ++e) {
        double a = (*imp.pi1)[n][e];
        double b = imp.has_second ? (*imp.pi2)[n][e] : a;
        out[n][e] = imp.w * a + (1 - imp.w) * b;
      }
    }
    return out;
  }
  auto blend_match = [&](int n, const Match& m) {
    std::vector<double> lo = matching_sigma(core, *imp.tables, m.lo, n);
    if (m.pure()) return lo;
    std::vector<double> hi = matching_sigma(core, *imp.tables, m.hi, n);
    for (std::size_t e = 0; e < lo.size(); ++e) lo[e] = m.w * lo[e] + (1 - m.w) * hi[e];
    return lo;
  };
  for (int n = 0; n < core.size(); ++n) {
    const CoreNode& node = core.nodes[n];
    if (node.owner != Owner::ego || node.edges.empty()) continue;
    std::vector<double> a = blend_match(n, imp.m1);
    if (imp.has_second) {
      std::vector<double> b = blend_match(n, imp.m2);
      for (std::size_t e = 0; e < a.size(); ++e) a[e] = imp.w * a[e] + (1 - imp.w) * b[e];
    }
    out[n] = std::move(a);
  }
  return out;
}

SgVerdict sg_pareto_explore(const CoreSG& core, const Target& target, double kappa0,
                            const SgConfig& config) {
  if (!(kappa0 > 0 && kappa0 < 1)) fail("InvalidKappa", "kappa0 must lie in (0, 1)");
  const double tau = std::max(1, core.longest_path);
  const double kappa_min = kappa0 * config.kappa_min_factor;

  SgVerdict out;
  double kappa = kappa0;
  std::shared_ptr<FrontTables> tables;
  Point goal{};

  auto root_curve = [&]() {
    std::vector<Point> c(tables->grid_size());
    for (int gi = 0; gi < tables->grid_size(); ++gi) c[gi] = tables->at(gi, core.initial);
    return c;
  };

  while (true) {
    try {
      tables = std::make_shared<FrontTables>(build_front_tables(core, kappa, config));
    } catch (const Error& err) {
      if (err.code() != "ResolutionExhausted") throw;
      out.verdict.kind = Feasibility::unknown;
      out.verdict.kappa = kappa;
      out.verdict.target = goal;
      out.tables = tables;
      return out;
    }
    const auto curve = root_curve();
    const int G = tables->grid_size();
    Point x0 = curve.front();
    Point xinf = curve.back();
    goal = resolve_target(target, x0, xinf);
    if (target.regret &&
        (target.epsilon < 0 || target.epsilon > 1 || target.delta < 0 || target.delta > 1))
      fail("InvalidTarget", "epsilon and delta must lie in [0, 1]");
    if (goal.p < 0 || goal.p > 1 || goal.h < 0)
      fail("InvalidTarget", "target must satisfy p in [0, 1] and h >= 0");
    out.verdict.target = goal;
    out.verdict.kappa = kappa;
    const double band = kappa * tau;
    out.verdict.p_error_band = band;

    // Entropy ceiling is exact (error only accumulates on the p axis).
    if (goal.h > x0.h + 1e-12) {
      out.verdict.kind = Feasibility::unrealizable;
      out.verdict.dominating = x0;
      out.verdict.weight_p = 0.0;
      out.verdict.weight_h = 1.0;
      out.verdict.margin = goal.h - x0.h;
      out.tables = tables;
      return out;
    }

    Match match = match_on_curve(curve, goal.h);
    if (goal.p <= match.p) {
      out.verdict.kind = Feasibility::realizable;
      // Prefer a single dominating sample over a mixture.
      int single = -1;
      for (int gi = 0; gi < G; ++gi)
        if (dominates(goal, curve[gi])) {
          single = gi;
          break;
        }
      if (single >= 0) {
        Match pure{single, single, 1.0, curve[single].h, curve[single].p};
        out.verdict.pair = false;
        out.verdict.lambda1 = tables->grid[single];
        out.verdict.x1 = curve[single];
        out.verdict.weight = 1.0;
        out.improviser = entropy_matching_policy(std::make_shared<CoreSG>(core), tables, pure);
      } else {
        out.verdict.pair = true;
        out.verdict.lambda1 = tables->grid[match.lo];
        out.verdict.lambda2 = tables->grid[match.hi];
        out.verdict.x1 = curve[match.lo];
        out.verdict.x2 = curve[match.hi];
        out.verdict.weight = match.w;
        out.improviser = entropy_matching_policy(std::make_shared<CoreSG>(core), tables, match);
      }
      out.tables = tables;
      return out;
    }

    // Unrealizable needs the scalarization margin to clear the error band.
    {
      double best_margin = 0.0;
      int best_gi = -1;
      double best_wp = 0, best_wh = 0;
      for (int gi = 0; gi < G; ++gi) {
        double wp, wh;
        if (std::isinf(tables->grid[gi])) {
          wp = 1.0;
          wh = 0.0;
        } else {
          wp = tables->grid[gi];
          wh = 1.0;
        }
        double margin = (wp * goal.p + wh * goal.h) - (wp * curve[gi].p + wh * curve[gi].h) -
                        wp * band;
        if (margin > best_margin) {
          best_margin = margin;
          best_gi = gi;
          best_wp = wp;
          best_wh = wh;
        }
      }
      if (best_gi >= 0) {
        out.verdict.kind = Feasibility::unrealizable;
        out.verdict.dominating = curve[best_gi];
        out.verdict.weight_p = best_wp;
        out.verdict.weight_h = best_wh;
        out.verdict.margin = (best_wp * goal.p + best_wh * goal.h) -
                             (best_wp * curve[best_gi].p + best_wh * curve[best_gi].h);
        out.tables = tables;
        return out;
      }
    }

    // Min-entropy env actions that differ by less than kappa/tau (but are not
    // exact ties) are logged; the intersection combinator keeps the tables
    // sound either way, so only the p-band drives the halving.
    for (int n = 0; n < core.size(); ++n) {
      const CoreNode& node = core.nodes[n];
      if (node.owner != Owner::env || node.edges.size() < 2) continue;
      for (int gi = 0; gi < G; ++gi) {
        double best = kInfinity, second = kInfinity;
        for (std::size_t e = 0; e < node.edges.size(); ++e) {
          double eh = 0;
          for (const auto& [m, pr] : node.edges[e].succ) eh += pr * tables->h_[gi][m];
          if (eh < best) {
            second = best;
            best = eh;
          } else {
            second = std::min(second, eh);
          }
        }
        double d = second - best;
        if (d > kTieNoise && d < kappa / tau)
          log_debug("ambiguous min-entropy action at node %d, grid %d (gap %.3g)", n, gi, d);
      }
    }

    if (kappa <= kappa_min) {
      out.verdict.kind = Feasibility::unknown;
      out.verdict.gap = goal.p - match.p;
      out.tables = tables;
      return out;
    }
    log_debug("sg explore: target inside the kappa band (gap %.3g, band %.3g), halving kappa",
              goal.p - match.p, band);
    kappa *= 0.5;
  }
}

}  // namespace erci
