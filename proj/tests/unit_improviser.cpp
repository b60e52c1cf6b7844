#include <doctest.h>

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "erci/errors.hpp"
#include "erci/improviser.hpp"
#include "erci/mdp_solver.hpp"
#include "erci/oracle.hpp"
#include "support/fixtures.hpp"
#include "support/path_enum.hpp"
#include "support/random_instances.hpp"

using namespace erci;
using namespace erci::testing;

namespace {

Improviser matching_at(std::shared_ptr<const CoreSG> core,
                       std::shared_ptr<const FrontTables> tables, int grid_idx) {
  Match m{grid_idx, grid_idx, 1.0, tables->h(grid_idx, core->initial),
          tables->p(grid_idx, core->initial)};
  return entropy_matching_policy(std::move(core), std::move(tables), m);
}

}  // namespace

TEST_SUITE_BEGIN("improviser");

TEST_CASE("episode protocol errors") {
  auto core = std::make_shared<CoreSG>(fig2_core());
  auto tables = std::make_shared<FrontTables>(build_front_tables(*core, 0.05));
  Improviser imp = matching_at(core, tables, 0);
  Episode ep(imp, 1, 0);
  auto out = ep.step();
  REQUIRE(out.edge >= 0);
  // moving to a node outside the support is rejected
  CHECK_THROWS_WITH_AS(ep.observe(out.edge, core->bot), doctest::Contains("OffSupportObservation"),
                       Error);
  int next = core->nodes[core->initial].edges[out.edge].succ[0].first;
  ep.observe(out.edge, next);
  if (!ep.done() && core->nodes[ep.node()].owner == Owner::env) {
    CHECK_THROWS_WITH_AS(ep.step(), doctest::Contains("StepOnEnvNode"), Error);
  }
}

// Every env transfer preserves the owed entropy in expectation over the
// bracket coin and the chance outcome: the branch match must balance exactly.
TEST_CASE("owed entropy is preserved across env transfers") {
  SplitMix64 rng(181);
  for (int trial = 0; trial < 10; ++trial) {
    CoreSG core_v = random_core(rng);
    auto core = std::make_shared<CoreSG>(core_v);
    auto tables = std::make_shared<FrontTables>(build_front_tables(*core, 0.05));
    int gi = static_cast<int>(rng.below(tables->grid_size() - 1));
    Improviser imp = matching_at(core, tables, gi);
    for (int episode = 0; episode < 20; ++episode) {
      Episode ep(imp, 17, episode);
      SplitMix64 world(derive_stream(1234, episode));
      while (!ep.done()) {
        const CoreNode& node = core->nodes[ep.node()];
        int edge;
        if (node.owner == Owner::ego) {
          edge = ep.step().edge;
        } else {
          edge = static_cast<int>(world.below(node.edges.size()));  // adversarial-ish random
          double owed = ep.owed();
          Match m = match_on_curve(branch_curve(*core, *tables, ep.node(), edge), owed);
          double expected = 0;
          for (const auto& [child, pr] : node.edges[edge].succ)
            expected +=
                pr * (m.w * tables->h(m.lo, child) + (1 - m.w) * tables->h(m.hi, child));
          // matched exactly, or clamped to the endpoints (over-delivery only)
          CHECK(expected >= owed - 1e-9);
          if (m.h <= owed + 1e-12 && m.h >= owed - 1e-12)
            CHECK(expected == doctest::Approx(owed).epsilon(1e-9));
        }
        std::vector<double> probs;
        for (const auto& [m, p] : node.edges[edge].succ) probs.push_back(p);
        int next = node.edges[edge].succ[world.sample(probs)].first;
        ep.observe(edge, next);
      }
    }
  }
}

TEST_CASE("deviation raises the rationality on the asymmetric env choice") {
  auto core = std::make_shared<CoreSG>(fig6_style_core());
  auto tables = std::make_shared<FrontTables>(build_front_tables(*core, 0.02));
  // pick a mid-grid rationality: owed at the root is the two-branch value
  int gi = tables->grid_size() / 2;
  Improviser imp = matching_at(core, tables, gi);
  Episode ep(imp, 3, 0);
  int edge = ep.step().edge;
  ep.observe(edge, 1);  // to the env node
  double before = ep.active_lambda();
  // env deviates to the three-action branch (edge 1, node 3)
  ep.observe(1, 3);
  CHECK(ep.active_lambda() >= before);
  // owed entropy is preserved in expectation: matching on the richer branch
  // must sit at or above the planned owed value
  CHECK(ep.owed() >= 0.0);
}

TEST_CASE("episode log is consistent with the path probability") {
  // uniform ego on the running example vs scripted env-a: empirical path
  // frequencies approach the exact path distribution.
  auto core = std::make_shared<CoreSG>(fig2_core());
  PolicyTable uni = uniform_policy(*core, Owner::ego);
  Improviser imp = mix_policies(core, uni, uni, 1.0);
  PolicyTable env(core->nodes.size());
  for (int n = 0; n < core->size(); ++n) {
    const CoreNode& node = core->nodes[n];
    if (node.owner != Owner::env || node.edges.empty()) continue;
    env[n].assign(node.edges.size(), 0.0);
    for (std::size_t e = 0; e < node.edges.size(); ++e)
      if (core->action_names[node.edges[e].action] == "a") env[n][e] = 1.0;
  }

  // exact path distribution (tiny game: walk all paths)
  std::map<std::vector<int>, double> exact;
  std::function<void(int, std::vector<int>&, double)> walk = [&](int n, std::vector<int>& trace,
                                                                 double prob) {
    if (core->is_terminal(n)) {
      exact[trace] += prob;
      return;
    }
    const CoreNode& node = core->nodes[n];
    const auto& dist = node.owner == Owner::ego ? uni[n] : env[n];
    for (std::size_t e = 0; e < node.edges.size(); ++e) {
      if (dist[e] <= 0) continue;
      for (const auto& [m, p] : node.edges[e].succ) {
        trace.push_back(static_cast<int>(e) * 100 + m);
        walk(m, trace, prob * dist[e] * p);
        trace.pop_back();
      }
    }
  };
  std::vector<int> trace;
  walk(core->initial, trace, 1.0);

  const int N = 40000;
  std::map<std::vector<int>, double> freq;
  for (int i = 0; i < N; ++i) {
    Episode ep(imp, 99, i);
    SplitMix64 world(derive_stream(31337, i));
    std::vector<int> t;
    while (!ep.done()) {
      const CoreNode& node = core->nodes[ep.node()];
      int edge = node.owner == Owner::ego ? ep.step().edge : world.sample(env[ep.node()]);
      std::vector<double> probs;
      for (const auto& [m, p] : node.edges[edge].succ) probs.push_back(p);
      int next = node.edges[edge].succ[world.sample(probs)].first;
      t.push_back(edge * 100 + next);
      ep.observe(edge, next);
    }
    freq[t] += 1.0 / N;
  }
  double tv = 0;
  for (const auto& [key, prob] : exact) tv += std::abs(prob - freq[key]);
  CHECK(tv / 2 < 0.02);
}

TEST_CASE("simulation closed forms on the minimal MDP") {
  auto core = std::make_shared<CoreSG>(fig4a_core());
  PolicyTable pol(core->nodes.size());
  pol[core->initial] = {0.75, 0.25};
  Improviser imp = mix_policies(core, pol, pol, 1.0);
  SimulationReport r = simulate(imp, {}, 100000, 5);
  CHECK(std::abs(r.p_hat - 0.75) < 0.01);
  CHECK(std::abs(r.h_hat - binary_entropy(0.75)) < 0.01);
  CHECK(r.p_lo <= 0.75);
  CHECK(r.p_hi >= 0.75);

  // deterministic policies log zero surprisal exactly
  PolicyTable det(core->nodes.size());
  det[core->initial] = {1.0, 0.0};
  SimulationReport rd = simulate(mix_policies(core, det, det, 1.0), {}, 1000, 5);
  CHECK(rd.h_hat == 0.0);
  CHECK(rd.p_hat == 1.0);
}

TEST_CASE("plug-in estimator is unbiased for the backward entropy") {
  SplitMix64 rng(191);
  for (int trial = 0; trial < 10; ++trial) {
    CoreSG core = random_core(rng);
    PolicyTable ego = random_policy(rng, core, Owner::ego);
    PolicyTable env = random_policy(rng, core, Owner::env);
    // The expectation of the per-episode statistic is exactly the path-sum
    // of probability times accumulated surprisal.
    PathStats stats = enumerate_paths(core, ego, env);
    CHECK(stats.entropy == doctest::Approx(causal_entropy(core, ego, env)).epsilon(1e-9));
  }
}

TEST_CASE("seed determinism") {
  auto core = std::make_shared<CoreSG>(fig2_core());
  auto tables = std::make_shared<FrontTables>(build_front_tables(*core, 0.05));
  Improviser imp = matching_at(core, tables, 1);
  std::ostringstream log_a, log_b;
  SimulationReport a = simulate(imp, {}, 500, 42, &log_a);
  SimulationReport b = simulate(imp, {}, 500, 42, &log_b);
  CHECK(a.p_hat == b.p_hat);
  CHECK(a.h_hat == b.h_hat);
  CHECK(log_a.str() == log_b.str());
  SimulationReport c = simulate(imp, {}, 500, 43);
  CHECK(a.p_hat != c.p_hat);  // almost surely under a different stream
}

TEST_CASE("worst-case entropy env drives the estimate to the owed value") {
  auto core = std::make_shared<CoreSG>(fig6_style_core());
  auto tables = std::make_shared<FrontTables>(build_front_tables(*core, 0.02));
  Improviser imp = matching_at(core, tables, 0);  // rationality 0: owed = h*
  EnvSpec spec;
  spec.mode = EnvMode::worst_case_entropy;
  SimulationReport r = simulate(imp, spec, 50000, 11);
  CHECK(std::abs(r.h_hat - tables->h(0, core->initial)) < 5e-3);
  CHECK(r.h_hat >= tables->h(0, core->initial) - 1e-3);
}

TEST_CASE("episode log lines are well-formed json records") {
  auto core = std::make_shared<CoreSG>(fig2_core());
  auto tables = std::make_shared<FrontTables>(build_front_tables(*core, 0.05));
  Improviser imp = matching_at(core, tables, 1);
  std::ostringstream log;
  simulate(imp, {}, 50, 3, &log);
  std::istringstream lines(log.str());
  std::string line;
  int records = 0;
  while (std::getline(lines, line)) {
    ++records;
    auto j = nlohmann::json::parse(line, nullptr, false);
    REQUIRE_FALSE(j.is_discarded());
    CHECK(j.contains("node"));
    CHECK(j.contains("owner"));
    CHECK(j.contains("action"));
    CHECK(j.contains("owed_h"));
    CHECK(j.contains("lambda"));
    bool ego = j.at("owner").get<std::string>() == "ego";
    CHECK(j.contains("dist") == ego);
  }
  CHECK(records >= 50);  // at least one half-step per episode
}

TEST_CASE("per-env breakdown covers every deterministic adversary") {
  auto core = std::make_shared<CoreSG>(fig6_style_core());
  auto tables = std::make_shared<FrontTables>(build_front_tables(*core, 0.02));
  Improviser imp = matching_at(core, tables, 0);
  std::vector<DetPolicy> envs = enumerate_env_policies(*core);
  auto reports = simulate_vs_each_env(imp, envs, 20000, 5);
  REQUIRE(reports.size() == envs.size());
  for (std::size_t i = 0; i < reports.size(); ++i) {
    CHECK(reports[i].env_policy_index == static_cast<int>(i));
    Point exact = exact_improviser_eval(imp, envs[i]);
    CHECK(std::abs(reports[i].p_hat - exact.p) < 0.02);
    CHECK(std::abs(reports[i].h_hat - exact.h) < 0.02);
  }
}

TEST_SUITE_END();
