#include <doctest.h>

#include <cmath>
#include <memory>

#include "erci/errors.hpp"
#include "erci/mdp_solver.hpp"
#include "erci/oracle.hpp"
#include "erci/sg_solver.hpp"
#include "support/fixtures.hpp"
#include "support/random_instances.hpp"

using namespace erci;
using namespace erci::testing;

TEST_SUITE_BEGIN("oracle");

TEST_CASE("env policy counting") {
  // running example: env nodes with 2 and 1 actions -> 2 policies
  CoreSG fig2 = fig2_core();
  CHECK(enumerate_env_policies(fig2).size() == 2);

  // MDP: exactly one policy
  SplitMix64 rng(201);
  RandomCoreOpts opts;
  opts.mdp = true;
  CoreSG mdp = random_core(rng, opts);
  CHECK(enumerate_env_policies(mdp).size() == 1);

  // two binary env nodes -> 4
  CoreBuilder b;
  int root = b.add(Owner::ego, 0);
  int e1 = b.add(Owner::env, 1);
  int mid = b.add(Owner::ego, 2);
  int e2 = b.add(Owner::env, 3);
  b.edge(root, 0, {{e1, 1.0}});
  b.edge(e1, 0, {{mid, 1.0}});
  b.edge(e1, 1, {{CoreBuilder::kBot, 1.0}});
  b.edge(mid, 0, {{e2, 1.0}});
  b.edge(e2, 0, {{CoreBuilder::kTop, 1.0}});
  b.edge(e2, 1, {{CoreBuilder::kBot, 1.0}});
  CoreSG two = b.build(root);
  CHECK(enumerate_env_policies(two).size() == 4);

  CHECK_THROWS_WITH_AS(enumerate_env_policies(two, 3), doctest::Contains("TooLarge"), Error);
}

TEST_CASE("oracle guaranteed point on the asymmetric env choice") {
  CoreSG core = fig6_style_core();
  PolicyTable uni = uniform_policy(core, Owner::ego);
  Point x = oracle_guaranteed_point(core, uni);
  CHECK(x.h == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(x.p == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("front lower bound on the minimal MDP lies on the closed form") {
  CoreSG core = fig4a_core();
  std::vector<Point> front = oracle_front_lower_bound(core, 0.01);
  REQUIRE(front.size() > 10);
  for (const Point& x : front) {
    CHECK(x.h == doctest::Approx(binary_entropy(x.p)).epsilon(1e-9));
    CHECK(x.p >= 0.5 - 1e-12);  // points below the max-entropy corner are dominated
  }
}

TEST_CASE("degenerate single-action core yields a single point") {
  CoreBuilder b;
  int root = b.add(Owner::ego, 0);
  b.edge(root, 0, {{CoreBuilder::kTop, 0.7}, {CoreBuilder::kBot, 0.3}});
  CoreSG core = b.build(root);
  std::vector<Point> front = oracle_front_lower_bound(core, 0.05);
  REQUIRE(front.size() == 1);
  CHECK(front[0].p == doctest::Approx(0.7));
  CHECK(front[0].h == doctest::Approx(0.0));
}

TEST_CASE("halving the grid step only grows the dominated region") {
  SplitMix64 rng(211);
  RandomCoreOpts opts;
  opts.max_ego_decision_nodes = 2;
  opts.max_env_choice_nodes = 2;
  opts.max_layers = 3;
  for (int trial = 0; trial < 5; ++trial) {
    CoreSG core = random_core(rng, opts);
    std::vector<Point> coarse = oracle_front_lower_bound(core, 0.2);
    std::vector<Point> fine = oracle_front_lower_bound(core, 0.1);
    for (const Point& c : coarse) {
      bool covered = false;
      for (const Point& f : fine)
        if (f.p >= c.p - 1e-9 && f.h >= c.h - 1e-9) covered = true;
      CHECK(covered);
    }
  }
}

TEST_CASE("witness checking on the minimal MDP") {
  auto core = std::make_shared<CoreSG>(fig4a_core());

  // genuine unrealizable verdict
  Verdict no = pareto_explore_mdp(*core, Target::point(0.6, 0.70));
  REQUIRE(no.kind == Feasibility::unrealizable);
  CHECK(check_witness(*core, no, nullptr));

  // forged realizability claim: impossible point
  Verdict forged;
  forged.kind = Feasibility::realizable;
  forged.target = {1.0, 0.1};
  forged.x1 = {1.0, 0.1};
  forged.lambda1 = kInfinity;
  PolicyTable hard = hard_max_policy(*core).sigma;
  Improviser hard_imp = mix_policies(core, hard, hard, 1.0);
  CHECK_FALSE(check_witness(*core, forged, &hard_imp));

  // valid pair witness at rationality 0 / infinity for (0.5, 0.3)
  Verdict pair = pareto_explore_mdp(*core, Target::point(0.5, 0.3));
  REQUIRE(pair.kind == Feasibility::realizable);
  PolicyTable uni = smooth_bellman(*core, 0.0).sigma;
  Improviser imp = pair.pair
                       ? mix_policies(core, uni, hard, pair.weight)
                       : mix_policies(core, uni, uni, 1.0);
  // rebuild the actual witness policies for the generic case
  if (pair.pair) {
    PolicyTable pi1 = std::isinf(pair.lambda1) ? hard : smooth_bellman(*core, pair.lambda1).sigma;
    PolicyTable pi2 = std::isinf(pair.lambda2) ? hard : smooth_bellman(*core, pair.lambda2).sigma;
    imp = mix_policies(core, pi1, pi2, pair.weight);
  } else {
    PolicyTable pi = std::isinf(pair.lambda1) ? hard : smooth_bellman(*core, pair.lambda1).sigma;
    imp = mix_policies(core, pi, pi, 1.0);
  }
  CHECK(check_witness(*core, pair, &imp));

  // tampering with the mixing weight breaks the h guarantee
  if (pair.pair) {
    Verdict tampered = pair;
    tampered.weight = 0.0;  // all mass on the low-entropy branch
    tampered.x1 = tampered.x2;
    Improviser bad = mix_policies(core, hard, hard, 1.0);
    bool ok = check_witness(*core, tampered, &bad);
    CHECK((tampered.witness_point().h < 0.3 ? !ok : true));
  }

  // unknown verdicts pass vacuously
  Verdict unknown;
  unknown.kind = Feasibility::unknown;
  CHECK(check_witness(*core, unknown, nullptr));
}

TEST_CASE("sg verdicts survive the oracle end to end") {
  SplitMix64 rng(221);
  RandomCoreOpts opts;
  opts.max_env_choice_nodes = 3;
  int realizable = 0, unrealizable = 0;
  for (int trial = 0; trial < 20; ++trial) {
    CoreSG core_v = random_core(rng, opts);
    auto core = std::make_shared<CoreSG>(core_v);
    FrontTables probe = build_front_tables(*core, 0.05);
    double h_star = probe.h(0, core->initial);
    double p_star = probe.p(probe.grid_size() - 1, core->initial);
    Target t = Target::point(std::min(1.0, p_star * 1.4 * rng.uniform()),
                             h_star * 1.4 * rng.uniform());
    SgVerdict sv = sg_pareto_explore(*core, t, 0.05);
    if (sv.verdict.kind == Feasibility::realizable) {
      ++realizable;
      CHECK(check_witness(*core, sv.verdict, &sv.improviser));
    } else if (sv.verdict.kind == Feasibility::unrealizable) {
      ++unrealizable;
      CHECK(check_witness(*core, sv.verdict, nullptr));
    }
  }
  CHECK(realizable > 0);
  CHECK(unrealizable > 0);
}

TEST_SUITE_END();
