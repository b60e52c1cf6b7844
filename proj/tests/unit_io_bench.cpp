#include <doctest.h>

#include <cmath>
#include <memory>

#include "erci/bench_drone.hpp"
#include "erci/errors.hpp"
#include "erci/io_json.hpp"
#include "erci/mdp_solver.hpp"
#include "erci/preprocess.hpp"
#include "erci/sg_solver.hpp"
#include "support/fixtures.hpp"
#include "support/random_instances.hpp"

using namespace erci;
using namespace erci::testing;

TEST_SUITE_BEGIN("io_bench");

TEST_CASE("game json roundtrip preserves rationals") {
  StochasticGame g = fig2_game();
  std::string text = game_to_json(g);
  StochasticGame back = game_from_json(text);
  CHECK(game_to_json(back) == text);
  REQUIRE(back.states.size() == g.states.size());
  const auto& dist = successors(back, "s1", "a");
  REQUIRE(dist[0].prob.exact.has_value());
  CHECK(dist[0].prob.exact->num == 1);
  CHECK(dist[0].prob.exact->den == 3);
  CHECK(validate_game(back).errors.empty());
}

TEST_CASE("monitor json roundtrip") {
  StochasticGame g = fig2_game();
  Monitor m = make_reach_monitor(g, "top");
  Monitor back = monitor_from_json(monitor_to_json(m));
  CHECK(monitor_to_json(back) == monitor_to_json(m));
  CHECK(back.init == m.init);
  CHECK(back.delta == m.delta);
}

TEST_CASE("core json roundtrip") {
  CoreSG core = fig2_core();
  std::string text = core_to_json(core);
  CoreSG back = core_from_json(text);
  CHECK(core_to_json(back) == text);
  check_core(back);
  CHECK(back.top == core.top);
  CHECK(back.bot == core.bot);
  CHECK(back.longest_path == core.longest_path);
  CHECK(back.size() == core.size());
}

TEST_CASE("policy json roundtrip") {
  CoreSG core = fig2_core();
  SplitMix64 rng(231);
  PolicyTable pol = random_policy(rng, core, Owner::ego);
  std::string text = policy_to_json(core, pol, Owner::ego);
  PolicyTable back = policy_from_json(core, text, Owner::ego);
  CHECK(policy_to_json(core, back, Owner::ego) == text);
}

TEST_CASE("verdict json roundtrip") {
  CoreSG core = fig4a_core();
  for (Target t : {Target::point(0.6, 0.6), Target::point(0.6, 0.7), Target::point(0.5, 0.3)}) {
    Verdict v = pareto_explore_mdp(core, t);
    Verdict back = verdict_from_json(verdict_to_json(v));
    CHECK(verdict_to_json(back) == verdict_to_json(v));
    CHECK(back.kind == v.kind);
  }
}

TEST_CASE("improviser json roundtrip rebuilds identical tables") {
  auto core = std::make_shared<CoreSG>(fig6_style_core());
  SgVerdict sv = sg_pareto_explore(*core, Target::point(0.9, 0.5), 0.05);
  REQUIRE(sv.verdict.kind == Feasibility::realizable);
  std::string text = improviser_to_json(sv.improviser);
  Improviser back = improviser_from_json(text, core);
  CHECK(improviser_to_json(back) == text);
  // identical behaviour on a fixed stream
  SimulationReport a = simulate(sv.improviser, {}, 2000, 9);
  SimulationReport b = simulate(back, {}, 2000, 9);
  CHECK(a.p_hat == b.p_hat);
  CHECK(a.h_hat == b.h_hat);
}

TEST_CASE("front csv shape") {
  std::vector<FrontSample> front{{0.0, std::log(2.0), 0.5}, {kInfinity, 0.0, 1.0}};
  std::string csv = front_to_csv(front);
  CHECK(csv.substr(0, 11) == "lambda,p,h\n");
  CHECK(csv.find("inf,1,0") != std::string::npos);
}

TEST_CASE("tables dump roundtrips") {
  CoreSG core = fig4a_core();
  FrontTables tables = build_front_tables(core, 0.1);
  std::string text = tables_to_json(tables);
  CHECK(text.find("\"samples\"") != std::string::npos);
  CHECK(text.find("\"inf\"") != std::string::npos);
  FrontTables back = tables_from_json(text);
  CHECK(tables_to_json(back) == text);
  REQUIRE(back.grid == tables.grid);
  for (int gi = 0; gi < tables.grid_size(); ++gi)
    for (int n = 0; n < core.size(); ++n) {
      CHECK(back.h(gi, n) == tables.h(gi, n));
      CHECK(back.p(gi, n) == tables.p(gi, n));
    }
}

TEST_CASE("drone benchmark determinism and house layout") {
  BenchmarkSpec spec;
  DroneBenchmark a = gen_drone_benchmark(spec);
  DroneBenchmark b = gen_drone_benchmark(spec);
  CHECK(game_to_json(a.game) == game_to_json(b.game));
  CHECK(monitor_to_json(a.soft) == monitor_to_json(b.soft));

  CHECK(a.houses == std::vector<std::pair<int, int>>{{1, 1}, {1, 2}, {2, 2}, {2, 1}});
  BenchmarkSpec six;
  six.k = 6;
  CHECK(gen_drone_benchmark(six).houses ==
        std::vector<std::pair<int, int>>{{2, 2}, {2, 4}, {4, 4}, {4, 2}});

  BenchmarkSpec bad;
  bad.k = 3;
  CHECK_THROWS_WITH_AS(gen_drone_benchmark(bad), doctest::Contains("SpecInvalid"), Error);
  BenchmarkSpec drift;
  drift.lo = 0.002;
  CHECK_THROWS_WITH_AS(gen_drone_benchmark(drift), doctest::Contains("SpecInvalid"), Error);
}

TEST_CASE("drone pipeline self-check") {
  BenchmarkSpec spec;
  spec.k = 4;
  spec.horizon = 6;
  spec.mode = DriftMode::interval;
  DroneBenchmark bench = gen_drone_benchmark(spec);
  CHECK(validate_game(bench.game).errors.empty());
  PruneResult r = build_core(bench.game, bench.hard, bench.soft, spec.horizon);
  REQUIRE_FALSE(r.unrealizable_hard());
  check_core(*r.core);
  CHECK(core_stats(*r.core).top_reachable);  // the soft goal is reachable in 6 steps
}

TEST_SUITE_END();
