// erci: synthesis of randomized control policies for stochastic games with
// hard, soft and causal-entropy constraints.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>

#include <CLI11.hpp>

#include "erci/bench_drone.hpp"
#include "erci/errors.hpp"
#include "erci/improviser.hpp"
#include "erci/io_json.hpp"
#include "erci/logging.hpp"
#include "erci/mdp_solver.hpp"
#include "erci/oracle.hpp"
#include "erci/preprocess.hpp"
#include "erci/sg_solver.hpp"

namespace {

using namespace erci;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitUnrealizable = 2;
constexpr int kExitUnknown = 3;

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

struct InstanceOptions {
  std::string game_path;
  std::string core_path;
  std::string hard_path;
  std::string soft_path;
  std::string soft_target = "top";
  int tau = 0;  // 0: defaults to the state count
};

void add_instance_options(CLI::App* cmd, InstanceOptions& opts) {
  cmd->add_option("--game", opts.game_path, "stochastic game JSON");
  cmd->add_option("--core", opts.core_path, "preprocessed core JSON (skips unrolling)");
  cmd->add_option("--hard", opts.hard_path, "hard-constraint monitor JSON (default: accept all)");
  cmd->add_option("--soft", opts.soft_path,
                  "soft-constraint monitor JSON (default: reach --soft-target)");
  cmd->add_option("--soft-target", opts.soft_target,
                  "target state id for the default soft monitor");
  cmd->add_option("--tau", opts.tau, "horizon in logical steps (default: number of states)");
}

/// Builds or loads the core instance; exits with UnrealizableHard handled by
/// the caller through the nullopt case.
PruneResult load_instance(const InstanceOptions& opts) {
  if (!opts.core_path.empty()) {
    PruneResult r;
    r.core = core_from_json(read_file(opts.core_path));
    check_core(*r.core);
    return r;
  }
  if (opts.game_path.empty()) fail("Usage", "either --game or --core is required");
  StochasticGame game = game_from_json(read_file(opts.game_path));
  ValidationReport report = validate_game(game);
  bool fatal = false;
  for (const auto& e : report.errors)
    if (e.code != "NONALT") fatal = true;
  if (fatal) {
    std::fputs(validation_to_json(report).c_str(), stderr);
    fail("InvalidGame", "game failed validation");
  }
  Monitor hard = opts.hard_path.empty() ? make_trivial_monitor()
                                        : monitor_from_json(read_file(opts.hard_path));
  Monitor soft = opts.soft_path.empty() ? make_reach_monitor(game, opts.soft_target)
                                        : monitor_from_json(read_file(opts.soft_path));
  int tau = opts.tau > 0 ? opts.tau : static_cast<int>(game.states.size());
  return build_core(game, hard, soft, tau);
}

bool is_mdp(const CoreSG& core) {
  for (int n = 0; n < core.size(); ++n)
    if (core.nodes[n].owner == Owner::env && core.nodes[n].edges.size() > 1) return false;
  return true;
}

int cmd_validate(const std::string& path) {
  StochasticGame game = game_from_json(read_file(path));
  ValidationReport report = validate_game(game);
  std::fputs(validation_to_json(report).c_str(), stdout);
  return report.ok() ? kExitOk : kExitError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"entropic reactive control improvisation for stochastic games"};
  app.require_subcommand(1);
  // --h is a synthesis threshold, so help stays long-form only.
  app.set_help_flag("--help", "print help");

  // validate
  std::string validate_game_path;
  CLI::App* validate = app.add_subcommand("validate", "check a game file against the invariants");
  validate->add_option("--game", validate_game_path, "stochastic game JSON")->required();

  // preprocess
  InstanceOptions pre_opts;
  std::string pre_out;
  bool pre_stats = false;
  CLI::App* preprocess =
      app.add_subcommand("preprocess", "unroll, prune the hard constraint and merge terminals");
  add_instance_options(preprocess, pre_opts);
  preprocess->add_option("--out", pre_out, "output core JSON");
  preprocess->add_flag("--stats", pre_stats, "print node/edge counts");

  // pareto
  InstanceOptions par_opts;
  std::string par_out, par_tables;
  double par_kappa = 0.1;
  int par_jobs = 1;
  double par_lambda_max = 100.0;
  CLI::App* pareto = app.add_subcommand("pareto", "approximate the performance/entropy front");
  add_instance_options(pareto, par_opts);
  pareto->add_option("--kappa", par_kappa, "front resolution on the p axis (default 0.1)");
  pareto->add_option("--out", par_out, "front CSV (lambda,p,h)");
  pareto->add_option("--tables", par_tables, "dump all per-node tables as JSON");
  pareto->add_option("--jobs", par_jobs, "worker threads for the table sweeps");
  pareto->add_option("--lambda-max", par_lambda_max, "rationality cap (default 100)");

  // synthesize
  InstanceOptions syn_opts;
  double syn_p = -1, syn_h = -1, syn_eps = -1, syn_del = -1;
  double syn_kappa = 0.1, syn_rat_res = 1e-6, syn_lambda_max = 100.0;
  int syn_jobs = 1;
  std::string syn_out, syn_verdict_out, syn_front_out;
  CLI::App* synthesize = app.add_subcommand("synthesize", "decide a target and emit an improviser");
  synthesize->set_help_flag("--help", "print help");
  add_instance_options(synthesize, syn_opts);
  synthesize->add_option("--p", syn_p, "performance threshold");
  synthesize->add_option("--h", syn_h, "causal entropy threshold (nats)");
  synthesize->add_option("--epsilon", syn_eps, "performance regret ratio in [0,1]");
  synthesize->add_option("--delta", syn_del, "randomness regret ratio in [0,1]");
  synthesize->add_option("--kappa", syn_kappa, "initial front resolution (default 0.1)");
  synthesize->add_option("--rat-resolution", syn_rat_res,
                         "rationality binary-search resolution (default 1e-6)");
  synthesize->add_option("--lambda-max", syn_lambda_max, "rationality cap (default 100)");
  synthesize->add_option("--jobs", syn_jobs, "worker threads for the table sweeps");
  synthesize->add_option("--out", syn_out, "improviser JSON (written when realizable)");
  synthesize->add_option("--verdict-out", syn_verdict_out, "verdict JSON");
  synthesize->add_option("--front-out", syn_front_out, "sampled front CSV");

  // sample
  InstanceOptions sam_opts;
  std::string sam_improviser, sam_env = "uniform", sam_env_policy, sam_log;
  int sam_n = 1000;
  std::uint64_t sam_seed = 0;
  CLI::App* sample = app.add_subcommand("sample", "run episodes of an improviser");
  add_instance_options(sample, sam_opts);
  sample->add_option("--improviser", sam_improviser, "improviser JSON")->required();
  sample->add_option("--n", sam_n, "episode count (default 1000)");
  sample->add_option("--seed", sam_seed, "stream seed (default 0)");
  sample->add_option("--env", sam_env, "worst-p | worst-h | uniform | scripted");
  sample->add_option("--env-policy", sam_env_policy, "env policy JSON for --env scripted");
  sample->add_option("--log", sam_log, "episode log (JSON lines)");

  // verify
  InstanceOptions ver_opts;
  std::string ver_verdict, ver_improviser;
  int ver_cap = 4096;
  CLI::App* verify = app.add_subcommand("verify", "re-validate a verdict with the oracle");
  add_instance_options(verify, ver_opts);
  verify->add_option("--verdict", ver_verdict, "verdict JSON")->required();
  verify->add_option("--improviser", ver_improviser, "improviser JSON (realizable verdicts)");
  verify->add_option("--cap", ver_cap, "env policy enumeration cap (default 4096)");

  // bench drone
  CLI::App* bench = app.add_subcommand("bench", "benchmark generators");
  bench->require_subcommand(1);
  CLI::App* drone = bench->add_subcommand("drone", "delivery-drone grid benchmark");
  int dr_k = 4, dr_horizon = 6;
  std::string dr_mode = "point", dr_out_dir = ".";
  double dr_lo = 0.01, dr_hi = 0.02;
  drone->add_option("--k", dr_k, "grid side (>= 4)");
  drone->add_option("--horizon", dr_horizon, "logical steps");
  drone->add_option("--mode", dr_mode, "point | interval");
  drone->add_option("--lo", dr_lo, "lower drift probability (default 1/100)");
  drone->add_option("--hi", dr_hi, "upper drift probability (default 1/50)");
  drone->add_option("--out-dir", dr_out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) return cmd_validate(validate_game_path);

    if (*preprocess) {
      PruneResult r = load_instance(pre_opts);
      if (r.unrealizable_hard()) {
        std::printf("{\"kind\": \"unrealizable_hard\"}\n");
        return kExitUnrealizable;
      }
      check_core(*r.core);
      if (!pre_out.empty()) write_file(pre_out, core_to_json(*r.core));
      if (pre_stats) {
        CoreStats stats = core_stats(*r.core);
        std::printf("nodes %d edges %d longest_path %d top_reachable %d bot_reachable %d\n",
                    stats.node_count, stats.edge_count, stats.longest_path,
                    stats.top_reachable ? 1 : 0, stats.bot_reachable ? 1 : 0);
      }
      return kExitOk;
    }

    if (*pareto) {
      PruneResult r = load_instance(par_opts);
      if (r.unrealizable_hard()) {
        std::printf("{\"kind\": \"unrealizable_hard\"}\n");
        return kExitUnrealizable;
      }
      SgConfig config;
      config.jobs = par_jobs;
      config.lambda_max = par_lambda_max;
      FrontTables tables = build_front_tables(*r.core, par_kappa, config);
      std::vector<FrontSample> front;
      for (int gi = 0; gi < tables.grid_size(); ++gi)
        front.push_back({tables.grid[gi], tables.h(gi, r.core->initial),
                         tables.p(gi, r.core->initial)});
      std::string csv = front_to_csv(front);
      if (!par_out.empty())
        write_file(par_out, csv);
      else
        std::fputs(csv.c_str(), stdout);
      if (!par_tables.empty()) write_file(par_tables, tables_to_json(tables));
      std::fprintf(stderr, "kappa_certified %s over %d rationalities\n",
                   num(tables.kappa_certified).c_str(), tables.grid_size());
      return kExitOk;
    }

    if (*synthesize) {
      bool point_form = syn_p >= 0 || syn_h >= 0;
      bool regret_form = syn_eps >= 0 || syn_del >= 0;
      if (point_form == regret_form)
        fail("Usage", "give either --p/--h or --epsilon/--delta");
      Target target = point_form ? Target::point(std::max(syn_p, 0.0), std::max(syn_h, 0.0))
                                 : Target::regret_of(std::max(syn_eps, 0.0), std::max(syn_del, 0.0));

      PruneResult r = load_instance(syn_opts);
      if (r.unrealizable_hard()) {
        std::printf("{\"kind\": \"unrealizable_hard\"}\n");
        return kExitUnrealizable;
      }
      auto core = std::make_shared<CoreSG>(std::move(*r.core));

      Verdict verdict;
      Improviser improviser;
      if (is_mdp(*core)) {
        MdpExploreConfig config;
        config.rat_resolution = syn_rat_res;
        config.lambda_max = syn_lambda_max;
        std::vector<FrontSample> front;
        verdict = pareto_explore_mdp(*core, target, config, &front);
        if (!syn_front_out.empty()) write_file(syn_front_out, front_to_csv(front));
        if (verdict.kind == Feasibility::realizable) {
          PolicyTable pi1 = std::isinf(verdict.lambda1) ? hard_max_policy(*core).sigma
                                                        : smooth_bellman(*core, verdict.lambda1).sigma;
          if (verdict.pair) {
            PolicyTable pi2 = std::isinf(verdict.lambda2)
                                  ? hard_max_policy(*core).sigma
                                  : smooth_bellman(*core, verdict.lambda2).sigma;
            improviser = mix_policies(core, std::move(pi1), std::move(pi2), verdict.weight);
          } else {
            improviser = mix_policies(core, pi1, pi1, 1.0);
          }
        }
      } else {
        SgConfig config;
        config.jobs = syn_jobs;
        config.lambda_max = syn_lambda_max;
        SgVerdict sv = sg_pareto_explore(*core, target, syn_kappa, config);
        verdict = sv.verdict;
        improviser = sv.improviser;
        improviser.core = core;
        if (!syn_front_out.empty() && sv.tables) {
          std::vector<FrontSample> front;
          for (int gi = 0; gi < sv.tables->grid_size(); ++gi)
            front.push_back(
                {sv.tables->grid[gi], sv.tables->h(gi, core->initial), sv.tables->p(gi, core->initial)});
          write_file(syn_front_out, front_to_csv(front));
        }
      }

      std::string verdict_json = verdict_to_json(verdict);
      std::fputs(verdict_json.c_str(), stdout);
      if (!syn_verdict_out.empty()) write_file(syn_verdict_out, verdict_json);
      if (verdict.kind == Feasibility::realizable && !syn_out.empty())
        write_file(syn_out, improviser_to_json(improviser));
      return verdict.kind == Feasibility::realizable     ? kExitOk
             : verdict.kind == Feasibility::unrealizable ? kExitUnrealizable
                                                          : kExitUnknown;
    }

    if (*sample) {
      PruneResult r = load_instance(sam_opts);
      if (r.unrealizable_hard()) fail("UnrealizableHard", "instance has no hard-safe policy");
      auto core = std::make_shared<CoreSG>(std::move(*r.core));
      Improviser imp = improviser_from_json(read_file(sam_improviser), core);
      EnvSpec env;
      if (sam_env == "worst-p")
        env.mode = EnvMode::worst_case_performance;
      else if (sam_env == "worst-h")
        env.mode = EnvMode::worst_case_entropy;
      else if (sam_env == "uniform")
        env.mode = EnvMode::uniform_random;
      else if (sam_env == "scripted") {
        env.mode = EnvMode::scripted;
        if (sam_env_policy.empty()) fail("Usage", "--env scripted needs --env-policy");
        env.scripted = policy_from_json(*core, read_file(sam_env_policy), Owner::env);
      } else {
        fail("Usage", "unknown --env mode " + sam_env);
      }
      std::ofstream log_stream;
      std::ostream* log = nullptr;
      if (!sam_log.empty()) {
        log_stream.open(sam_log);
        log = &log_stream;
      }
      SimulationReport report = simulate(imp, env, sam_n, sam_seed, log);
      std::printf("{\"episodes\": %d, \"p_hat\": %s, \"p_wilson95\": [%s, %s], \"h_hat\": %s}\n",
                  report.episodes, num(report.p_hat).c_str(), num(report.p_lo).c_str(),
                  num(report.p_hi).c_str(), num(report.h_hat).c_str());
      return kExitOk;
    }

    if (*verify) {
      PruneResult r = load_instance(ver_opts);
      if (r.unrealizable_hard()) fail("UnrealizableHard", "instance has no hard-safe policy");
      auto core = std::make_shared<CoreSG>(std::move(*r.core));
      Verdict verdict = verdict_from_json(read_file(ver_verdict));
      std::optional<Improviser> imp;
      if (!ver_improviser.empty())
        imp = improviser_from_json(read_file(ver_improviser), core);
      bool ok = check_witness(*core, verdict, imp ? &*imp : nullptr, ver_cap);
      std::printf("{\"witness_ok\": %s}\n", ok ? "true" : "false");
      return ok ? kExitOk : kExitError;
    }

    if (*drone) {
      BenchmarkSpec spec;
      spec.k = dr_k;
      spec.horizon = dr_horizon;
      spec.lo = dr_lo;
      spec.hi = dr_hi;
      if (dr_mode == "point")
        spec.mode = DriftMode::point;
      else if (dr_mode == "interval")
        spec.mode = DriftMode::interval;
      else
        fail("Usage", "unknown --mode " + dr_mode);
      DroneBenchmark b = gen_drone_benchmark(spec);
      std::filesystem::create_directories(dr_out_dir);
      auto in_dir = [&](const std::string& name) {
        return (std::filesystem::path(dr_out_dir) / name).string();
      };
      write_file(in_dir("game.json"), game_to_json(b.game));
      write_file(in_dir("hard.json"), monitor_to_json(b.hard));
      write_file(in_dir("soft.json"), monitor_to_json(b.soft));
      std::printf("wrote %s (%zu states), horizon %d\n", in_dir("game.json").c_str(),
                  b.game.states.size(), spec.horizon);
      return kExitOk;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitError;
  }
  return kExitError;
}
