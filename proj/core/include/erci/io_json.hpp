#pragma once

#include <memory>
#include <string>

#include "erci/bench_drone.hpp"
#include "erci/core_sg.hpp"
#include "erci/improviser.hpp"
#include "erci/monitor.hpp"
#include "erci/verdict.hpp"

namespace erci {

// Game format:
//   {"states": [{"id", "owner"}], "initial", "actions",
//    "transitions": [{"from", "action", "to": [{"state", "prob_num", "prob_den"}]}]}
// with "prob" allowed instead of prob_num/prob_den.
std::string game_to_json(const StochasticGame& game);
StochasticGame game_from_json(const std::string& text);

// Monitor format:
//   {"mstates", "init", "accepting", "delta": [{"from", "obs", "to"}], "default"?}
std::string monitor_to_json(const Monitor& monitor);
Monitor monitor_from_json(const std::string& text);

// Core format: the game format over node ids plus a "provenance" section with
// the terminals, the longest path and per-node origin info.
std::string core_to_json(const CoreSG& core);
CoreSG core_from_json(const std::string& text);

// Policy format: {"nodes": [{"id", "dist": [{"action", "prob"}]}]}
std::string policy_to_json(const CoreSG& core, const PolicyTable& policy, Owner who);
PolicyTable policy_from_json(const CoreSG& core, const std::string& text, Owner who);

// Front table dump: one entry per node {id, samples: [{lambda, h, p}], kappa};
// the infinity endpoint serializes lambda as the string "inf".
std::string tables_to_json(const FrontTables& tables);
FrontTables tables_from_json(const std::string& text);

// Front CSV with header exactly "lambda,p,h".
std::string front_to_csv(const std::vector<FrontSample>& front);

std::string verdict_to_json(const Verdict& verdict);
Verdict verdict_from_json(const std::string& text);

// Improvisers persist their kind, weight, branch matches/policies and, for
// the entropy-matching form, the rationality grid so the tables rebuild
// deterministically at load time.
std::string improviser_to_json(const Improviser& imp);
Improviser improviser_from_json(const std::string& text, std::shared_ptr<const CoreSG> core,
                                int jobs = 1);

std::string validation_to_json(const ValidationReport& report);

// File helpers.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace erci
