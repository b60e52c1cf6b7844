#include "erci/io_json.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "erci/errors.hpp"

namespace erci {

using json = nlohmann::ordered_json;

namespace {

json parse(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) fail("BadJson", "input is not valid JSON");
  return j;
}

json lambda_to_json(double lambda) {
  if (std::isinf(lambda)) return json("inf");
  return json(lambda);
}

double lambda_from_json(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return kInfinity;
    fail("BadJson", "unknown lambda literal " + j.get<std::string>());
  }
  return j.get<double>();
}

}  // namespace

std::string game_to_json(const StochasticGame& game) {
  json j;
  j["states"] = json::array();
  for (const auto& s : game.states) {
    json js{{"id", s.id}, {"owner", owner_name(s.owner)}};
    if (s.inserted) {
      js["inserted"] = true;
      js["origin"] = s.origin;
    }
    j["states"].push_back(std::move(js));
  }
  j["initial"] = game.states.at(game.initial).id;
  j["actions"] = game.action_names;
  j["transitions"] = json::array();
  for (const auto& s : game.states) {
    for (const auto& act : s.actions) {
      json jt{{"from", s.id}, {"action", game.action_names.at(act.action)}};
      jt["to"] = json::array();
      for (const auto& tr : act.support) {
        json je{{"state", game.states.at(tr.target).id}};
        if (tr.prob.exact) {
          je["prob_num"] = tr.prob.exact->num;
          je["prob_den"] = tr.prob.exact->den;
        } else {
          je["prob"] = tr.prob.value;
        }
        jt["to"].push_back(std::move(je));
      }
      j["transitions"].push_back(std::move(jt));
    }
  }
  return j.dump(2) + "\n";
}

StochasticGame game_from_json(const std::string& text) {
  json j = parse(text);
  StochasticGame game;
  for (const auto& js : j.at("states")) {
    GameState s;
    s.id = js.at("id").get<std::string>();
    std::string owner = js.at("owner").get<std::string>();
    if (owner != "ego" && owner != "env") fail("BadJson", "owner must be ego or env");
    s.owner = owner == "ego" ? Owner::ego : Owner::env;
    s.inserted = js.value("inserted", false);
    s.origin = js.value("origin", s.id);
    game.states.push_back(std::move(s));
  }
  game.reindex();
  for (const auto& name : j.at("actions")) game.action_names.push_back(name.get<std::string>());
  game.initial = game.state_index(j.at("initial").get<std::string>());
  if (game.initial < 0) fail("BadJson", "initial state not found");
  for (const auto& jt : j.at("transitions")) {
    int from = game.state_index(jt.at("from").get<std::string>());
    if (from < 0) fail("BadJson", "unknown state in transitions");
    int action = game.action_index(jt.at("action").get<std::string>());
    if (action < 0) fail("BadJson", "unknown action " + jt.at("action").get<std::string>());
    GameAction act;
    act.action = action;
    for (const auto& je : jt.at("to")) {
      Transition tr;
      tr.target = game.state_index(je.at("state").get<std::string>());
      if (tr.target < 0) fail("BadJson", "unknown target state");
      if (je.contains("prob_num")) {
        tr.prob = Prob::from_rational(je.at("prob_num").get<std::int64_t>(),
                                      je.at("prob_den").get<std::int64_t>());
        if (tr.prob.value < 0) fail("BadJson", "invalid rational probability");
      } else {
        tr.prob = Prob::from_double(je.at("prob").get<double>());
      }
      act.support.push_back(tr);
    }
    game.states[from].actions.push_back(std::move(act));
  }
  return game;
}

std::string monitor_to_json(const Monitor& monitor) {
  json j;
  j["mstates"] = monitor.mstates;
  j["init"] = monitor.mstates.at(monitor.init);
  j["accepting"] = json::array();
  for (std::size_t i = 0; i < monitor.mstates.size(); ++i)
    if (monitor.accepting[i]) j["accepting"].push_back(monitor.mstates[i]);
  j["delta"] = json::array();
  for (const auto& [key, to] : monitor.delta)
    j["delta"].push_back(json{{"from", monitor.mstates.at(key.first)},
                              {"obs", key.second},
                              {"to", monitor.mstates.at(to)}});
  if (monitor.fallback) j["default"] = monitor.mstates.at(*monitor.fallback);
  return j.dump(2) + "\n";
}

Monitor monitor_from_json(const std::string& text) {
  json j = parse(text);
  Monitor m;
  for (const auto& s : j.at("mstates")) m.mstates.push_back(s.get<std::string>());
  m.init = m.mstate_index(j.at("init").get<std::string>());
  if (m.init < 0) fail("BadJson", "monitor init state not found");
  m.accepting.assign(m.mstates.size(), false);
  for (const auto& s : j.at("accepting")) {
    int q = m.mstate_index(s.get<std::string>());
    if (q < 0) fail("BadJson", "unknown accepting state");
    m.accepting[q] = true;
  }
  for (const auto& jd : j.at("delta")) {
    int from = m.mstate_index(jd.at("from").get<std::string>());
    int to = m.mstate_index(jd.at("to").get<std::string>());
    if (from < 0 || to < 0) fail("BadJson", "unknown monitor state in delta");
    m.delta[{from, jd.at("obs").get<std::string>()}] = to;
  }
  if (j.contains("default")) {
    int q = m.mstate_index(j.at("default").get<std::string>());
    if (q < 0) fail("BadJson", "unknown default state");
    m.fallback = q;
  }
  return m;
}

std::string core_to_json(const CoreSG& core) {
  json j;
  j["states"] = json::array();
  for (int n = 0; n < core.size(); ++n)
    j["states"].push_back(
        json{{"id", std::to_string(n)}, {"owner", owner_name(core.nodes[n].owner)}});
  j["initial"] = std::to_string(core.initial);
  j["actions"] = core.action_names;
  j["transitions"] = json::array();
  for (int n = 0; n < core.size(); ++n) {
    for (const auto& e : core.nodes[n].edges) {
      json jt{{"from", std::to_string(n)}, {"action", core.action_names.at(e.action)}};
      jt["to"] = json::array();
      for (const auto& [m, p] : e.succ)
        jt["to"].push_back(json{{"state", std::to_string(m)}, {"prob", p}});
      j["transitions"].push_back(std::move(jt));
    }
  }
  json prov;
  prov["top"] = core.top;
  prov["bot"] = core.bot;
  prov["longest_path"] = core.longest_path;
  prov["state_ids"] = core.state_ids;
  prov["nodes"] = json::array();
  for (int n = 0; n < core.size(); ++n) {
    const CoreNode& cn = core.nodes[n];
    prov["nodes"].push_back(json{{"id", n},
                                 {"state", cn.game_state},
                                 {"hard", cn.hard_q},
                                 {"soft", cn.soft_q},
                                 {"depth", cn.depth}});
  }
  j["provenance"] = std::move(prov);
  return j.dump(2) + "\n";
}

CoreSG core_from_json(const std::string& text) {
  json j = parse(text);
  CoreSG core;
  const auto& js = j.at("states");
  core.nodes.resize(js.size());
  for (std::size_t n = 0; n < js.size(); ++n) {
    if (js[n].at("id").get<std::string>() != std::to_string(n))
      fail("BadJson", "core node ids must be the topological numbering");
    core.nodes[n].owner =
        js[n].at("owner").get<std::string>() == "ego" ? Owner::ego : Owner::env;
  }
  for (const auto& name : j.at("actions")) core.action_names.push_back(name.get<std::string>());
  core.initial = std::stoi(j.at("initial").get<std::string>());
  for (const auto& jt : j.at("transitions")) {
    int from = std::stoi(jt.at("from").get<std::string>());
    CoreEdge e;
    e.action = -1;
    std::string aname = jt.at("action").get<std::string>();
    for (std::size_t i = 0; i < core.action_names.size(); ++i)
      if (core.action_names[i] == aname) e.action = static_cast<int>(i);
    if (e.action < 0) fail("BadJson", "unknown action in core");
    for (const auto& je : jt.at("to"))
      e.succ.push_back({std::stoi(je.at("state").get<std::string>()), je.at("prob").get<double>()});
    core.nodes[from].edges.push_back(std::move(e));
  }
  const json& prov = j.at("provenance");
  core.top = prov.at("top").get<int>();
  core.bot = prov.at("bot").get<int>();
  core.longest_path = prov.at("longest_path").get<int>();
  for (const auto& s : prov.at("state_ids")) core.state_ids.push_back(s.get<std::string>());
  for (const auto& jn : prov.at("nodes")) {
    int n = jn.at("id").get<int>();
    core.nodes[n].game_state = jn.at("state").get<int>();
    core.nodes[n].hard_q = jn.at("hard").get<int>();
    core.nodes[n].soft_q = jn.at("soft").get<int>();
    core.nodes[n].depth = jn.at("depth").get<int>();
  }
  return core;
}

std::string policy_to_json(const CoreSG& core, const PolicyTable& policy, Owner who) {
  json j;
  j["nodes"] = json::array();
  for (int n = 0; n < core.size(); ++n) {
    const CoreNode& node = core.nodes[n];
    if (node.owner != who || node.edges.empty()) continue;
    json jn{{"id", n}};
    jn["dist"] = json::array();
    for (std::size_t e = 0; e < node.edges.size(); ++e)
      jn["dist"].push_back(
          json{{"action", core.action_names.at(node.edges[e].action)}, {"prob", policy[n][e]}});
    j["nodes"].push_back(std::move(jn));
  }
  return j.dump(2) + "\n";
}

PolicyTable policy_from_json(const CoreSG& core, const std::string& text, Owner who) {
  json j = parse(text);
  PolicyTable policy(core.nodes.size());
  for (const auto& jn : j.at("nodes")) {
    int n = jn.at("id").get<int>();
    if (n < 0 || n >= core.size()) fail("BadJson", "policy node id out of range");
    const CoreNode& node = core.nodes[n];
    policy[n].assign(node.edges.size(), 0.0);
    for (const auto& jd : jn.at("dist")) {
      std::string aname = jd.at("action").get<std::string>();
      int edge = -1;
      for (std::size_t e = 0; e < node.edges.size(); ++e)
        if (core.action_names.at(node.edges[e].action) == aname) edge = static_cast<int>(e);
      if (edge < 0) fail("BadJson", "action " + aname + " not enabled at node " + std::to_string(n));
      policy[n][edge] = jd.at("prob").get<double>();
    }
  }
  check_policy(core, policy, who);
  return policy;
}

std::string tables_to_json(const FrontTables& tables) {
  json j;
  j["kappa"] = tables.kappa_certified;
  j["kappa_requested"] = tables.kappa_requested;
  j["grid"] = json::array();
  for (double l : tables.grid) j["grid"].push_back(lambda_to_json(l));
  j["nodes"] = json::array();
  for (int n = 0; n < tables.node_count(); ++n) {
    json jn{{"id", n}, {"kappa", tables.kappa_certified}};
    jn["samples"] = json::array();
    for (int gi = 0; gi < tables.grid_size(); ++gi)
      jn["samples"].push_back(json{{"lambda", lambda_to_json(tables.grid[gi])},
                                   {"h", tables.h(gi, n)},
                                   {"p", tables.p(gi, n)}});
    j["nodes"].push_back(std::move(jn));
  }
  return j.dump(2) + "\n";
}

FrontTables tables_from_json(const std::string& text) {
  json j = parse(text);
  FrontTables tables;
  tables.kappa_certified = j.at("kappa").get<double>();
  tables.kappa_requested = j.value("kappa_requested", tables.kappa_certified);
  for (const auto& l : j.at("grid")) tables.grid.push_back(lambda_from_json(l));
  const auto& nodes = j.at("nodes");
  tables.h_.assign(tables.grid.size(), std::vector<double>(nodes.size(), 0.0));
  tables.p_.assign(tables.grid.size(), std::vector<double>(nodes.size(), 0.0));
  for (const auto& jn : nodes) {
    int n = jn.at("id").get<int>();
    const auto& samples = jn.at("samples");
    if (samples.size() != tables.grid.size())
      fail("BadJson", "table sample count does not match the grid");
    for (std::size_t gi = 0; gi < samples.size(); ++gi) {
      tables.h_[gi][n] = samples[gi].at("h").get<double>();
      tables.p_[gi][n] = samples[gi].at("p").get<double>();
    }
  }
  return tables;
}

std::string front_to_csv(const std::vector<FrontSample>& front) {
  std::ostringstream os;
  os << "lambda,p,h\n";
  char buf[128];
  for (const auto& s : front) {
    if (std::isinf(s.lambda)) {
      std::snprintf(buf, sizeof buf, "inf,%.12g,%.12g\n", s.p, s.h);
    } else {
      std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n", s.lambda, s.p, s.h);
    }
    os << buf;
  }
  return os.str();
}

std::string verdict_to_json(const Verdict& verdict) {
  json j;
  j["kind"] = feasibility_name(verdict.kind);
  j["target"] = json{{"p", verdict.target.p}, {"h", verdict.target.h}};
  j["p_error_band"] = verdict.p_error_band;
  if (!std::isnan(verdict.kappa)) j["kappa"] = verdict.kappa;
  if (verdict.kind == Feasibility::realizable) {
    json w;
    w["type"] = verdict.pair ? "pair" : "point";
    w["lambda1"] = lambda_to_json(verdict.lambda1);
    w["x1"] = json{{"p", verdict.x1.p}, {"h", verdict.x1.h}};
    if (verdict.pair) {
      w["lambda2"] = lambda_to_json(verdict.lambda2);
      w["x2"] = json{{"p", verdict.x2.p}, {"h", verdict.x2.h}};
      w["weight"] = verdict.weight;
    }
    j["witness"] = std::move(w);
  } else if (verdict.kind == Feasibility::unrealizable) {
    j["witness"] = json{{"type", "scalarization"},
                        {"dominating", json{{"p", verdict.dominating.p}, {"h", verdict.dominating.h}}},
                        {"weight_p", lambda_to_json(verdict.weight_p)},
                        {"weight_h", verdict.weight_h},
                        {"margin", verdict.margin}};
  } else {
    json u;
    if (!std::isnan(verdict.bracket_lo)) u["bracket_lo"] = lambda_to_json(verdict.bracket_lo);
    if (!std::isnan(verdict.bracket_hi)) u["bracket_hi"] = lambda_to_json(verdict.bracket_hi);
    if (!std::isnan(verdict.gap)) u["gap"] = verdict.gap;
    j["residual"] = std::move(u);
  }
  return j.dump(2) + "\n";
}

Verdict verdict_from_json(const std::string& text) {
  json j = parse(text);
  Verdict v;
  std::string kind = j.at("kind").get<std::string>();
  v.kind = kind == "realizable"    ? Feasibility::realizable
           : kind == "unrealizable" ? Feasibility::unrealizable
                                     : Feasibility::unknown;
  v.target.p = j.at("target").at("p").get<double>();
  v.target.h = j.at("target").at("h").get<double>();
  v.p_error_band = j.value("p_error_band", 0.0);
  if (j.contains("kappa")) v.kappa = j.at("kappa").get<double>();
  if (v.kind == Feasibility::realizable) {
    const json& w = j.at("witness");
    v.pair = w.at("type").get<std::string>() == "pair";
    v.lambda1 = lambda_from_json(w.at("lambda1"));
    v.x1 = {w.at("x1").at("p").get<double>(), w.at("x1").at("h").get<double>()};
    if (v.pair) {
      v.lambda2 = lambda_from_json(w.at("lambda2"));
      v.x2 = {w.at("x2").at("p").get<double>(), w.at("x2").at("h").get<double>()};
      v.weight = w.at("weight").get<double>();
    }
  } else if (v.kind == Feasibility::unrealizable) {
    const json& w = j.at("witness");
    v.dominating = {w.at("dominating").at("p").get<double>(),
                    w.at("dominating").at("h").get<double>()};
    v.weight_p = lambda_from_json(w.at("weight_p"));
    v.weight_h = w.at("weight_h").get<double>();
    v.margin = w.at("margin").get<double>();
  } else if (j.contains("residual")) {
    const json& u = j.at("residual");
    if (u.contains("bracket_lo")) v.bracket_lo = lambda_from_json(u.at("bracket_lo"));
    if (u.contains("bracket_hi")) v.bracket_hi = lambda_from_json(u.at("bracket_hi"));
    if (u.contains("gap")) v.gap = u.at("gap").get<double>();
  }
  return v;
}

std::string improviser_to_json(const Improviser& imp) {
  json j;
  if (imp.matching()) {
    j["kind"] = "matching";
    j["grid"] = json::array();
    for (double l : imp.tables->grid) j["grid"].push_back(lambda_to_json(l));
    j["kappa"] = imp.tables->kappa_certified;
    auto match_json = [](const Match& m) {
      return json{{"lo", m.lo}, {"hi", m.hi}, {"w", m.w}, {"h", m.h}, {"p", m.p}};
    };
    j["m1"] = match_json(imp.m1);
    if (imp.has_second) j["m2"] = match_json(imp.m2);
  } else {
    j["kind"] = "markov";
    j["policy1"] = json::parse(policy_to_json(*imp.core, *imp.pi1, Owner::ego));
    if (imp.has_second) j["policy2"] = json::parse(policy_to_json(*imp.core, *imp.pi2, Owner::ego));
  }
  j["weight"] = imp.w;
  return j.dump(2) + "\n";
}

Improviser improviser_from_json(const std::string& text, std::shared_ptr<const CoreSG> core,
                                int jobs) {
  json j = parse(text);
  Improviser imp;
  imp.core = core;
  imp.w = j.at("weight").get<double>();
  if (j.at("kind").get<std::string>() == "matching") {
    std::vector<double> grid;
    for (const auto& l : j.at("grid")) grid.push_back(lambda_from_json(l));
    imp.tables = std::make_shared<FrontTables>(compute_front_tables_on_grid(*core, grid, jobs));
    auto match_from = [&](const json& jm) {
      Match m;
      m.lo = jm.at("lo").get<int>();
      m.hi = jm.at("hi").get<int>();
      m.w = jm.at("w").get<double>();
      m.h = jm.at("h").get<double>();
      m.p = jm.at("p").get<double>();
      if (m.lo < 0 || m.hi >= static_cast<int>(grid.size()))
        fail("BadJson", "match indices out of range");
      return m;
    };
    imp.m1 = match_from(j.at("m1"));
    if (j.contains("m2")) {
      imp.m2 = match_from(j.at("m2"));
      imp.has_second = true;
    }
  } else {
    imp.pi1 = std::make_shared<PolicyTable>(
        policy_from_json(*core, j.at("policy1").dump(), Owner::ego));
    if (j.contains("policy2")) {
      imp.pi2 = std::make_shared<PolicyTable>(
          policy_from_json(*core, j.at("policy2").dump(), Owner::ego));
      imp.has_second = true;
    }
  }
  return imp;
}

std::string validation_to_json(const ValidationReport& report) {
  json j;
  auto issues = [](const std::vector<Issue>& list) {
    json out = json::array();
    for (const auto& issue : list)
      out.push_back(json{{"code", issue.code}, {"where", issue.where}, {"message", issue.message}});
    return out;
  };
  j["errors"] = issues(report.errors);
  j["warnings"] = issues(report.warnings);
  return j.dump(2) + "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("IoError", "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("IoError", "cannot write " + path);
  out << content;
}

}  // namespace erci
