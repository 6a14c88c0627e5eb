#include "minedyn/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "minedyn/csv.hpp"
#include "minedyn/errors.hpp"

namespace minedyn {

using nlohmann::json;

std::vector<double> SweepRange::path() const {
  const double dir = ascending ? 1.0 : -1.0;
  const double span = std::fabs(r_to - r_from);
  const long long legs =
      static_cast<long long>(std::floor(span / step + 1e-9)) + 1;
  std::vector<double> out;
  out.reserve(static_cast<size_t>(legs));
  for (long long k = 0; k < legs; ++k) out.push_back(r_from + dir * step * k);
  return out;
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json parse_json(const std::string& text, const std::string& path) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void apply_overrides(json& j, const std::vector<std::string>& overrides) {
  for (const std::string& ov : overrides) {
    const size_t eq = ov.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError("override must look like path.to.field=value: '" + ov +
                        "'");
    std::string pointer = "/" + ov.substr(0, eq);
    for (auto& ch : pointer)
      if (ch == '.') ch = '/';
    json value;
    try {
      value = json::parse(ov.substr(eq + 1));
    } catch (const json::parse_error&) {
      value = ov.substr(eq + 1);  // bare strings pass through unquoted
    }
    try {
      j[json::json_pointer(pointer)] = value;
    } catch (const json::exception& e) {
      throw ConfigError("cannot apply override '" + ov + "': " + e.what());
    }
  }
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed)
      if (item.key() == key) {
        known = true;
        break;
      }
    if (!known)
      throw ConfigError(where + ": unknown field '" + item.key() + "'");
  }
}

const json& need_obj(const json& j, const std::string& where,
                     const char* key) {
  if (!j.contains(key))
    throw ConfigError(where + ": missing required block '" + key + "'");
  const json& v = j.at(key);
  if (!v.is_object())
    throw ConfigError(where + "." + key + ": expected an object");
  return v;
}

double need_num(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key))
    throw ConfigError(where + ": missing required field '" + key + "'");
  const json& v = obj.at(key);
  if (!v.is_number())
    throw ConfigError(where + "." + key + ": expected a number");
  return v.get<double>();
}

double opt_num(const json& obj, const std::string& where, const char* key,
               double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number())
    throw ConfigError(where + "." + key + ": expected a number");
  return v.get<double>();
}

int need_int(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key))
    throw ConfigError(where + ": missing required field '" + key + "'");
  const json& v = obj.at(key);
  if (!v.is_number_integer())
    throw ConfigError(where + "." + key + ": expected an integer");
  return v.get<int>();
}

int opt_int(const json& obj, const std::string& where, const char* key,
            int fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer())
    throw ConfigError(where + "." + key + ": expected an integer");
  return v.get<int>();
}

ModelParams parse_model(const json& root) {
  const json& model = need_obj(root, "config", "model");
  check_keys(model, "model", {"m", "n", "d", "h", "c", "v"});
  const int m = need_int(model, "model", "m");
  const int n = need_int(model, "model", "n");
  const bool has_d = model.contains("d");
  const bool has_env =
      model.contains("h") || model.contains("c") || model.contains("v");
  if (has_d == has_env)
    throw ConfigError(
        "model: give either d or the (h, c, v) triple, and not both");
  try {
    if (has_d) return ModelParams(m, n, need_num(model, "model", "d"));
    const MiningEnvironment env(need_int(model, "model", "v"),
                                need_num(model, "model", "c"),
                                need_num(model, "model", "h"));
    return ModelParams::from_environment(m, n, env);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("model: ") + e.what());
  } catch (const std::range_error& e) {
    throw ConfigError(std::string("model.v: ") + e.what());
  }
}

std::variant<double, ControllerInputs> parse_reward(const json& root) {
  const json& reward = need_obj(root, "config", "reward");
  check_keys(reward, "reward", {"R", "controller"});
  const bool has_const = reward.contains("R");
  const bool has_ctrl = reward.contains("controller");
  if (has_const == has_ctrl)
    throw ConfigError(
        "reward: give exactly one of R or a controller block");
  if (has_const) {
    const double r = need_num(reward, "reward", "R");
    if (!(r > 0.0)) throw ConfigError("reward.R: must be positive");
    return r;
  }
  const json& ctrl = reward.at("controller");
  if (!ctrl.is_object())
    throw ConfigError("reward.controller: expected an object");
  check_keys(ctrl, "reward.controller",
             {"R_star", "x_bar", "K", "eps", "gain_margin", "eps_fraction"});
  ControllerInputs ci;
  ci.nominal_reward = need_num(ctrl, "reward.controller", "R_star");
  ci.target_ratio = need_num(ctrl, "reward.controller", "x_bar");
  if (!(ci.nominal_reward > 0.0))
    throw ConfigError("reward.controller.R_star: must be positive");
  const bool has_k = ctrl.contains("K");
  const bool has_eps = ctrl.contains("eps");
  if (has_k != has_eps)
    throw ConfigError(
        "reward.controller: give K and eps together, or neither");
  if (has_k) {
    ci.gain = need_num(ctrl, "reward.controller", "K");
    ci.switch_offset = need_num(ctrl, "reward.controller", "eps");
  }
  ci.gain_margin =
      opt_num(ctrl, "reward.controller", "gain_margin", ci.gain_margin);
  ci.eps_fraction =
      opt_num(ctrl, "reward.controller", "eps_fraction", ci.eps_fraction);
  if (!(ci.gain_margin > 0.0 && ci.gain_margin <= 1.0))
    throw ConfigError("reward.controller.gain_margin: must lie in (0, 1]");
  if (!(ci.eps_fraction > 0.0 && ci.eps_fraction <= 1.0))
    throw ConfigError("reward.controller.eps_fraction: must lie in (0, 1]");
  return ci;
}

RunSettings parse_run(const json& root) {
  RunSettings run;
  if (!root.contains("run")) return run;
  const json& r = root.at("run");
  if (!r.is_object()) throw ConfigError("run: expected an object");
  check_keys(r, "run", {"x1_init", "t_end", "dt", "tol"});
  run.x1_init = opt_num(r, "run", "x1_init", run.x1_init);
  run.t_end = opt_num(r, "run", "t_end", run.t_end);
  run.dt = opt_num(r, "run", "dt", run.dt);
  run.tol = opt_num(r, "run", "tol", run.tol);
  if (!(run.x1_init >= 0.0 && run.x1_init <= 1.0))
    throw ConfigError("run.x1_init: must lie in [0, 1]");
  if (!(run.t_end > 0.0)) throw ConfigError("run.t_end: must be positive");
  if (!(run.dt > 0.0)) throw ConfigError("run.dt: must be positive");
  if (!(run.tol > 0.0)) throw ConfigError("run.tol: must be positive");
  return run;
}

std::optional<SweepRange> parse_sweep(const json& root) {
  if (!root.contains("sweep")) return std::nullopt;
  const json& s = root.at("sweep");
  if (!s.is_object()) throw ConfigError("sweep: expected an object");
  check_keys(s, "sweep", {"R_from", "R_to", "step", "direction"});
  SweepRange sweep;
  sweep.r_from = need_num(s, "sweep", "R_from");
  sweep.r_to = need_num(s, "sweep", "R_to");
  sweep.step = need_num(s, "sweep", "step");
  if (!s.contains("direction") || !s.at("direction").is_string())
    throw ConfigError("sweep.direction: expected \"up\" or \"down\"");
  const std::string dir = s.at("direction").get<std::string>();
  if (dir == "up")
    sweep.ascending = true;
  else if (dir == "down")
    sweep.ascending = false;
  else
    throw ConfigError("sweep.direction: expected \"up\" or \"down\"");
  if (!(sweep.step > 0.0)) throw ConfigError("sweep.step: must be positive");
  if (!(sweep.r_from > 0.0 && sweep.r_to > 0.0))
    throw ConfigError("sweep: rewards must be positive");
  if (sweep.ascending ? sweep.r_to < sweep.r_from : sweep.r_to > sweep.r_from)
    throw ConfigError("sweep: direction contradicts the R_from/R_to order");
  return sweep;
}

RegionMapRange parse_region_map(const json& root) {
  RegionMapRange rm;
  if (!root.contains("region_map")) return rm;
  const json& r = root.at("region_map");
  if (!r.is_object()) throw ConfigError("region_map: expected an object");
  check_keys(r, "region_map",
             {"m_from", "m_to", "rd_from", "rd_to", "m_cells", "rd_cells"});
  rm.m_from = opt_num(r, "region_map", "m_from", rm.m_from);
  rm.m_to = opt_num(r, "region_map", "m_to", rm.m_to);
  rm.rd_from = opt_num(r, "region_map", "rd_from", rm.rd_from);
  rm.rd_to = opt_num(r, "region_map", "rd_to", rm.rd_to);
  rm.m_cells = opt_int(r, "region_map", "m_cells", rm.m_cells);
  rm.rd_cells = opt_int(r, "region_map", "rd_cells", rm.rd_cells);
  if (!(rm.m_from >= 1.0) || !(rm.m_to >= rm.m_from))
    throw ConfigError("region_map: need 1 <= m_from <= m_to");
  if (!(rm.rd_from > 0.0) || !(rm.rd_to >= rm.rd_from))
    throw ConfigError("region_map: need 0 < rd_from <= rd_to");
  if (rm.m_cells < 1 || rm.rd_cells < 1)
    throw ConfigError("region_map: cell counts must be positive");
  return rm;
}

std::optional<AgentSettings> parse_agents(const json& root) {
  if (!root.contains("agents")) return std::nullopt;
  const json& a = root.at("agents");
  if (!a.is_object()) throw ConfigError("agents: expected an object");
  check_keys(a, "agents",
             {"n_strategic", "seeds", "revision_rate", "sample_dt"});
  AgentSettings ag;
  ag.n_strategic = need_int(a, "agents", "n_strategic");
  ag.seeds = need_int(a, "agents", "seeds");
  ag.revision_rate = opt_num(a, "agents", "revision_rate", ag.revision_rate);
  ag.sample_dt = opt_num(a, "agents", "sample_dt", ag.sample_dt);
  if (ag.n_strategic < 2)
    throw ConfigError("agents.n_strategic: need at least 2 agents");
  if (ag.seeds < 1) throw ConfigError("agents.seeds: need at least one seed");
  if (!(ag.revision_rate > 0.0))
    throw ConfigError("agents.revision_rate: must be positive");
  if (!(ag.sample_dt > 0.0))
    throw ConfigError("agents.sample_dt: must be positive");
  return ag;
}

}  // namespace

ScenarioConfig load_scenario(const std::string& path,
                             const std::vector<std::string>& overrides) {
  json j = parse_json(read_file(path), path);
  if (!j.is_object()) throw ConfigError(path + ": expected a JSON object");
  apply_overrides(j, overrides);
  check_keys(j, "config",
             {"model", "reward", "run", "sweep", "region_map", "agents"});

  ScenarioConfig cfg;
  cfg.params = parse_model(j);
  cfg.reward = parse_reward(j);
  cfg.run = parse_run(j);
  cfg.sweep = parse_sweep(j);
  cfg.region_map = parse_region_map(j);
  cfg.agents = parse_agents(j);
  cfg.canonical = j.dump();
  return cfg;
}

RewardPolicy resolve_policy(const ScenarioConfig& cfg) {
  if (const double* r = std::get_if<double>(&cfg.reward)) return *r;
  const ControllerInputs& ci = std::get<ControllerInputs>(cfg.reward);
  if (ci.gain)
    return ControllerSpec{ci.nominal_reward, ci.target_ratio, *ci.gain,
                          *ci.switch_offset};
  return synthesize(cfg.params, ci.nominal_reward, ci.target_ratio,
                    ci.gain_margin, ci.eps_fraction);
}

void save_controller(const std::string& path, const ModelParams& p,
                     const ControllerSpec& spec, const std::string& digest) {
  json j;
  j["m"] = p.m;
  j["n"] = p.n;
  j["d"] = p.d;
  j["R_star"] = spec.nominal_reward;
  j["x_bar"] = spec.target_ratio;
  j["K"] = spec.gain;
  j["eps"] = spec.switch_offset;
  j["_provenance"] = {{"tool", std::string("minedyn ") + kToolVersion},
                      {"config_digest", digest}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << j.dump(2) << "\n";
}

std::pair<ModelParams, ControllerSpec> load_controller(const std::string& path) {
  const json j = parse_json(read_file(path), path);
  if (!j.is_object()) throw ConfigError(path + ": expected a JSON object");
  check_keys(j, "controller spec",
             {"m", "n", "d", "R_star", "x_bar", "K", "eps", "_provenance"});
  try {
    const ModelParams p(need_int(j, "controller spec", "m"),
                        need_int(j, "controller spec", "n"),
                        need_num(j, "controller spec", "d"));
    const ControllerSpec spec{need_num(j, "controller spec", "R_star"),
                              need_num(j, "controller spec", "x_bar"),
                              need_num(j, "controller spec", "K"),
                              need_num(j, "controller spec", "eps")};
    return {p, spec};
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("controller spec: ") + e.what());
  }
}

std::pair<ModelParams, ControllerSpec> load_controller_input(
    const std::string& path) {
  const json j = parse_json(read_file(path), path);
  if (j.is_object() && j.contains("model")) {
    const ScenarioConfig cfg = load_scenario(path);
    const ControllerInputs* ci = std::get_if<ControllerInputs>(&cfg.reward);
    if (!ci)
      throw ConfigError(path +
                        ": scenario has a constant reward, not a controller");
    const RewardPolicy policy = resolve_policy(cfg);
    return {cfg.params, std::get<ControllerSpec>(policy)};
  }
  return load_controller(path);
}

}  // namespace minedyn
