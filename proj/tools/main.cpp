// Command-line front end: every analysis is a subcommand driven by a JSON
// scenario file, emitting provenance-stamped CSV.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "minedyn/agents.hpp"
#include "minedyn/config.hpp"
#include "minedyn/controller.hpp"
#include "minedyn/csv.hpp"
#include "minedyn/dynamics.hpp"
#include "minedyn/equilibrium.hpp"
#include "minedyn/errors.hpp"
#include "minedyn/model.hpp"

namespace {

using namespace minedyn;

struct CommonOpts {
  std::string config;
  std::string out;
  std::vector<std::string> sets;
  uint64_t seed_base = 1;
};

void add_common(CLI::App* sub, CommonOpts& o) {
  sub->add_option("--config", o.config, "scenario file (JSON)")->required();
  sub->add_option("--out", o.out, "output path");
  sub->add_option("--set", o.sets,
                  "override a scalar config field: path.to.field=value");
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write file: " + path);
  return out;
}

const std::string& require_out(const CommonOpts& o) {
  if (o.out.empty()) throw ConfigError("this subcommand needs --out");
  return o.out;
}

double require_constant_reward(const ScenarioConfig& cfg, const char* cmd) {
  if (const double* r = std::get_if<double>(&cfg.reward)) return *r;
  throw ConfigError(std::string(cmd) +
                    " needs a constant reward (reward.R) in the config");
}

std::string aggregate_path(const std::string& out) {
  const size_t dot = out.find_last_of('.');
  const size_t slash = out.find_last_of("/\\");
  if (dot == std::string::npos ||
      (slash != std::string::npos && dot < slash))
    return out + "_aggregate";
  return out.substr(0, dot) + "_aggregate" + out.substr(dot);
}

int cmd_equilibria(const CommonOpts& o) {
  const ScenarioConfig cfg = load_scenario(o.config, o.sets);
  const double reward = require_constant_reward(cfg, "equilibria");
  const EquilibriumReport rep = classify_equilibria(cfg.params, reward);
  const InteriorEquilibrium& eq = *rep.eq_interior;

  std::cout << "region: " << to_string(rep.region) << "\n";
  std::cout << "x1 = 0: " << to_string(rep.eq_zero.stability) << "\n";
  std::cout << "x1 = 1: " << to_string(rep.eq_one.stability) << "\n";
  std::cout << "x1* = " << format_number(eq.value) << ": "
            << to_string(eq.stability)
            << (eq.in_unit_interval ? "" : " (outside (0,1))") << "\n";
  std::cout << "basin of 0: " << rep.basin_zero.to_string() << "\n";
  std::cout << "basin of 1: " << rep.basin_one.to_string() << "\n";

  if (!o.out.empty()) {
    const std::vector<BranchPoint> rows{
        {reward, 0.0, rep.eq_zero.stability, 0, false},
        {reward, 1.0, rep.eq_one.stability, 1, false},
        {reward, eq.value, eq.stability, 2, !eq.in_unit_interval}};
    auto out = open_out(o.out);
    write_branch_csv(out, rows, provenance_for(cfg.canonical));
  }
  return 0;
}

int cmd_simulate(const CommonOpts& o) {
  const ScenarioConfig cfg = load_scenario(o.config, o.sets);
  const RewardPolicy policy = resolve_policy(cfg);
  const Trajectory traj = integrate(cfg.params, policy, cfg.run.x1_init,
                                    cfg.run.t_end, cfg.run.dt);
  auto out = open_out(require_out(o));
  write_trajectory_csv(out, traj, provenance_for(cfg.canonical));
  return 0;
}

int cmd_bifurcate(const CommonOpts& o) {
  const ScenarioConfig cfg = load_scenario(o.config, o.sets);
  if (!cfg.sweep)
    throw ConfigError("bifurcate needs a sweep block for the reward range");
  const double lo = std::min(cfg.sweep->r_from, cfg.sweep->r_to);
  const double hi = std::max(cfg.sweep->r_from, cfg.sweep->r_to);
  const int samples = static_cast<int>(cfg.sweep->path().size());
  const auto rows = bifurcation_branches(cfg.params, lo, hi, samples);
  auto out = open_out(require_out(o));
  write_branch_csv(out, rows, provenance_for(cfg.canonical));
  return 0;
}

int cmd_region_map(const CommonOpts& o) {
  const ScenarioConfig cfg = load_scenario(o.config, o.sets);
  const RegionMapRange& rm = cfg.region_map;
  const auto cells = region_map(cfg.params.n, rm.m_from, rm.m_to, rm.rd_from,
                                rm.rd_to, rm.m_cells, rm.rd_cells);
  auto out = open_out(require_out(o));
  write_region_csv(out, cells, provenance_for(cfg.canonical));
  return 0;
}

int cmd_sweep(const CommonOpts& o) {
  const ScenarioConfig cfg = load_scenario(o.config, o.sets);
  if (!cfg.sweep) throw ConfigError("sweep needs a sweep block in the config");
  const auto points =
      hysteresis_sweep(cfg.params, cfg.sweep->path(), cfg.run.x1_init,
                       cfg.run.tol, cfg.run.t_end, cfg.run.dt);
  auto out = open_out(require_out(o));
  write_sweep_csv(out, points, provenance_for(cfg.canonical));
  return 0;
}

int cmd_controller_synth(const CommonOpts& o) {
  const ScenarioConfig cfg = load_scenario(o.config, o.sets);
  const ControllerInputs* ci = std::get_if<ControllerInputs>(&cfg.reward);
  if (!ci)
    throw ConfigError("controller synth needs a reward.controller block");

  const UnstabilizableCheck chk =
      check_unstabilizable(cfg.params, ci->nominal_reward);
  if (chk.report)
    throw InfeasibleError(
        "nominal reward " + format_number(ci->nominal_reward) +
        " lies below d/(m+n) = " +
        format_number(cfg.params.d / (cfg.params.m + cfg.params.n)) +
        "; the field slope at full participation is " +
        format_number(chk.report->boundary_slope) +
        " > 0, so no gain can hold the population there");

  const ControllerSpec spec =
      ci->gain ? ControllerSpec{ci->nominal_reward, ci->target_ratio,
                                *ci->gain, *ci->switch_offset}
               : synthesize(cfg.params, ci->nominal_reward, ci->target_ratio,
                            ci->gain_margin, ci->eps_fraction);

  std::cout << "x1_star = "
            << format_number(
                   interior_equilibrium(cfg.params, spec.nominal_reward).value)
            << "\n";
  std::cout << "K_min = "
            << format_number(gain_lower_bound(cfg.params, spec.nominal_reward,
                                              spec.target_ratio))
            << "\n";
  std::cout << "K = " << format_number(spec.gain) << "\n";
  const Interval iv = eps_interval(cfg.params, spec);
  std::cout << "eps_interval = " << iv.to_string() << "\n";
  std::cout << "eps = " << format_number(spec.switch_offset) << "\n";

  const ValidationReport rep = validate_controller(cfg.params, spec);
  if (!rep.valid) {
    for (const auto& v : rep.violations)
      std::cout << "violation: " << v << "\n";
    throw InfeasibleError("controller spec fails validation");
  }
  std::cout << "valid\n";
  if (!o.out.empty())
    save_controller(o.out, cfg.params, spec,
                    provenance_for(cfg.canonical).config_digest);
  return 0;
}

int cmd_controller_validate(const CommonOpts& o) {
  const auto [params, spec] = load_controller_input(o.config);
  const ValidationReport rep = validate_controller(params, spec);
  if (rep.valid) {
    std::cout << "valid\n";
    return 0;
  }
  for (const auto& v : rep.violations) std::cout << "violation: " << v << "\n";
  return 4;
}

int cmd_agents(const CommonOpts& o) {
  const ScenarioConfig cfg = load_scenario(o.config, o.sets);
  if (!cfg.agents)
    throw ConfigError("agents needs an agents block in the config");
  const AgentSettings& ag = *cfg.agents;
  const RewardPolicy policy = resolve_policy(cfg);

  std::vector<uint64_t> seeds;
  seeds.reserve(static_cast<size_t>(ag.seeds));
  for (int i = 0; i < ag.seeds; ++i) seeds.push_back(o.seed_base + i);

  const auto runs =
      simulate_ensemble(cfg.params, policy, ag.n_strategic, cfg.run.x1_init,
                        ag.revision_rate, seeds, cfg.run.t_end, ag.sample_dt);
  const EnsembleStats stats = aggregate(runs);

  const Provenance prov = provenance_for(cfg.canonical);
  const std::string& out_path = require_out(o);
  auto out = open_out(out_path);
  write_agents_csv(out, runs, prov);
  auto agg = open_out(aggregate_path(out_path));
  write_aggregate_csv(agg, stats, prov);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"evolutionary-game analysis of mining participation"};
  app.require_subcommand(1);
  CommonOpts o;

  CLI::App* eq = app.add_subcommand(
      "equilibria", "classify the rest points under one constant reward");
  CLI::App* sim = app.add_subcommand(
      "simulate", "integrate the participation dynamics to CSV");
  CLI::App* bif = app.add_subcommand(
      "bifurcate", "tabulate equilibrium branches over a reward range");
  CLI::App* reg = app.add_subcommand(
      "region-map", "tag the (m, R/d) parameter plane by region");
  CLI::App* swp = app.add_subcommand(
      "sweep", "quasi-static hysteresis sweep over rewards");
  CLI::App* ctrl =
      app.add_subcommand("controller", "feedback-reward design and audit");
  ctrl->require_subcommand(1);
  CLI::App* synth =
      ctrl->add_subcommand("synth", "design a feedback reward law");
  CLI::App* val =
      ctrl->add_subcommand("validate", "audit a controller spec file");
  CLI::App* ag = app.add_subcommand(
      "agents", "finite-population Monte Carlo validation runs");

  for (CLI::App* sub : {eq, sim, bif, reg, swp, synth, val, ag})
    add_common(sub, o);
  ag->add_option("--seed", o.seed_base, "base seed; runs use seed, seed+1, ...");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (eq->parsed()) return cmd_equilibria(o);
    if (sim->parsed()) return cmd_simulate(o);
    if (bif->parsed()) return cmd_bifurcate(o);
    if (reg->parsed()) return cmd_region_map(o);
    if (swp->parsed()) return cmd_sweep(o);
    if (ctrl->parsed())
      return synth->parsed() ? cmd_controller_synth(o)
                             : cmd_controller_validate(o);
    if (ag->parsed()) return cmd_agents(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 4;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::range_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
