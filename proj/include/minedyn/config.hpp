#ifndef MINEDYN_CONFIG_HPP
#define MINEDYN_CONFIG_HPP

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "minedyn/controller.hpp"
#include "minedyn/dynamics.hpp"
#include "minedyn/model.hpp"

namespace minedyn {

struct RunSettings {
  double x1_init = 0.1;
  double t_end = 50.0;
  double dt = kDefaultDt;
  double tol = 1e-6;
};

struct SweepRange {
  double r_from;
  double r_to;
  double step;
  bool ascending;

  /// Rewards visited leg by leg: r_from, r_from +- step, ... up to r_to.
  std::vector<double> path() const;
};

struct RegionMapRange {
  double m_from = 1.0;
  double m_to = 10.0;
  double rd_from = 0.01;
  double rd_to = 1.0;
  int m_cells = 64;
  int rd_cells = 64;
};

struct AgentSettings {
  int n_strategic;
  int seeds;  // number of independent runs; seed values start at a CLI base
  double revision_rate = 1.0;
  double sample_dt = 0.1;
};

/// Reward-feedback block of a scenario: either an explicit (gain, offset)
/// pair or design margins for synthesis.
struct ControllerInputs {
  double nominal_reward;
  double target_ratio;
  std::optional<double> gain;           // present together with switch_offset
  std::optional<double> switch_offset;
  double gain_margin = 0.01;    // used when gain/offset are not given
  double eps_fraction = 0.5;
};

/// One fully parsed scenario file.  `canonical` is the normalized serialized
/// form (after command-line overrides) that provenance digests are taken
/// over: identical canonical text means identical outputs.
struct ScenarioConfig {
  ModelParams params{1, 1, 1.0};
  std::variant<double, ControllerInputs> reward = 1.0;
  RunSettings run;
  std::optional<SweepRange> sweep;
  RegionMapRange region_map;
  std::optional<AgentSettings> agents;
  std::string canonical;
};

/// Parses and validates a scenario file.  `overrides` are "dotted.path=value"
/// assignments applied to the raw document before validation, so any scalar
/// field can be overridden from the command line.  Throws ConfigError with a
/// field-path diagnostic on any structural or domain violation.
ScenarioConfig load_scenario(const std::string& path,
                             const std::vector<std::string>& overrides = {});

/// Concrete reward policy for the scenario: the constant reward, the
/// explicit controller spec, or a spec synthesized from the design margins.
RewardPolicy resolve_policy(const ScenarioConfig& cfg);

/// Controller-spec file I/O: a flat document with keys m, n, d, R_star,
/// x_bar, K, eps (plus an ignorable provenance object).
void save_controller(const std::string& path, const ModelParams& p,
                     const ControllerSpec& spec, const std::string& digest);
std::pair<ModelParams, ControllerSpec> load_controller(const std::string& path);

/// Accepts either a scenario file with a controller reward block or a flat
/// controller-spec file, returning the model and spec in both cases.
std::pair<ModelParams, ControllerSpec> load_controller_input(
    const std::string& path);

}  // namespace minedyn

#endif
