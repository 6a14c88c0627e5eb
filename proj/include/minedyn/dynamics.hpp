#ifndef MINEDYN_DYNAMICS_HPP
#define MINEDYN_DYNAMICS_HPP

#include <optional>
#include <variant>
#include <vector>

#include "minedyn/controller.hpp"
#include "minedyn/model.hpp"

namespace minedyn {

/// Reward schedule driving the dynamics: either a fixed reward or the
/// switched feedback law of a ControllerSpec.
using RewardPolicy = std::variant<double, ControllerSpec>;

double policy_reward(const ModelParams& p, const RewardPolicy& policy,
                     double x1);

enum class EventKind {
  switch_crossed,  // trajectory hit the feedback switch point x1* + offset
  converged,       // state absorbed at an exact boundary equilibrium
  step_clamped     // a step left [0,1] and was clamped back
};
const char* to_string(EventKind k);

struct TrajectoryEvent {
  double t;
  EventKind kind;
};

/// Sampled solution of the participation dynamics.  times / states / rewards
/// run in parallel; times are strictly increasing and states stay in [0,1].
/// Crossing the feedback switch inserts one extra sample at the located
/// crossing, so spacing is the step size except around such events.
struct Trajectory {
  std::vector<double> times;
  std::vector<double> states;
  std::vector<double> rewards;
  std::vector<TrajectoryEvent> events;
};

struct StepResult {
  double x1;
  bool clamped;
};

/// One explicit fourth-order Runge-Kutta step of the participation dynamics,
/// with the policy's reward evaluated at every internal stage; the result is
/// clamped to [0,1].  Throws NumericError on a non-finite value.
StepResult step(const ModelParams& p, const RewardPolicy& policy, double x1,
                double dt);

inline constexpr double kDefaultDt = 1e-3;  // model-time units

/// Fixed-step integration over [0, t_end] (final partial step allowed).
/// While the state is on one side of a feedback policy's switch point, the
/// stages use that side's reward law; a step that straddles the switch is
/// bisected to locate the crossing within 1e-10 in state, the state snaps to
/// the switch point, and the law changes only from there on.  Throws
/// ConfigError when the horizon needs more steps than the budget allows and
/// NumericError on non-finite states.
Trajectory integrate(const ModelParams& p, const RewardPolicy& policy,
                     double x1_init, double t_end, double dt = kDefaultDt);

/// Outcome of running the dynamics to rest.  `limit` is the exact rest point
/// (0, 1, or an interior equilibrium of the policy's closed loop) when
/// settled, else the last state reached.  `settle_time` is the first time
/// the state entered the tol-band of the limit and stayed there.
struct SettleResult {
  double limit;
  bool settled;
  std::optional<double> settle_time;
  double final_state;
  double elapsed;
};

/// Integrates until the field magnitude drops below tol * max(1, |x1|) with
/// the state within tol of a rest point of the policy's closed loop, or
/// until t_max.  A rest point only qualifies while the flow moves toward it
/// (or sits on it), unless the field slope there is within the marginal band
/// of zero - at a stability exchange the state parks wherever the field
/// vanishes.
SettleResult settle(const ModelParams& p, const RewardPolicy& policy,
                    double x1_init, double tol, double t_max,
                    double dt = kDefaultDt);

/// Nudge applied to a carried-over sweep state sitting exactly on a boundary
/// equilibrium; 0 and 1 are fixed points for every reward, so without it a
/// quasi-static sweep could never leave a destabilized boundary.
inline constexpr double kSeedPerturbation = 1e-6;

struct SweepPoint {
  int leg;
  double reward;
  double settled_x1;
  double settle_time;
};

/// Quasi-static sweep: settle at rewards[0] from x1_seed, then settle each
/// subsequent leg from the previous leg's limit (perturbed off exact
/// boundary equilibria by kSeedPerturbation toward the interior).  Increasing
/// sweeps jump 0 -> 1 just past R = d/m, decreasing sweeps jump 1 -> 0 just
/// past R = d/(m+n).  Throws NumericError naming the leg if one fails to
/// settle within t_max.
std::vector<SweepPoint> hysteresis_sweep(const ModelParams& p,
                                         const std::vector<double>& rewards,
                                         double x1_seed, double settle_tol,
                                         double t_max = 500.0,
                                         double dt = kDefaultDt);

}  // namespace minedyn

#endif
