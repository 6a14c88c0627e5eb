#ifndef MINEDYN_CONTROLLER_HPP
#define MINEDYN_CONTROLLER_HPP

#include <optional>
#include <string>
#include <vector>

#include "minedyn/equilibrium.hpp"
#include "minedyn/model.hpp"

namespace minedyn {

struct Trajectory;  // dynamics.hpp

/// Switched reward-feedback law: while participation sits below the switch
/// point x1* + eps, the reward is boosted proportionally to the distance from
/// the target ratio; at or above the switch point it reverts to the nominal
/// value.
///
///   reward(x1) = nominal + gain * (target - x1)   if x1 < x1* + offset
///              = nominal                          otherwise
///
/// where x1* is the interior equilibrium under the nominal reward.
struct ControllerSpec {
  double nominal_reward;  // fixed reward away from the boosted region
  double target_ratio;    // anchor the boost pulls toward, in (x1*, 1]
  double gain;            // proportional gain, > gain_lower_bound
  double switch_offset;   // switch point sits at x1* + switch_offset
};

/// Why a nominal reward below d/(m+n) cannot keep everyone mining: the
/// feedback is inert at full participation, where the field slope under the
/// nominal reward alone is positive (full participation repels).
struct InfeasibilityReport {
  double nominal_reward;
  double boundary_slope;  // field slope at x1 = 1, positive here
};

/// Result of the stabilizability test.  `report` is set exactly when the
/// nominal reward is strictly below d/(m+n); `marginal` flags rewards within
/// the band around the threshold where the slope is numerically zero.
struct UnstabilizableCheck {
  std::optional<InfeasibilityReport> report;
  bool marginal = false;
};

UnstabilizableCheck check_unstabilizable(const ModelParams& p,
                                         double nominal_reward,
                                         double marginal_band = kMarginalBand);

/// Quadratic numerator of the closed-loop growth rate while the boost is
/// active.  With a = -gain*n, b = gain*n*target - gain*m + nominal*n,
/// c = nominal*m + gain*m*target - d, this is a*x1^2 + b*x1 + c; the
/// closed-loop field in the boosted region factors as
///   x1 (1 - x1) * quadratic(x1) / (m + n*x1)^2.
double closed_loop_quadratic(const ModelParams& p, const ControllerSpec& spec,
                             double x1);

struct QuadraticRoots {
  double lower;  // below zero for every valid spec
  double upper;  // above x1* for every valid spec
};

/// Both real roots of the closed-loop quadratic, computed cancellation-free
/// (larger-magnitude root from the sign-aware formula, the other via the
/// coefficient product).  Throws NumericError if the discriminant is
/// negative, which requires a gain below the lower bound.
QuadraticRoots closed_loop_quadratic_roots(const ModelParams& p,
                                           const ControllerSpec& spec);

/// Smallest gain that keeps the closed-loop field positive at vanishing
/// participation: (d - nominal*m) / (m * target).  Throws InfeasibleError
/// unless d/(m+n) < nominal < d/m and x1* < target <= 1.
double gain_lower_bound(const ModelParams& p, double nominal_reward,
                        double target_ratio);

/// Admissible switch offsets for a spec whose gain already clears the lower
/// bound: (0, upper_root - x1*) open when the upper root is below 1, else
/// (0, 1 - x1*] closed.  Throws InfeasibleError when the gain does not clear
/// the bound.
Interval eps_interval(const ModelParams& p, const ControllerSpec& spec);

/// Constructive design: gain = lower bound * (1 + gain_margin) and
/// switch_offset = eps_fraction * admissible upper limit (open endpoints are
/// pulled in by 1e-9 first).  Margins must lie in (0, 1]; the result always
/// passes validate_controller.
ControllerSpec synthesize(const ModelParams& p, double nominal_reward,
                          double target_ratio, double gain_margin,
                          double eps_fraction);

struct ValidationReport {
  bool valid = false;
  std::vector<std::string> violations;  // one line per failed condition
};

/// Full feasibility audit of a spec: nominal-reward window, target placement,
/// gain bound, switch-offset interval, and a 1000-point numeric check that
/// the closed-loop field is positive across (0,1).  Reports violations
/// instead of throwing.
ValidationReport validate_controller(const ModelParams& p,
                                     const ControllerSpec& spec);

/// The switched reward law itself.  Continuous on [0,1] exactly when
/// switch_offset equals target_ratio - x1*.
double feedback_reward(const ModelParams& p, const ControllerSpec& spec,
                       double x1);

/// Closed-loop participation growth rate: the open-loop field evaluated
/// under feedback_reward.
double closed_loop_field(const ModelParams& p, const ControllerSpec& spec,
                         double x1);

/// Settling behaviour of one closed-loop run.  Times are "enters and
/// remains" (the condition holds from that sample to the end of the
/// trajectory); a condition that never locks in within the horizon is left
/// empty.  A high gain with a narrow boost band recovers the nominal reward
/// fast but approaches full participation slowly, and vice versa.
struct TradeOffMetrics {
  std::optional<double> state_settle_time;     // |x1 - 1| <= state_tol onward
  std::optional<double> reward_recovery_time;  // |R - nominal| <= reward_tol onward
};

TradeOffMetrics trade_off_metrics(const Trajectory& traj,
                                  const ControllerSpec& spec, double state_tol,
                                  double reward_tol);

}  // namespace minedyn

#endif
