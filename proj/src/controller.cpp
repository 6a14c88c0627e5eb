#include "minedyn/controller.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "minedyn/dynamics.hpp"
#include "minedyn/errors.hpp"

namespace minedyn {

UnstabilizableCheck check_unstabilizable(const ModelParams& p,
                                         double nominal_reward,
                                         double marginal_band) {
  if (!(nominal_reward > 0.0))
    throw std::invalid_argument("nominal reward must be positive");
  const double threshold = p.d / (p.m + p.n);
  UnstabilizableCheck chk;
  chk.marginal = std::fabs(nominal_reward - threshold) < marginal_band * p.d;
  if (!chk.marginal && nominal_reward < threshold)
    chk.report = InfeasibilityReport{nominal_reward,
                                     field_slope_at_one(p, nominal_reward)};
  return chk;
}

namespace {

struct QuadCoeffs {
  double a, b, c;
};

QuadCoeffs quad_coeffs(const ModelParams& p, const ControllerSpec& s) {
  const double K = s.gain;
  return {-K * p.n,
          K * p.n * s.target_ratio - K * p.m + s.nominal_reward * p.n,
          s.nominal_reward * p.m + K * p.m * s.target_ratio - p.d};
}

}  // namespace

double closed_loop_quadratic(const ModelParams& p, const ControllerSpec& spec,
                             double x1) {
  const QuadCoeffs q = quad_coeffs(p, spec);
  return (q.a * x1 + q.b) * x1 + q.c;
}

QuadraticRoots closed_loop_quadratic_roots(const ModelParams& p,
                                           const ControllerSpec& spec) {
  if (!(spec.gain > 0.0)) throw std::invalid_argument("gain must be positive");
  const QuadCoeffs q = quad_coeffs(p, spec);
  const double disc = q.b * q.b - 4.0 * q.a * q.c;
  if (disc < 0.0)
    throw NumericError("closed-loop quadratic has no real roots");
  if (disc == 0.0) {
    const double r = -q.b / (2.0 * q.a);
    return {r, r};
  }
  // Sign-aware formula: the larger-magnitude root avoids cancellation, the
  // other follows from the root product c/a.
  const double big = -(q.b + std::copysign(std::sqrt(disc), q.b)) / 2.0;
  const double r1 = big / q.a;
  const double r2 = q.c / big;
  return r1 < r2 ? QuadraticRoots{r1, r2} : QuadraticRoots{r2, r1};
}

double gain_lower_bound(const ModelParams& p, double nominal_reward,
                        double target_ratio) {
  if (!(p.d / (p.m + p.n) < nominal_reward && nominal_reward < p.d / p.m))
    throw InfeasibleError("nominal reward must lie strictly in (d/(m+n), d/m)");
  const double x1s = interior_equilibrium(p, nominal_reward).value;
  if (!(x1s < target_ratio && target_ratio <= 1.0))
    throw InfeasibleError(
        "target ratio must lie strictly above the interior equilibrium and at "
        "most 1");
  return (p.d - nominal_reward * p.m) / (p.m * target_ratio);
}

Interval eps_interval(const ModelParams& p, const ControllerSpec& spec) {
  const double floor =
      gain_lower_bound(p, spec.nominal_reward, spec.target_ratio);
  if (!(spec.gain > floor))
    throw InfeasibleError("gain does not clear the lower bound");
  const double x1s = interior_equilibrium(p, spec.nominal_reward).value;
  const double upper = closed_loop_quadratic_roots(p, spec).upper;
  if (upper < 1.0) return Interval{0.0, upper - x1s, false, false};
  return Interval{0.0, 1.0 - x1s, false, true};
}

ControllerSpec synthesize(const ModelParams& p, double nominal_reward,
                          double target_ratio, double gain_margin,
                          double eps_fraction) {
  if (!(gain_margin > 0.0 && gain_margin <= 1.0))
    throw ConfigError("gain margin must lie in (0, 1]");
  if (!(eps_fraction > 0.0 && eps_fraction <= 1.0))
    throw ConfigError("eps fraction must lie in (0, 1]");

  ControllerSpec spec;
  spec.nominal_reward = nominal_reward;
  spec.target_ratio = target_ratio;
  spec.gain =
      gain_lower_bound(p, nominal_reward, target_ratio) * (1.0 + gain_margin);
  const Interval iv = eps_interval(p, spec);
  const double upper = iv.hi_closed ? iv.hi : iv.hi - 1e-9;
  spec.switch_offset = eps_fraction * upper;
  if (!(spec.switch_offset > 0.0))
    throw InfeasibleError("admissible switch-offset interval is empty");

  const ValidationReport rep = validate_controller(p, spec);
  if (!rep.valid) {
    std::string msg = "synthesized spec failed validation:";
    for (const auto& v : rep.violations) msg += "\n  " + v;
    throw InfeasibleError(msg);
  }
  return spec;
}

ValidationReport validate_controller(const ModelParams& p,
                                     const ControllerSpec& spec) {
  ValidationReport rep;
  auto fail = [&rep](std::string msg) { rep.violations.push_back(std::move(msg)); };

  const bool window_ok = p.d / (p.m + p.n) < spec.nominal_reward &&
                         spec.nominal_reward < p.d / p.m;
  if (!window_ok)
    fail("nominal reward outside the open window (d/(m+n), d/m)");

  const double x1s = interior_equilibrium(p, spec.nominal_reward).value;
  const bool target_ok = x1s < spec.target_ratio && spec.target_ratio <= 1.0;
  if (window_ok && !target_ok)
    fail("target ratio not in (interior equilibrium, 1]");

  bool gain_ok = false;
  if (window_ok && target_ok) {
    const double floor =
        (p.d - spec.nominal_reward * p.m) / (p.m * spec.target_ratio);
    gain_ok = spec.gain > floor;
    if (!gain_ok) fail("gain does not exceed the lower bound");
  }

  bool offset_ok = false;
  if (gain_ok) {
    const double upper = closed_loop_quadratic_roots(p, spec).upper;
    if (upper < 1.0)
      offset_ok = spec.switch_offset > 0.0 &&
                  spec.switch_offset < upper - x1s;
    else
      offset_ok = spec.switch_offset > 0.0 &&
                  spec.switch_offset <= 1.0 - x1s;
    if (!offset_ok) fail("switch offset outside the admissible interval");
  }

  if (window_ok && target_ok && gain_ok && offset_ok) {
    // Defense in depth: the inequalities above imply a positive closed-loop
    // field on (0,1); confirm numerically on a dense grid.
    constexpr int kGrid = 1000;
    constexpr double kLo = 1e-4;
    constexpr double kHi = 1.0 - 1e-4;
    for (int i = 0; i < kGrid; ++i) {
      const double x = kLo + (kHi - kLo) * i / (kGrid - 1);
      if (!(closed_loop_field(p, spec, x) > 0.0)) {
        char buf[96];
        std::snprintf(buf, sizeof(buf),
                      "closed-loop field not positive at x1 = %.6f", x);
        fail(buf);
        break;
      }
    }
  }

  rep.valid = rep.violations.empty();
  return rep;
}

double feedback_reward(const ModelParams& p, const ControllerSpec& spec,
                       double x1) {
  const double x1s = interior_equilibrium(p, spec.nominal_reward).value;
  if (x1 < x1s + spec.switch_offset)
    return spec.nominal_reward + spec.gain * (spec.target_ratio - x1);
  return spec.nominal_reward;
}

double closed_loop_field(const ModelParams& p, const ControllerSpec& spec,
                         double x1) {
  return replicator_field(p, feedback_reward(p, spec, x1), x1);
}

TradeOffMetrics trade_off_metrics(const Trajectory& traj,
                                  const ControllerSpec& spec, double state_tol,
                                  double reward_tol) {
  const size_t n = traj.times.size();
  if (n == 0) throw std::invalid_argument("trajectory is empty");

  // Suffix scan: the settle index is the earliest sample from which the
  // condition holds through the end of the horizon.  First-touch would
  // misreport the reward when the boost switches back on.
  size_t state_idx = n, reward_idx = n;
  for (size_t i = n; i-- > 0;) {
    if (std::fabs(traj.states[i] - 1.0) <= state_tol)
      state_idx = i;
    else
      break;
  }
  for (size_t i = n; i-- > 0;) {
    if (std::fabs(traj.rewards[i] - spec.nominal_reward) <= reward_tol)
      reward_idx = i;
    else
      break;
  }

  TradeOffMetrics out;
  if (state_idx < n) out.state_settle_time = traj.times[state_idx];
  if (reward_idx < n) out.reward_recovery_time = traj.times[reward_idx];
  return out;
}

}  // namespace minedyn
