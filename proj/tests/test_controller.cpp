#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "minedyn/controller.hpp"
#include "minedyn/dynamics.hpp"
#include "minedyn/equilibrium.hpp"
#include "minedyn/errors.hpp"
#include "support.hpp"

using namespace minedyn;
using testsup::baseline_params;
using testsup::narrow_spec;
using testsup::wide_spec;

TEST_CASE("closed-loop quadratic coefficients and factorization") {
  const ModelParams p = baseline_params();
  const ControllerSpec spec = narrow_spec();

  // a = -gain*n, b = nominal*n + gain*n*target - gain*m,
  // c = nominal*m + gain*m*target - d
  const double a = -113.625, b = -4.0825, c = 9.5425;
  for (double x : {0.0, 0.1, 0.26, 0.5, 1.0}) {
    CHECK(closed_loop_quadratic(p, spec, x) ==
          doctest::Approx(a * x * x + b * x + c).epsilon(1e-12));
  }

  // while the boost is active the field factors as
  // x (1 - x) quadratic(x) / (m + n x)^2
  const double theta =
      interior_equilibrium(p, spec.nominal_reward).value + spec.switch_offset;
  for (double x : {0.05, 0.1, 0.2, 0.25}) {
    REQUIRE(x < theta);
    const double pool = p.m + p.n * x;
    const double factored =
        x * (1.0 - x) * closed_loop_quadratic(p, spec, x) / (pool * pool);
    CHECK(closed_loop_field(p, spec, x) ==
          doctest::Approx(factored).epsilon(1e-12));
  }
}

TEST_CASE("quadratic roots against frozen references") {
  const ModelParams p = baseline_params();

  const QuadraticRoots narrow = closed_loop_quadratic_roots(p, narrow_spec());
  CHECK(std::fabs(narrow.lower - (-0.3083182572001621)) <= 1e-9);
  CHECK(std::fabs(narrow.upper - 0.2723886642408662) <= 1e-9);

  const QuadraticRoots wide = closed_loop_quadratic_roots(p, wide_spec());
  CHECK(std::fabs(wide.lower - (-0.0024984238642441303)) <= 1e-9);
  CHECK(std::fabs(wide.upper - 3.9628944634682045) <= 1e-9);
}

TEST_CASE("root placement holds across random valid specs") {
  const ModelParams p = baseline_params();
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> reward_draw(25.1, 49.9);
  std::uniform_real_distribution<double> frac_draw(0.05, 1.0);
  std::uniform_real_distribution<double> margin_draw(0.01, 2.0);

  for (int i = 0; i < 50; ++i) {
    const double nominal = reward_draw(rng);
    const double x1s = interior_equilibrium(p, nominal).value;
    const double target = x1s + (1.0 - x1s) * frac_draw(rng);
    const double gain =
        gain_lower_bound(p, nominal, target) * (1.0 + margin_draw(rng));
    const ControllerSpec spec{nominal, target, gain, 0.0};

    const QuadraticRoots roots = closed_loop_quadratic_roots(p, spec);
    CHECK(roots.lower < 0.0);
    CHECK(roots.upper > target);  // the boost anchor always sits inside
    // cancellation-free evaluation: tiny residual at the returned root
    const double scale = std::fabs(spec.gain * p.n) * roots.upper * roots.upper +
                         std::fabs(closed_loop_quadratic(p, spec, 0.0)) + 1.0;
    CHECK(std::fabs(closed_loop_quadratic(p, spec, roots.upper)) <=
          1e-9 * scale);
  }
}

TEST_CASE("gain lower bound values and rejections") {
  const ModelParams p = baseline_params();

  CHECK(gain_lower_bound(p, 40.0, 1.0) == 10.0);  // (d - R m) / (m tgt) exact
  CHECK(gain_lower_bound(p, 40.0, 0.26) == doctest::Approx(500.0 / 13.0));

  // nominal reward must lie strictly inside (d/(m+n), d/m) = (25, 50)
  CHECK_THROWS_AS(gain_lower_bound(p, 20.0, 1.0), InfeasibleError);
  CHECK_THROWS_AS(gain_lower_bound(p, 25.0, 1.0), InfeasibleError);
  CHECK_THROWS_AS(gain_lower_bound(p, 50.0, 1.0), InfeasibleError);
  // target must lie strictly above the interior equilibrium, at most 1
  CHECK_THROWS_AS(gain_lower_bound(p, 40.0, 0.25), InfeasibleError);
  CHECK_THROWS_AS(gain_lower_bound(p, 40.0, 0.2), InfeasibleError);
  CHECK_THROWS_AS(gain_lower_bound(p, 40.0, 1.1), InfeasibleError);
}

TEST_CASE("admissible switch-offset interval") {
  const ModelParams p = baseline_params();

  // upper root below 1: open interval (0, root - x1*)
  const Interval narrow = eps_interval(p, narrow_spec());
  CHECK(narrow.lo == 0.0);
  CHECK_FALSE(narrow.lo_closed);
  CHECK(std::fabs(narrow.hi - 0.0223886642408662) <= 1e-12);
  CHECK_FALSE(narrow.hi_closed);

  // upper root beyond 1: closed at 1 - x1*
  const Interval wide = eps_interval(p, wide_spec());
  CHECK(wide.lo == 0.0);
  CHECK_FALSE(wide.lo_closed);
  CHECK(wide.hi == 0.75);
  CHECK(wide.hi_closed);

  // a gain exactly at the lower bound does not clear it
  ControllerSpec at_bound = wide_spec();
  at_bound.gain = 10.0;
  CHECK_THROWS_AS(eps_interval(p, at_bound), InfeasibleError);
}

TEST_CASE("synthesis applies the margins") {
  const ModelParams p = baseline_params();

  const ControllerSpec spec = synthesize(p, 40.0, 1.0, 0.01, 0.5);
  CHECK(spec.nominal_reward == 40.0);
  CHECK(spec.target_ratio == 1.0);
  CHECK(spec.gain == 10.1);        // 10 * (1 + 0.01)
  CHECK(spec.switch_offset == 0.375);  // half of the closed limit 0.75
  CHECK(validate_controller(p, spec).valid);

  CHECK_THROWS_AS(synthesize(p, 40.0, 1.0, 0.0, 0.5), ConfigError);
  CHECK_THROWS_AS(synthesize(p, 40.0, 1.0, -0.1, 0.5), ConfigError);
  CHECK_THROWS_AS(synthesize(p, 40.0, 1.0, 1.5, 0.5), ConfigError);
  CHECK_THROWS_AS(synthesize(p, 40.0, 1.0, 0.01, 0.0), ConfigError);
  CHECK_THROWS_AS(synthesize(p, 40.0, 1.0, 0.01, 1.2), ConfigError);
  // infeasible problem data still surfaces as infeasibility, not config
  CHECK_THROWS_AS(synthesize(p, 20.0, 1.0, 0.01, 0.5), InfeasibleError);
}

TEST_CASE("stabilizability test at full participation") {
  const ModelParams p = baseline_params();

  const UnstabilizableCheck low = check_unstabilizable(p, 20.0);
  REQUIRE(low.report.has_value());
  CHECK(low.report->nominal_reward == 20.0);
  CHECK(low.report->boundary_slope == 1.25);  // -(R - d/(m+n))/(m+n) exact
  CHECK_FALSE(low.marginal);

  const UnstabilizableCheck ok = check_unstabilizable(p, 40.0);
  CHECK_FALSE(ok.report.has_value());
  CHECK_FALSE(ok.marginal);

  const UnstabilizableCheck edge = check_unstabilizable(p, 25.0);
  CHECK_FALSE(edge.report.has_value());
  CHECK(edge.marginal);
}

TEST_CASE("validation reports one violation per failed gate") {
  const ModelParams p = baseline_params();

  CHECK(validate_controller(p, narrow_spec()).valid);
  CHECK(validate_controller(p, wide_spec()).valid);
  CHECK(validate_controller(p, narrow_spec()).violations.empty());

  auto expect_single = [&](const ControllerSpec& spec,
                           const std::string& needle) {
    const ValidationReport rep = validate_controller(p, spec);
    CHECK_FALSE(rep.valid);
    REQUIRE(rep.violations.size() == 1);
    CHECK(rep.violations[0].find(needle) != std::string::npos);
  };

  ControllerSpec weak = narrow_spec();
  weak.gain = 9.9;
  expect_single(weak, "gain");

  ControllerSpec far = narrow_spec();
  far.switch_offset = 0.03;  // beyond the open limit ~0.0224
  expect_single(far, "switch offset");

  ControllerSpec low = narrow_spec();
  low.nominal_reward = 20.0;
  expect_single(low, "nominal reward outside the open window");

  ControllerSpec under = narrow_spec();
  under.target_ratio = 0.2;  // at or below the interior equilibrium
  expect_single(under, "target ratio");
}

TEST_CASE("reward law continuity at the switch") {
  const ModelParams p = baseline_params();

  // offset equal to target - x1* makes the law continuous
  const ControllerSpec smooth{40.0, 0.26, 56.8125, 0.01};
  const double theta_s =
      interior_equilibrium(p, smooth.nominal_reward).value + smooth.switch_offset;
  CHECK(std::fabs(feedback_reward(p, smooth, theta_s - 1e-9) - 40.0) < 1e-6);
  CHECK(feedback_reward(p, smooth, theta_s) == 40.0);

  // the baseline narrow law jumps by gain * (target - switch point)
  const ControllerSpec spec = narrow_spec();
  const double theta =
      interior_equilibrium(p, spec.nominal_reward).value + spec.switch_offset;
  CHECK(feedback_reward(p, spec, theta) == 40.0);
  CHECK(feedback_reward(p, spec, theta - 1e-12) - 40.0 ==
        doctest::Approx(0.2840625).epsilon(1e-6));
  CHECK(feedback_reward(p, spec, 0.1) == doctest::Approx(49.09));
}

TEST_CASE("settle metrics use enter-and-remain semantics") {
  const ControllerSpec spec{40.0, 1.0, 10.1, 0.375};

  Trajectory traj;
  traj.times = {0.0, 1.0, 2.0, 3.0};
  traj.states = {0.5, 0.9995, 0.99, 0.9999};
  traj.rewards = {45.0, 40.0005, 41.0, 40.0002};

  const TradeOffMetrics m = trade_off_metrics(traj, spec, 1e-3, 1e-3);
  // both conditions hold at t=1, break at t=2, lock in from t=3
  REQUIRE(m.state_settle_time.has_value());
  REQUIRE(m.reward_recovery_time.has_value());
  CHECK(*m.state_settle_time == 3.0);
  CHECK(*m.reward_recovery_time == 3.0);

  Trajectory never;
  never.times = {0.0, 1.0};
  never.states = {0.5, 0.6};
  never.rewards = {45.0, 44.0};
  const TradeOffMetrics none = trade_off_metrics(never, spec, 1e-3, 1e-3);
  CHECK_FALSE(none.state_settle_time.has_value());
  CHECK_FALSE(none.reward_recovery_time.has_value());

  CHECK_THROWS_AS(trade_off_metrics(Trajectory{}, spec, 1e-3, 1e-3),
                  std::invalid_argument);
}

TEST_CASE("narrow window recovers reward fast, settles state slow") {
  const ModelParams p = baseline_params();

  const Trajectory narrow =
      integrate(p, RewardPolicy{narrow_spec()}, 0.1, 50.0);
  const Trajectory wide = integrate(p, RewardPolicy{wide_spec()}, 0.1, 50.0);

  const TradeOffMetrics mn = trade_off_metrics(narrow, narrow_spec(), 1e-3, 1e-3);
  const TradeOffMetrics mw = trade_off_metrics(wide, wide_spec(), 1e-3, 1e-3);

  REQUIRE(mn.state_settle_time.has_value());
  REQUIRE(mn.reward_recovery_time.has_value());
  REQUIRE(mw.state_settle_time.has_value());
  REQUIRE(mw.reward_recovery_time.has_value());

  // high gain over a narrow band: reward back near nominal almost at once,
  // but the state crawls past the disabled region; the wide band flips both
  CHECK(*mn.state_settle_time > *mw.state_settle_time);
  CHECK(*mn.reward_recovery_time < *mw.reward_recovery_time);
}
