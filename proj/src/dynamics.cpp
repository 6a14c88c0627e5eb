#include "minedyn/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "minedyn/equilibrium.hpp"
#include "minedyn/errors.hpp"

namespace minedyn {

const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::switch_crossed: return "switch_crossed";
    case EventKind::converged: return "converged";
    case EventKind::step_clamped: return "step_clamped";
  }
  return "?";
}

double policy_reward(const ModelParams& p, const RewardPolicy& policy,
                     double x1) {
  if (const double* r = std::get_if<double>(&policy)) return *r;
  return feedback_reward(p, std::get<ControllerSpec>(policy), x1);
}

namespace {

constexpr double kStepBudget = 2e8;     // grid steps per integration call
constexpr double kCrossingTol = 1e-10;  // state tolerance locating the switch

/// Affine reward law reward(x1) = base + slope * x1.  Each side of a
/// feedback switch is one such law; a constant policy is the slope-zero
/// case on both sides.
struct BranchLaw {
  double base;
  double slope;
  double at(double x) const { return base + slope * x; }
};

struct PolicyView {
  const ModelParams& p;
  std::optional<double> theta;  // switch point; empty for constant policies
  BranchLaw below;              // law while x1 < theta (boost active)
  BranchLaw above;              // law while x1 >= theta

  double field(const BranchLaw& law, double x) const {
    return replicator_field(p, law.at(x), x);
  }
  const BranchLaw& law_at(double x) const {
    return theta && x < *theta ? below : above;
  }
  double reward_at(double x) const { return law_at(x).at(x); }
};

PolicyView make_view(const ModelParams& p, const RewardPolicy& policy) {
  if (const double* r = std::get_if<double>(&policy))
    return PolicyView{p, std::nullopt, {*r, 0.0}, {*r, 0.0}};
  const ControllerSpec& s = std::get<ControllerSpec>(policy);
  const double x1s = interior_equilibrium(p, s.nominal_reward).value;
  return PolicyView{p,
                    x1s + s.switch_offset,
                    {s.nominal_reward + s.gain * s.target_ratio, -s.gain},
                    {s.nominal_reward, 0.0}};
}

/// One classical fourth-order step under a fixed branch law.  Locking the
/// law keeps the right-hand side smooth inside the step; the caller handles
/// any switch crossing afterwards.
double rk4(const PolicyView& v, const BranchLaw& law, double x, double h) {
  const double k1 = v.field(law, x);
  const double k2 = v.field(law, x + 0.5 * h * k1);
  const double k3 = v.field(law, x + 0.5 * h * k2);
  const double k4 = v.field(law, x + h * k3);
  return x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Argument guards shared by run_flow and the capacity planning in
/// integrate; checked up front so no storage is sized from bad inputs.
void check_flow_args(double x1_init, double t_end, double dt) {
  if (!(x1_init >= 0.0 && x1_init <= 1.0))
    throw std::invalid_argument("initial state must lie in [0,1]");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(t_end > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (t_end / dt > kStepBudget)
    throw ConfigError(
        "integration step budget exceeded; shorten the horizon or enlarge dt");
}

/// Fixed-step flow driver shared by integrate and settle.  on_sample is
/// called at t = 0, at every completed step, and at located switch
/// crossings; returning false stops the run.  on_event receives switch,
/// clamp, and absorption notifications.
template <class OnSample, class OnEvent>
void run_flow(const PolicyView& v, double x1_init, double t_end, double dt,
              OnSample&& on_sample, OnEvent&& on_event) {
  check_flow_args(x1_init, t_end, dt);

  double t = 0.0;
  double x = x1_init;
  bool absorbed = x == 0.0 || x == 1.0;
  if (!on_sample(t, x, v.reward_at(x))) return;

  // Completing slot k lands on k*dt computed as a product, never on an
  // accumulated sum, so grid times carry no drift however long the run is.
  // A switch crossing splits a slot: t advances into the slot interior and
  // the next pass finishes the remainder.
  long long slot = 1;
  for (double guard = 0.0; guard < 3.0 * kStepBudget; guard += 1.0) {
    const double bound = static_cast<double>(slot) * dt;
    const double t_next = bound < t_end ? bound : t_end;
    const double h = t_next - t;
    if (h <= 0.0) return;  // horizon reached
    const auto complete_slot = [&] {
      t = t_next;
      if (t_next == bound && bound < t_end) ++slot;
    };

    // Already within locating tolerance of the switch: park exactly on it.
    if (v.theta && x != *v.theta && std::fabs(x - *v.theta) <= kCrossingTol) {
      x = *v.theta;
      on_event(t, EventKind::switch_crossed);
    }

    double xn;
    if (v.theta && x == *v.theta) {
      // On the switch: use the law of the side the flow enters; when both
      // sides push back toward the switch the state slides in place.
      const bool entering_below = v.field(v.above, x) < 0.0;
      const BranchLaw& law = entering_below ? v.below : v.above;
      xn = rk4(v, law, x, h);
      if ((xn < *v.theta) != entering_below) xn = *v.theta;
      complete_slot();
    } else {
      const bool below_side = v.theta && x < *v.theta;
      const BranchLaw& law = below_side ? v.below : v.above;
      xn = rk4(v, law, x, h);
      if (v.theta && (xn < *v.theta) != below_side) {
        // Step straddles the switch: bisect the step length to land on it
        // within kCrossingTol, and change laws only from there.
        double hstar = h;
        if (xn != *v.theta) {
          double lo = 0.0, hi = h;
          for (int it = 0; it < 200; ++it) {
            hstar = 0.5 * (lo + hi);
            const double xm = rk4(v, law, x, hstar);
            if (std::fabs(xm - *v.theta) <= kCrossingTol) break;
            if ((xm < *v.theta) == below_side)
              lo = hstar;
            else
              hi = hstar;
          }
        }
        x = *v.theta;
        if (hstar <= h * 1e-9) {
          // Crossing at the very start of the slot: park and retry.
          on_event(t, EventKind::switch_crossed);
          continue;
        }
        t += hstar;
        if (t_next - t <= h * 1e-12) complete_slot();  // crossing at slot end
        on_event(t, EventKind::switch_crossed);
        if (!on_sample(t, x, v.reward_at(x))) return;
        continue;
      }
      complete_slot();
    }

    if (!std::isfinite(xn))
      throw NumericError("non-finite state during integration");
    bool clamped = false;
    if (xn < 0.0) {
      xn = 0.0;
      clamped = true;
    } else if (xn > 1.0) {
      xn = 1.0;
      clamped = true;
    }
    x = xn;
    if (clamped) on_event(t, EventKind::step_clamped);
    if (!on_sample(t, x, v.reward_at(x))) return;
    if (!absorbed && (x == 0.0 || x == 1.0)) {
      absorbed = true;
      on_event(t, EventKind::converged);
    }
  }
  throw NumericError("integration step-count overflow");
}

}  // namespace

StepResult step(const ModelParams& p, const RewardPolicy& policy, double x1,
                double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(x1 >= 0.0 && x1 <= 1.0))
    throw std::invalid_argument("state must lie in [0,1]");
  const auto f = [&](double xx) {
    return replicator_field(p, policy_reward(p, policy, xx), xx);
  };
  const double k1 = f(x1);
  const double k2 = f(x1 + 0.5 * dt * k1);
  const double k3 = f(x1 + 0.5 * dt * k2);
  const double k4 = f(x1 + dt * k3);
  const double xn = x1 + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!std::isfinite(xn))
    throw NumericError("non-finite state during integration");
  if (xn < 0.0) return StepResult{0.0, true};
  if (xn > 1.0) return StepResult{1.0, true};
  return StepResult{xn, false};
}

Trajectory integrate(const ModelParams& p, const RewardPolicy& policy,
                     double x1_init, double t_end, double dt) {
  check_flow_args(x1_init, t_end, dt);
  const PolicyView v = make_view(p, policy);
  Trajectory traj;
  const double expect = std::min(t_end / dt + 4.0, 1e8);
  traj.times.reserve(static_cast<size_t>(expect));
  traj.states.reserve(static_cast<size_t>(expect));
  traj.rewards.reserve(static_cast<size_t>(expect));
  run_flow(
      v, x1_init, t_end, dt,
      [&traj](double t, double x, double r) {
        traj.times.push_back(t);
        traj.states.push_back(x);
        traj.rewards.push_back(r);
        return true;
      },
      [&traj](double t, EventKind k) { traj.events.push_back({t, k}); });
  return traj;
}

SettleResult settle(const ModelParams& p, const RewardPolicy& policy,
                    double x1_init, double tol, double t_max, double dt) {
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  const PolicyView v = make_view(p, policy);

  // Rest points the flow can come to rest at: the boundaries plus every
  // interior zero of the closed-loop field on its active side of the switch.
  struct Candidate {
    double value;
    double slope;  // closed-loop field slope at the rest point
    double band;   // below this magnitude the slope counts as zero
  };
  std::vector<Candidate> cands;
  const auto add = [&](double L) {
    const BranchLaw& law = v.law_at(L);
    const double slope = replicator_field_derivative(p, law.at(L), L) +
                         law.slope * L * (1.0 - L) / (p.m + p.n * L);
    const double band = kMarginalBand * std::max(1.0, std::fabs(law.at(L)));
    cands.push_back({L, slope, band});
  };
  add(0.0);
  add(1.0);
  if (const double* r = std::get_if<double>(&policy)) {
    const InteriorSolution sol = interior_equilibrium(p, *r);
    if (sol.interior) add(sol.value);
  } else {
    const ControllerSpec& s = std::get<ControllerSpec>(policy);
    try {
      const QuadraticRoots roots = closed_loop_quadratic_roots(p, s);
      for (double root : {roots.lower, roots.upper})
        if (root > 0.0 && root < 1.0 && root < *v.theta) add(root);
    } catch (const NumericError&) {
      // no real roots, hence no rest point on the boosted side
    }
    const InteriorSolution sol = interior_equilibrium(p, s.nominal_reward);
    if (sol.interior && sol.value >= *v.theta) add(sol.value);
  }

  std::vector<double> entry(cands.size(), -1.0);  // -1: outside the tol band
  double last_t = 0.0, last_x = x1_init;
  std::optional<size_t> hit;
  double hit_time = 0.0;

  const auto on_sample = [&](double t, double x, double r) {
    last_t = t;
    last_x = x;
    for (size_t i = 0; i < cands.size(); ++i) {
      if (std::fabs(x - cands[i].value) <= tol) {
        if (entry[i] < 0.0) entry[i] = t;
      } else {
        entry[i] = -1.0;
      }
    }
    const double field = replicator_field(p, r, x);
    if (!(std::fabs(field) < tol * std::max(1.0, std::fabs(x)))) return true;
    double best_dist = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < cands.size(); ++i) {
      const double dist = std::fabs(x - cands[i].value);
      if (dist > tol) continue;
      // Rest points qualify while the flow moves toward them (or sits on
      // them); a marginal slope waives the direction test, since at a
      // stability exchange the state parks wherever the field vanishes.
      const bool toward = (cands[i].value - x) * field >= 0.0;
      if (!toward && std::fabs(cands[i].slope) >= cands[i].band) continue;
      if (dist < best_dist) {
        best_dist = dist;
        hit = i;
      }
    }
    if (!hit) return true;
    hit_time = t;
    return false;
  };
  run_flow(v, x1_init, t_max, dt, on_sample, [](double, EventKind) {});

  SettleResult out;
  out.final_state = last_x;
  out.elapsed = last_t;
  if (hit) {
    out.limit = cands[*hit].value;
    out.settled = true;
    out.settle_time = entry[*hit] >= 0.0 ? entry[*hit] : hit_time;
  } else {
    out.limit = last_x;
    out.settled = false;
  }
  return out;
}

std::vector<SweepPoint> hysteresis_sweep(const ModelParams& p,
                                         const std::vector<double>& rewards,
                                         double x1_seed, double settle_tol,
                                         double t_max, double dt) {
  if (rewards.empty()) throw std::invalid_argument("reward path is empty");
  if (!(x1_seed >= 0.0 && x1_seed <= 1.0))
    throw std::invalid_argument("seed state must lie in [0,1]");
  if (!(settle_tol > 0.0)) throw std::invalid_argument("tol must be positive");

  std::vector<SweepPoint> out;
  out.reserve(rewards.size());
  double carry = x1_seed;
  for (size_t leg = 0; leg < rewards.size(); ++leg) {
    double x0 = carry;
    // Boundary equilibria are fixed points for every reward; nudge the
    // carried state toward the interior so a destabilized boundary can
    // actually be left.  The nudge stays strictly inside the settle
    // tolerance so a leg whose boundary has just turned marginal still
    // starts within the band of the rest point it should park at; on the
    // upper boundary the subtraction is rounded back until the recovered
    // distance is no wider than the nudge.
    const double nudge = std::min(kSeedPerturbation, 0.5 * settle_tol);
    if (x0 == 0.0) {
      x0 = nudge;
    } else if (x0 == 1.0) {
      x0 = 1.0 - nudge;
      while (1.0 - x0 > nudge) x0 = std::nextafter(x0, 1.0);
    }
    const SettleResult res =
        settle(p, RewardPolicy{rewards[leg]}, x0, settle_tol, t_max, dt);
    if (!res.settled) {
      char buf[128];
      std::snprintf(buf, sizeof(buf),
                    "sweep leg %zu (reward %g) did not settle within %g",
                    leg, rewards[leg], t_max);
      throw NumericError(buf);
    }
    out.push_back({static_cast<int>(leg), rewards[leg], res.limit,
                   res.settle_time.value_or(res.elapsed)});
    carry = res.limit;
  }
  return out;
}

}  // namespace minedyn
