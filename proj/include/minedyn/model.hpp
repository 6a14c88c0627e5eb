#ifndef MINEDYN_MODEL_HPP
#define MINEDYN_MODEL_HPP

#include <utility>

namespace minedyn {

/// Raw protocol/economics inputs: a block is found when the first
/// `target_bits` bits of its hash are zero, mining costs `unit_cost` per
/// unit operating time, and one unit of cost buys `hash_per_cost` hash
/// queries per unit time.  The whole analysis only ever consumes the
/// effective difficulty derived from these.
struct MiningEnvironment {
  int target_bits;       // leading zero bits required, >= 0
  double unit_cost;      // cost per unit operating time, > 0
  double hash_per_cost;  // hash queries per unit cost, > 0

  MiningEnvironment(int target_bits, double unit_cost, double hash_per_cost);
};

/// Difficulty derived from a MiningEnvironment: `raw` = 2^target_bits,
/// `effective` = raw / hash_per_cost.
struct Difficulty {
  double raw;
  double effective;
};

/// The (m, n, d) triple every analysis is parameterized by:
/// m always-on miners, n strategic miners, effective difficulty d.
struct ModelParams {
  int m;     // always-mining miners, >= 1
  int n;     // strategic miners, >= 1
  double d;  // effective difficulty, > 0

  ModelParams(int m, int n, double d);
  static ModelParams from_environment(int m, int n, const MiningEnvironment& env);
};

/// Fraction of strategic miners that currently participate.
/// The complementary fraction is derived, never stored, so the
/// two always sum to one exactly.
struct PopulationState {
  double x1;  // in [0, 1]

  explicit PopulationState(double x1);
  double x0() const { return 1.0 - x1; }
};

/// Rate parameters of the block-creation Poisson process.
Difficulty difficulty(const MiningEnvironment& env);
double mining_rate(const MiningEnvironment& env, int strategy);

/// Expected block reward of one miner playing `strategy` when a fraction
/// x1 of the strategic miners participates: R*s / (m + n*x1).
double expected_reward(const ModelParams& p, double reward, int strategy, double x1);

/// Expected operating cost under the same conditions: d*s / (m + n*x1)^2.
double expected_cost(const ModelParams& p, int strategy, double x1);

/// Utility of a miner playing `strategy`: zero for an abstainer, reward
/// minus cost for a participant.
double utility(const ModelParams& p, double reward, int strategy, double x1);

/// Population-average utility x0*u0 + x1*u1.
double average_utility(const ModelParams& p, double reward, double x1);

/// Replicator vector field of the participation ratio:
///   x1 (1 - x1) / (m + n x1) * (R - d / (m + n x1)).
/// Defined for any real x1 so derivative checks can straddle the
/// boundary; integration clamps to [0, 1] separately.
double replicator_field(const ModelParams& p, double reward, double x1);

/// Closed-form derivative of replicator_field with respect to x1.
double replicator_field_derivative(const ModelParams& p, double reward, double x1);

/// Specialized slope forms at the three equilibria.  Each agrees with
/// replicator_field_derivative at its point; they exist so that
/// stability classification never depends on the general expression.
double field_slope_at_zero(const ModelParams& p, double reward);
double field_slope_at_one(const ModelParams& p, double reward);
double field_slope_at_interior(const ModelParams& p, double reward);

}  // namespace minedyn

#endif
