#ifndef MINEDYN_AGENTS_HPP
#define MINEDYN_AGENTS_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "minedyn/dynamics.hpp"
#include "minedyn/model.hpp"

namespace minedyn {

/// Seedable random source for the agent simulator.  The engine is the
/// standard 64-bit Mersenne twister (whose output sequence the standard
/// fixes), and all transforms are written out here rather than taken from
/// <random> distributions, so a seed pins the byte-exact event sequence
/// across standard-library implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1), 53-bit resolution.
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Exponential waiting time with the given rate.
  double exponential(double rate) { return -std::log1p(-unit()) / rate; }

  /// Uniform in {0, ..., n-1} without modulo bias (rejection sampling).
  uint64_t index(uint64_t n) {
    const uint64_t threshold = (0ULL - n) % n;  // 2^64 mod n
    uint64_t r = engine_();
    while (r < threshold) r = engine_();
    return r % n;
  }

 private:
  std::mt19937_64 engine_;
};

/// Finite population of strategic miners, each holding strategy 0 (abstain)
/// or 1 (mine).  revision_rate scales the strategy-revision epoch rate; at
/// 1.0 the expected drift of the empirical fraction matches the replicator
/// field, so empirical time aligns with model time.
struct AgentPopulation {
  int n_strategic;
  std::vector<uint8_t> strategies;
  double revision_rate;
  uint64_t rng_seed;
};

/// Population with round(x1_init * n_strategic) participants.
AgentPopulation make_population(int n_strategic, double x1_init,
                                double revision_rate, uint64_t seed);

struct EmpiricalTrajectory {
  std::vector<double> times;
  std::vector<double> x1;  // empirical participation fraction
  uint64_t seed;
};

/// Event-driven simulation of pairwise proportional imitation: at
/// exponentially spaced epochs a uniformly chosen agent samples a uniformly
/// chosen other agent and adopts its strategy with probability
/// max(0, utility gap) / normalization.  Utilities are evaluated at the
/// current empirical fraction with the model's strategic-miner count
/// replaced by n_strategic (base.n is ignored).  The normalization is the
/// largest utility magnitude over states, precomputed on a grid; the epoch
/// rate is revision_rate * (n_strategic - 1) * normalization, which makes
/// the drift of the empirical fraction equal the replicator field.  Output
/// is sampled every sample_dt; a fixed seed gives a bit-identical
/// trajectory.  Throws ConfigError if a utility gap ever exceeds the
/// normalization.
EmpiricalTrajectory simulate_population(const ModelParams& base,
                                        const RewardPolicy& policy,
                                        const AgentPopulation& pop,
                                        double horizon, double sample_dt);

/// One simulate_population run per seed, in parallel; results are returned
/// in the order of `seeds`.
std::vector<EmpiricalTrajectory> simulate_ensemble(
    const ModelParams& base, const RewardPolicy& policy, int n_strategic,
    double x1_init, double revision_rate, const std::vector<uint64_t>& seeds,
    double horizon, double sample_dt);

struct EnsembleStats {
  std::vector<double> times;
  std::vector<double> mean_x1;
  std::vector<double> std_x1;  // sample standard deviation across seeds
  int n_seeds;
};

EnsembleStats aggregate(const std::vector<EmpiricalTrajectory>& runs);

}  // namespace minedyn

#endif
