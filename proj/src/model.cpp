#include "minedyn/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "minedyn/errors.hpp"

namespace minedyn {

MiningEnvironment::MiningEnvironment(int target_bits_, double unit_cost_,
                                     double hash_per_cost_)
    : target_bits(target_bits_), unit_cost(unit_cost_), hash_per_cost(hash_per_cost_) {
  if (target_bits < 0) throw std::invalid_argument("target_bits must be >= 0");
  if (!(unit_cost > 0.0) || !std::isfinite(unit_cost))
    throw std::invalid_argument("unit_cost must be positive and finite");
  if (!(hash_per_cost > 0.0) || !std::isfinite(hash_per_cost))
    throw std::invalid_argument("hash_per_cost must be positive and finite");
}

ModelParams::ModelParams(int m_, int n_, double d_) : m(m_), n(n_), d(d_) {
  if (m < 1) throw std::invalid_argument("m must be >= 1");
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (!(d > 0.0) || !std::isfinite(d))
    throw std::invalid_argument("d must be positive and finite");
}

ModelParams ModelParams::from_environment(int m, int n, const MiningEnvironment& env) {
  return ModelParams(m, n, difficulty(env).effective);
}

PopulationState::PopulationState(double x1_) : x1(x1_) {
  if (!(x1 >= 0.0 && x1 <= 1.0))
    throw std::invalid_argument("x1 must lie in [0, 1]");
}

Difficulty difficulty(const MiningEnvironment& env) {
  const double raw = std::ldexp(1.0, env.target_bits);
  if (!std::isfinite(raw))
    throw std::range_error("difficulty 2^" + std::to_string(env.target_bits) +
                           " exceeds representable range");
  return Difficulty{raw, raw / env.hash_per_cost};
}

double mining_rate(const MiningEnvironment& env, int strategy) {
  return strategy * env.unit_cost / difficulty(env).effective;
}

double expected_reward(const ModelParams& p, double reward, int strategy, double x1) {
  return reward * strategy / (p.m + p.n * x1);
}

double expected_cost(const ModelParams& p, int strategy, double x1) {
  const double pool = p.m + p.n * x1;
  return p.d * strategy / (pool * pool);
}

double utility(const ModelParams& p, double reward, int strategy, double x1) {
  if (strategy == 0) return 0.0;
  return expected_reward(p, reward, strategy, x1) - expected_cost(p, strategy, x1);
}

double average_utility(const ModelParams& p, double reward, double x1) {
  return x1 * utility(p, reward, 1, x1);
}

double replicator_field(const ModelParams& p, double reward, double x1) {
  const double pool = p.m + p.n * x1;
  return x1 * (1.0 - x1) / pool * (reward - p.d / pool);
}

double replicator_field_derivative(const ModelParams& p, double reward, double x1) {
  const double pool = p.m + p.n * x1;
  const double share = x1 * (1.0 - x1);
  const double front =
      -x1 / pool + (1.0 - x1) / pool - p.n * share / (pool * pool);
  return front * (reward - p.d / pool) + p.d * p.n * share / (pool * pool * pool);
}

double field_slope_at_zero(const ModelParams& p, double reward) {
  return (reward - p.d / p.m) / p.m;
}

double field_slope_at_one(const ModelParams& p, double reward) {
  const double pool = p.m + p.n;
  return -(reward - p.d / pool) / pool;
}

double field_slope_at_interior(const ModelParams& p, double reward) {
  const double ratio = p.d / reward;
  return reward * reward * reward / (p.n * p.d * p.d) * (ratio - p.m) *
         ((p.m + p.n) - ratio);
}

}  // namespace minedyn
