#include "minedyn/agents.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <stdexcept>

#include "minedyn/errors.hpp"

namespace minedyn {

AgentPopulation make_population(int n_strategic, double x1_init,
                                double revision_rate, uint64_t seed) {
  if (n_strategic < 1)
    throw std::invalid_argument("n_strategic must be at least 1");
  if (!(x1_init >= 0.0 && x1_init <= 1.0))
    throw std::invalid_argument("x1_init must lie in [0, 1]");
  if (!(revision_rate > 0.0))
    throw std::invalid_argument("revision_rate must be positive");
  AgentPopulation pop;
  pop.n_strategic = n_strategic;
  pop.revision_rate = revision_rate;
  pop.rng_seed = seed;
  const int ones = static_cast<int>(std::lround(x1_init * n_strategic));
  pop.strategies.assign(static_cast<size_t>(n_strategic), 0);
  std::fill_n(pop.strategies.begin(), std::min(ones, n_strategic), 1);
  return pop;
}

EmpiricalTrajectory simulate_population(const ModelParams& base,
                                        const RewardPolicy& policy,
                                        const AgentPopulation& pop,
                                        double horizon, double sample_dt) {
  if (pop.n_strategic < 2)
    throw std::invalid_argument("need at least 2 agents");
  if (pop.strategies.size() != static_cast<size_t>(pop.n_strategic))
    throw std::invalid_argument("strategy vector length mismatch");
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (!(sample_dt > 0.0))
    throw std::invalid_argument("sample_dt must be positive");
  if (!(pop.revision_rate > 0.0))
    throw std::invalid_argument("revision_rate must be positive");

  const int N = pop.n_strategic;
  const ModelParams p(base.m, N, base.d);

  // Imitation normalization: largest utility magnitude over states under
  // this policy, with headroom for maxima between grid points.  The
  // normalization cancels out of the expected drift (it scales the epoch
  // rate up exactly as much as it scales adoption probabilities down).
  double norm = 0.0;
  constexpr int kGrid = 2000;
  for (int i = 0; i <= kGrid; ++i) {
    const double x = static_cast<double>(i) / kGrid;
    const double u = utility(p, policy_reward(p, policy, x), 1, x);
    norm = std::max(norm, std::fabs(u));
  }
  norm *= 1.001;
  if (!(norm > 0.0))
    throw ConfigError("utility range is degenerate; cannot normalize imitation");
  const double epoch_rate = pop.revision_rate * (N - 1) * norm;

  Rng rng(pop.rng_seed);
  std::vector<uint8_t> strat = pop.strategies;
  long long ones = std::count(strat.begin(), strat.end(), uint8_t{1});

  EmpiricalTrajectory out;
  out.seed = pop.rng_seed;
  const long long n_samples =
      static_cast<long long>(std::floor(horizon / sample_dt + 1e-9)) + 1;
  out.times.reserve(static_cast<size_t>(n_samples));
  out.x1.reserve(static_cast<size_t>(n_samples));

  long long next = 0;
  const auto flush_until = [&](double upto) {
    while (next < n_samples &&
           static_cast<double>(next) * sample_dt <= upto + 1e-12 * sample_dt) {
      out.times.push_back(static_cast<double>(next) * sample_dt);
      out.x1.push_back(static_cast<double>(ones) / N);
      ++next;
    }
  };

  double t = 0.0;
  while (true) {
    const double t_event = t + rng.exponential(epoch_rate);
    if (t_event >= horizon) {
      flush_until(horizon);
      break;
    }
    flush_until(t_event);  // samples up to the epoch keep the pre-epoch state
    t = t_event;

    const uint64_t agent = rng.index(static_cast<uint64_t>(N));
    uint64_t peer = rng.index(static_cast<uint64_t>(N) - 1);
    if (peer >= agent) ++peer;
    if (strat[agent] == strat[peer]) continue;

    const double x = static_cast<double>(ones) / N;
    const double r = policy_reward(p, policy, x);
    const double gap =
        utility(p, r, strat[peer], x) - utility(p, r, strat[agent], x);
    if (std::fabs(gap) > norm)
      throw ConfigError("utility gap exceeds the imitation normalization");
    if (gap > 0.0 && rng.unit() < gap / norm) {
      ones += strat[peer] ? 1 : -1;
      strat[agent] = strat[peer];
      if (ones == 0 || ones == N) {  // absorbing: no dissimilar pairs remain
        flush_until(horizon);
        break;
      }
    }
  }
  return out;
}

std::vector<EmpiricalTrajectory> simulate_ensemble(
    const ModelParams& base, const RewardPolicy& policy, int n_strategic,
    double x1_init, double revision_rate, const std::vector<uint64_t>& seeds,
    double horizon, double sample_dt) {
  if (seeds.empty()) throw std::invalid_argument("need at least one seed");
  std::vector<std::future<EmpiricalTrajectory>> futures;
  futures.reserve(seeds.size());
  for (uint64_t seed : seeds)
    futures.push_back(std::async(std::launch::async, [&, seed] {
      return simulate_population(
          base, policy,
          make_population(n_strategic, x1_init, revision_rate, seed), horizon,
          sample_dt);
    }));
  std::vector<EmpiricalTrajectory> runs;
  runs.reserve(seeds.size());
  for (auto& f : futures) runs.push_back(f.get());
  return runs;
}

EnsembleStats aggregate(const std::vector<EmpiricalTrajectory>& runs) {
  if (runs.empty()) throw std::invalid_argument("no runs to aggregate");
  const size_t samples = runs[0].times.size();
  for (const auto& r : runs)
    if (r.times.size() != samples || r.x1.size() != samples)
      throw std::invalid_argument("runs have mismatched sample grids");

  EnsembleStats st;
  st.times = runs[0].times;
  st.n_seeds = static_cast<int>(runs.size());
  st.mean_x1.resize(samples);
  st.std_x1.resize(samples);
  for (size_t k = 0; k < samples; ++k) {
    double sum = 0.0;
    for (const auto& r : runs) sum += r.x1[k];
    const double mean = sum / st.n_seeds;
    double sq = 0.0;
    for (const auto& r : runs) sq += (r.x1[k] - mean) * (r.x1[k] - mean);
    st.mean_x1[k] = mean;
    st.std_x1[k] = st.n_seeds > 1 ? std::sqrt(sq / (st.n_seeds - 1)) : 0.0;
  }
  return st;
}

}  // namespace minedyn
