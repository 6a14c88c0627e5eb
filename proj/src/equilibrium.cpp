#include "minedyn/equilibrium.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "minedyn/errors.hpp"

namespace minedyn {

const char* to_string(Stability s) {
  switch (s) {
    case Stability::stable: return "stable";
    case Stability::unstable: return "unstable";
    case Stability::marginal: return "marginal";
  }
  return "?";
}

const char* to_string(Region r) {
  switch (r) {
    case Region::A: return "A";
    case Region::B: return "B";
    case Region::C: return "C";
    case Region::boundary: return "boundary";
  }
  return "?";
}

std::string Interval::to_string() const {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%c%g, %g%c", lo_closed ? '[' : '(', lo, hi,
                hi_closed ? ']' : ')');
  return buf;
}

InteriorSolution interior_equilibrium(const ModelParams& p, double reward) {
  if (!(reward > 0.0)) throw std::invalid_argument("reward must be positive");
  const double value = (p.d / reward - p.m) / p.n;
  return InteriorSolution{value, value > 0.0 && value < 1.0};
}

namespace {

Stability from_slope(double slope) {
  return slope < 0.0 ? Stability::stable : Stability::unstable;
}

}  // namespace

EquilibriumReport classify_equilibria(const ModelParams& p, double reward,
                                      double marginal_band) {
  if (!(reward > 0.0)) throw std::invalid_argument("reward must be positive");
  const double r_upper = p.d / p.m;          // exchange at x1 = 0
  const double r_lower = p.d / (p.m + p.n);  // exchange at x1 = 1
  const double band = marginal_band * p.d;
  const bool near_upper = std::fabs(reward - r_upper) < band;
  const bool near_lower = std::fabs(reward - r_lower) < band;

  EquilibriumReport rep;
  rep.eq_zero = {0.0, near_upper ? Stability::marginal
                                 : from_slope(field_slope_at_zero(p, reward))};
  rep.eq_one = {1.0, near_lower ? Stability::marginal
                                : from_slope(field_slope_at_one(p, reward))};

  const InteriorSolution sol = interior_equilibrium(p, reward);
  rep.eq_interior = InteriorEquilibrium{
      sol.value,
      (near_upper || near_lower) ? Stability::marginal
                                 : from_slope(field_slope_at_interior(p, reward)),
      sol.interior};

  if (near_upper || near_lower)
    rep.region = Region::boundary;
  else if (reward > r_upper)
    rep.region = Region::A;
  else if (reward < r_lower)
    rep.region = Region::C;
  else
    rep.region = Region::B;

  // Basins follow the sign structure of the field on (0,1), clipped to [0,1].
  if (sol.interior && field_slope_at_interior(p, reward) > 0.0) {
    rep.basin_zero = Interval{0.0, sol.value, true, false};
    rep.basin_one = Interval{sol.value, 1.0, false, true};
  } else if (sol.value <= 0.0) {  // field positive throughout (0,1)
    rep.basin_zero = Interval{0.0, 0.0, true, true};
    rep.basin_one = Interval{0.0, 1.0, false, true};
  } else {  // field negative throughout (0,1)
    rep.basin_zero = Interval{0.0, 1.0, true, false};
    rep.basin_one = Interval{1.0, 1.0, true, true};
  }
  return rep;
}

Region region_for(double m, int n, double reward_over_d, double marginal_band) {
  if (!(m >= 1.0)) throw std::invalid_argument("m must be >= 1");
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (!(reward_over_d > 0.0))
    throw std::invalid_argument("reward/d must be positive");
  const double upper = 1.0 / m;
  const double lower = 1.0 / (m + n);
  if (std::fabs(reward_over_d - upper) < marginal_band ||
      std::fabs(reward_over_d - lower) < marginal_band)
    return Region::boundary;
  if (reward_over_d > upper) return Region::A;
  if (reward_over_d < lower) return Region::C;
  return Region::B;
}

std::vector<RegionCell> region_map(int n, double m_lo, double m_hi, double rd_lo,
                                   double rd_hi, int m_cells, int rd_cells) {
  if (m_cells < 1 || rd_cells < 1)
    throw std::invalid_argument("grid resolution must be positive");
  if (!(m_lo >= 1.0) || !(m_hi >= m_lo))
    throw std::invalid_argument("m range must satisfy 1 <= m_lo <= m_hi");
  if (!(rd_lo > 0.0) || !(rd_hi >= rd_lo))
    throw std::invalid_argument("reward/d range must satisfy 0 < lo <= hi");

  std::vector<RegionCell> cells;
  cells.reserve(static_cast<size_t>(m_cells) * rd_cells);
  const double dm = (m_hi - m_lo) / m_cells;
  const double dr = (rd_hi - rd_lo) / rd_cells;
  for (int i = 0; i < m_cells; ++i) {
    const double m = m_lo + (i + 0.5) * dm;
    for (int j = 0; j < rd_cells; ++j) {
      const double rd = rd_lo + (j + 0.5) * dr;
      cells.push_back(RegionCell{m, rd, region_for(m, n, rd)});
    }
  }
  return cells;
}

std::vector<BranchPoint> bifurcation_branches(const ModelParams& p, double r_lo,
                                              double r_hi, int samples) {
  if (samples < 2) throw std::invalid_argument("need at least 2 samples");
  if (!(r_lo > 0.0) || !(r_hi >= r_lo))
    throw std::invalid_argument("reward range must satisfy 0 < lo <= hi");

  std::vector<BranchPoint> rows;
  rows.reserve(static_cast<size_t>(samples) * 3);
  for (int i = 0; i < samples; ++i) {
    const double reward = r_lo + (r_hi - r_lo) * i / (samples - 1);
    const EquilibriumReport rep = classify_equilibria(p, reward);
    rows.push_back({reward, 0.0, rep.eq_zero.stability, 0, false});
    rows.push_back({reward, 1.0, rep.eq_one.stability, 1, false});
    const InteriorEquilibrium& eq = *rep.eq_interior;
    rows.push_back({reward, eq.value, eq.stability, 2,
                    eq.value < 0.0 || eq.value > 1.0});
  }
  return rows;
}

namespace {

// The shifted chart around a stability-exchange point: x is the deviation of
// the state (x1 at the zero site, x0 at the one site), mu the deviation of
// the reward from its critical value.
double chart_field(const ModelParams& p, BifurcationSite site, double r_crit,
                   double x, double mu) {
  if (site == BifurcationSite::at_zero)
    return replicator_field(p, mu + r_crit, x);
  return -replicator_field(p, mu + r_crit, 1.0 - x);
}

}  // namespace

TranscriticalCheck verify_transcritical(const ModelParams& p, BifurcationSite site,
                                        const TranscriticalSettings& s) {
  const double r_crit =
      site == BifurcationSite::at_zero ? p.d / p.m : p.d / (p.m + p.n);

  const double h1 = s.first_order_step;
  const double h2 = s.second_order_step;
  const double k1 = s.first_order_step * std::max(1.0, r_crit);
  const double k2 = s.second_order_step * std::max(1.0, r_crit);
  if (!(h1 > 0.0) || !(h2 > 0.0) || r_crit + k1 == r_crit)
    throw std::invalid_argument("finite-difference step underflow");

  const auto f = [&](double x, double mu) {
    return chart_field(p, site, r_crit, x, mu);
  };

  TranscriticalCheck chk;
  chk.site = site;
  chk.critical_reward = r_crit;
  chk.f00 = f(0.0, 0.0);
  chk.dfdx = (f(h1, 0.0) - f(-h1, 0.0)) / (2.0 * h1);
  chk.dfdmu = (f(0.0, k1) - f(0.0, -k1)) / (2.0 * k1);
  chk.d2f_dx2 = (f(h2, 0.0) - 2.0 * f(0.0, 0.0) + f(-h2, 0.0)) / (h2 * h2);
  chk.d2f_dxdmu = (f(h2, k2) - f(h2, -k2) - f(-h2, k2) + f(-h2, -k2)) /
                  (4.0 * h2 * k2);

  if (site == BifurcationSite::at_zero) {
    chk.expected_dxdmu = 1.0 / p.m;
    chk.expected_dx2 = 2.0 * p.d * p.n / (static_cast<double>(p.m) * p.m * p.m);
  } else {
    const double pool = p.m + p.n;
    chk.expected_dxdmu = -1.0 / pool;
    chk.expected_dx2 = 2.0 * p.d * p.n / (pool * pool * pool);
  }

  const auto match = [&](double got, double want) {
    return std::fabs(got - want) <= s.match_rtol * std::fabs(want);
  };
  chk.passed = std::fabs(chk.f00) < s.zero_tol && std::fabs(chk.dfdx) < s.zero_tol &&
               std::fabs(chk.dfdmu) < s.zero_tol &&
               std::fabs(chk.d2f_dxdmu) > s.zero_tol &&
               std::fabs(chk.d2f_dx2) > s.zero_tol &&
               match(chk.d2f_dxdmu, chk.expected_dxdmu) &&
               match(chk.d2f_dx2, chk.expected_dx2);
  return chk;
}

}  // namespace minedyn
