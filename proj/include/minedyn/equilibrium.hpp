#ifndef MINEDYN_EQUILIBRIUM_HPP
#define MINEDYN_EQUILIBRIUM_HPP

#include <optional>
#include <string>
#include <vector>

#include "minedyn/model.hpp"

namespace minedyn {

enum class Stability { stable, unstable, marginal };

/// Parameter-plane regions:
///   A: R/d > 1/m            (full participation attracts everything in (0,1])
///   B: 1/(m+n) < R/d < 1/m  (bistable, basins split at the interior point)
///   C: R/d < 1/(m+n)        (participation collapses from [0,1))
enum class Region { A, B, C, boundary };

const char* to_string(Stability s);
const char* to_string(Region r);

/// One-dimensional interval with open/closed endpoints, clipped to [0,1].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool lo_closed = true;
  bool hi_closed = true;

  std::string to_string() const;
};

struct EquilibriumPoint {
  double value;
  Stability stability;
};

struct InteriorEquilibrium {
  double value;
  Stability stability;
  bool in_unit_interval;  // strictly between 0 and 1
};

/// The three equilibria of the replicator field with stability labels,
/// the region tag, and the basins of attraction clipped to [0,1].
struct EquilibriumReport {
  EquilibriumPoint eq_zero;
  EquilibriumPoint eq_one;
  std::optional<InteriorEquilibrium> eq_interior;
  Region region = Region::boundary;
  Interval basin_zero;
  Interval basin_one;
};

enum class BifurcationSite { at_zero, at_one };

/// Numerical verification that the field undergoes a transcritical
/// bifurcation at one of the two stability-exchange points.  The first
/// three entries must vanish, the two second partials must not, and the
/// second partials must match their closed forms.
struct TranscriticalCheck {
  BifurcationSite site;
  double critical_reward;  // d/m or d/(m+n)
  double f00 = 0.0;
  double dfdx = 0.0;
  double dfdmu = 0.0;
  double d2f_dxdmu = 0.0;
  double d2f_dx2 = 0.0;
  double expected_dxdmu = 0.0;
  double expected_dx2 = 0.0;
  bool passed = false;
};

struct BranchPoint {
  double reward;
  double x1;
  Stability stability;
  int branch_id;   // 0: x1=0 branch, 1: x1=1 branch, 2: interior branch
  bool exterior;   // interior branch outside [0,1]
};

struct RegionCell {
  double m;
  double reward_over_d;
  Region region;
};

/// Closed-form interior equilibrium x1* = (d/R - m)/n.
struct InteriorSolution {
  double value;
  bool interior;  // strictly inside (0,1)
};
InteriorSolution interior_equilibrium(const ModelParams& p, double reward);

/// Relative half-width (scaled by d) of the reward band around the two
/// bifurcation values inside which linearization is inconclusive and
/// equilibria are labeled marginal.
inline constexpr double kMarginalBand = 1e-9;

EquilibriumReport classify_equilibria(const ModelParams& p, double reward,
                                      double marginal_band = kMarginalBand);

/// Region tag for real-valued m (the boundary curves extend continuously
/// between integer miner counts).
Region region_for(double m, int n, double reward_over_d,
                  double marginal_band = kMarginalBand);

std::vector<RegionCell> region_map(int n, double m_lo, double m_hi,
                                   double rd_lo, double rd_hi,
                                   int m_cells, int rd_cells);

std::vector<BranchPoint> bifurcation_branches(const ModelParams& p, double r_lo,
                                              double r_hi, int samples);

struct TranscriticalSettings {
  double first_order_step = 1e-7;   // relative step for first partials
  double second_order_step = 1e-5;  // relative step for second partials
  double zero_tol = 1e-9;           // bound on the quantities that must vanish
  double match_rtol = 1e-6;         // second partials vs closed forms
};

TranscriticalCheck verify_transcritical(const ModelParams& p, BifurcationSite site,
                                        const TranscriticalSettings& settings = {});

}  // namespace minedyn

#endif
