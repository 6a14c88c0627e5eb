#ifndef MINEDYN_CSV_HPP
#define MINEDYN_CSV_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "minedyn/agents.hpp"
#include "minedyn/dynamics.hpp"
#include "minedyn/equilibrium.hpp"

namespace minedyn {

inline constexpr const char* kToolVersion = "0.1.0";

/// 64-bit FNV-1a hash, used to stamp outputs with a digest of the resolved
/// configuration that produced them.
uint64_t fnv1a64(std::string_view bytes);

/// Shortest locale-free decimal form (up to 17 significant digits) that
/// parses back to the identical double.
std::string format_number(double v);

/// Strict numeric field parse; throws ConfigError if the field is not a
/// complete number.
double parse_number(const std::string& field);

/// Comment header stamped at the top of every output file: tool version and
/// a digest of the configuration that produced the data.
struct Provenance {
  std::string config_digest;  // "fnv1a:<16 hex digits>"
};

Provenance provenance_for(std::string_view canonical_config);
void write_provenance(std::ostream& os, const Provenance& prov);

// All writers emit `,`-delimited, `.`-decimal, LF-terminated lines with a
// single column-header line after the provenance comments.  Bodies are
// byte-identical for identical inputs.

/// Columns: R,x1_eq,stability,branch_id
void write_branch_csv(std::ostream& os, const std::vector<BranchPoint>& rows,
                      const Provenance& prov);

/// Columns: m,R_over_d,region
void write_region_csv(std::ostream& os, const std::vector<RegionCell>& cells,
                      const Provenance& prov);

/// Columns: t,x1,R; integration events follow the rows as '#' comments.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                          const Provenance& prov);

/// Columns: leg,R,x1_settled,settle_time
void write_sweep_csv(std::ostream& os, const std::vector<SweepPoint>& points,
                     const Provenance& prov);

/// Columns: t,seed,x1_empirical (rows grouped by seed, seeds in run order)
void write_agents_csv(std::ostream& os,
                      const std::vector<EmpiricalTrajectory>& runs,
                      const Provenance& prov);

/// Columns: t,mean_x1,std_x1,n_seeds
void write_aggregate_csv(std::ostream& os, const EnsembleStats& stats,
                         const Provenance& prov);

/// Parsed CSV with comments preserved; every emitted file reads back
/// through this.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> comments;  // '#' lines, in order of appearance
};

/// Reads a `,`-delimited file with optional '#' comments; throws
/// ConfigError on a missing header or a ragged row.
CsvTable read_csv(std::istream& in);

}  // namespace minedyn

#endif
