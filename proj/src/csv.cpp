#include "minedyn/csv.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "minedyn/errors.hpp"

namespace minedyn {

uint64_t fnv1a64(std::string_view bytes) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string format_number(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_number(const std::string& field) {
  double v = 0.0;
  const char* end = field.data() + field.size();
  const auto res = std::from_chars(field.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end)
    throw ConfigError("not a number: '" + field + "'");
  return v;
}

Provenance provenance_for(std::string_view canonical_config) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a:%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical_config)));
  return Provenance{buf};
}

void write_provenance(std::ostream& os, const Provenance& prov) {
  os << "# minedyn " << kToolVersion << "\n";
  os << "# config-digest " << prov.config_digest << "\n";
}

void write_branch_csv(std::ostream& os, const std::vector<BranchPoint>& rows,
                      const Provenance& prov) {
  write_provenance(os, prov);
  os << "R,x1_eq,stability,branch_id\n";
  for (const auto& r : rows)
    os << format_number(r.reward) << ',' << format_number(r.x1) << ','
       << to_string(r.stability) << ',' << r.branch_id << '\n';
}

void write_region_csv(std::ostream& os, const std::vector<RegionCell>& cells,
                      const Provenance& prov) {
  write_provenance(os, prov);
  os << "m,R_over_d,region\n";
  for (const auto& c : cells)
    os << format_number(c.m) << ',' << format_number(c.reward_over_d) << ','
       << to_string(c.region) << '\n';
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                          const Provenance& prov) {
  write_provenance(os, prov);
  os << "t,x1,R\n";
  for (size_t i = 0; i < traj.times.size(); ++i)
    os << format_number(traj.times[i]) << ',' << format_number(traj.states[i])
       << ',' << format_number(traj.rewards[i]) << '\n';
  for (const auto& e : traj.events)
    os << "# event " << format_number(e.t) << ' ' << to_string(e.kind) << '\n';
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepPoint>& points,
                     const Provenance& prov) {
  write_provenance(os, prov);
  os << "leg,R,x1_settled,settle_time\n";
  for (const auto& s : points)
    os << s.leg << ',' << format_number(s.reward) << ','
       << format_number(s.settled_x1) << ',' << format_number(s.settle_time)
       << '\n';
}

void write_agents_csv(std::ostream& os,
                      const std::vector<EmpiricalTrajectory>& runs,
                      const Provenance& prov) {
  write_provenance(os, prov);
  os << "t,seed,x1_empirical\n";
  for (const auto& run : runs)
    for (size_t i = 0; i < run.times.size(); ++i)
      os << format_number(run.times[i]) << ',' << run.seed << ','
         << format_number(run.x1[i]) << '\n';
}

void write_aggregate_csv(std::ostream& os, const EnsembleStats& stats,
                         const Provenance& prov) {
  write_provenance(os, prov);
  os << "t,mean_x1,std_x1,n_seeds\n";
  for (size_t i = 0; i < stats.times.size(); ++i)
    os << format_number(stats.times[i]) << ','
       << format_number(stats.mean_x1[i]) << ','
       << format_number(stats.std_x1[i]) << ',' << stats.n_seeds << '\n';
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    const size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

}  // namespace

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      table.comments.push_back(line);
      continue;
    }
    if (!have_header) {
      table.columns = split_fields(line);
      have_header = true;
      continue;
    }
    auto fields = split_fields(line);
    if (fields.size() != table.columns.size())
      throw ConfigError("ragged CSV row: '" + line + "'");
    table.rows.push_back(std::move(fields));
  }
  if (!have_header) throw ConfigError("CSV input has no header line");
  return table;
}

}  // namespace minedyn
