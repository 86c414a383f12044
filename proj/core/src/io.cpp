#include "exdiff/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace exdiff {

namespace {

void format_double(std::ostream& os, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  os << buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("io: cannot open " + path + " for writing");
  out << content;
  if (!out) throw std::runtime_error("io: failed writing " + path);
}

}  // namespace

std::string trajectory_csv(const Trajectory& traj) {
  const bool with_cost = !traj.cost.empty();
  if (with_cost && traj.cost.size() != traj.rel_error.size())
    throw std::invalid_argument("io: cost and rel_error lengths differ");
  std::ostringstream os;
  os << "iter,rel_error";
  if (with_cost) os << ",cost";
  os << "\n";
  for (size_t i = 0; i < traj.rel_error.size(); ++i) {
    os << i << ",";
    format_double(os, traj.rel_error[i]);
    if (with_cost) {
      os << ",";
      format_double(os, traj.cost[i]);
    }
    os << "\n";
  }
  if (traj.diverged) os << "# diverged at iter " << traj.divergence_iter << "\n";
  return os.str();
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  write_file(path, trajectory_csv(traj));
}

std::string sweep_csv(const std::vector<SweepPoint>& points) {
  std::ostringstream os;
  os << "mu,rho,stable\n";
  for (const SweepPoint& pt : points) {
    format_double(os, pt.mu);
    os << ",";
    format_double(os, pt.rho);
    os << "," << (pt.stable ? 1 : 0) << "\n";
  }
  return os.str();
}

void write_sweep_csv(const std::string& path, const std::vector<SweepPoint>& points) {
  write_file(path, sweep_csv(points));
}

std::string jury_verdict_json(const JuryVerdict& verdict) {
  nlohmann::json j;
  j["stable"] = (verdict.result == JuryResult::stable);
  if (verdict.result == JuryResult::unstable)
    j["failing_condition"] = verdict.failing_condition;
  else
    j["failing_condition"] = nullptr;
  if (verdict.result == JuryResult::inconclusive) j["inconclusive"] = true;
  return j.dump();
}

}  // namespace exdiff
