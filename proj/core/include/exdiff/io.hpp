#pragma once

#include <string>
#include <vector>

#include "exdiff/solver.hpp"
#include "exdiff/stability.hpp"

namespace exdiff {

// Serialization helpers shared by the CLI and the tests. All floating-point
// fields are written with 17 significant digits so values round-trip exactly.

// Trajectory CSV: header "iter,rel_error" (plus ",cost" when the trajectory
// recorded costs), one row per recorded iterate starting at iter 0, and a
// trailing comment line "# diverged at iter N" when the run diverged.
void write_trajectory_csv(const std::string& path, const Trajectory& traj);
std::string trajectory_csv(const Trajectory& traj);

// Sweep CSV: header "mu,rho,stable" with stable as 0/1.
void write_sweep_csv(const std::string& path, const std::vector<SweepPoint>& points);
std::string sweep_csv(const std::vector<SweepPoint>& points);

// Jury verdict JSON: {"stable": bool, "failing_condition": int|null}; an
// inconclusive verdict additionally sets "inconclusive": true.
std::string jury_verdict_json(const JuryVerdict& verdict);

}  // namespace exdiff
