#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "xsched/graph.hpp"
#include "xsched/platform.hpp"
#include "xsched/timetable.hpp"

namespace xsched {

// Joint XPU-assignment + schedulability model, minimizing end-to-end
// makespan over preemptive timetables.
//
// Per node i: continuous start s_i and finish f_i, and a binary p[i,m] per
// supported instance m. Per window pair (i, j) and instance m, a continuous
// d[i,j,k,m] >= demand of node k inside [s_i, f_j] on m, activated through
// indicator binaries b1[i,k] <=> s_i <= s_k, b2[j,k] <=> f_j >= f_k and
// c[i,j] <=> s_i <= f_j (big-M pairs with M = H, the sum of each node's
// largest supported wcet; strict complements use a 1 us epsilon, exact
// because timetables live on the integer microsecond grid). Constraints:
//
//   (1) sum_m p[i,m] = 1
//   (2) f_u <= s_v                          for every edge u -> v
//   (3) f_i >= s_i + wcet_i^m - H(1 - p[i,m])
//   (4) d[i,j,k,m] >= wcet_k^m - H(3 - p[i,m] - p[j,m] - p[k,m])
//                       - H(1 - b1[i,k]) - H(1 - b2[j,k])
//   (5) sum_k d[i,j,k,m] <= f_j - s_i + H(1 - c[i,j])
//   (6) Z >= f_i, objective min Z
//
// (4)+(5) are the single-processor demand-bound criterion: a window system
// is preemptively schedulable on an instance iff every interval spanned by
// a start and a finish has enough room for the wcets of the windows it
// fully contains.
//
// Variables are instantiated only where they can matter: d[i,j,k,m] needs
// i, j, k to all support m, the window (i, j) must not be forced empty by
// precedence (j reaching i means f_j <= s_i), and k must be able to lie
// inside the window (k reaching i or j reaching k forces it outside).
// Indicators implied by precedence become constants instead of variables.
// Identical instances of a class are interchangeable, so a symmetry-breaking
// constraint p[i, m_r] <= sum_{j<i} p[j, m_{r-1}] forces node-index
// lexicographic instance usage; it never changes the optimum.
struct IlpModel {
  ApplicationGraph graph;       // normalized copy
  PlatformConfig platform;      // normalized copy
  std::optional<Micros> deadline;

  Micros horizon = 0;  // H
  Micros epsilon = 1;

  // Derived index tables, computed by build_model.
  std::vector<std::vector<Micros>> wcet;   // [node][instance], -1 unsupported
  std::vector<std::vector<bool>> reaches;  // transitive precedence closure
  std::vector<std::vector<int>> instance_groups;  // identical instances, by index

  struct Stats {
    std::int64_t p_vars = 0;
    std::int64_t d_vars = 0;
    std::int64_t b1_vars = 0;
    std::int64_t b2_vars = 0;
    std::int64_t c_vars = 0;
    std::int64_t constraints = 0;
  };
  // Counts the materialized model without building row text.
  Stats stats() const;
};

struct IlpBuildOptions {
  std::optional<Micros> deadline;
};

// Validates graph + platform (every node needs an impl available on the
// platform) and precomputes the model tables. Throws std::invalid_argument
// on an unusable input.
IlpModel build_model(const ApplicationGraph& graph,
                     const PlatformConfig& platform,
                     const IlpBuildOptions& options = {});

// Writes the full model in CPLEX LP format. Variables are named s_<id>,
// f_<id>, p_<id>_<xpu>, d_<i>_<j>_<k>_<xpu>, b1_<i>_<k>, b2_<j>_<k>,
// c_<i>_<j>, and Z, with non-alphanumeric id characters mapped to '_'.
std::string export_lp(const IlpModel& model);

struct SolveOptions {
  double time_limit_sec = 0.0;  // 0 = no limit
  double gap_limit = 0.0;       // stop once relative gap <= gap_limit
  int threads = 1;
  // "internal" or "external:<command>". The external command is invoked as
  //   <command> <model.lp> <solution.out>
  // and must write `<variable> <value>` lines (optionally `status <s>` /
  // `objective <v>`). With plain "external", the XSCHED_EXTERNAL_SOLVER
  // environment variable supplies the command.
  std::string backend = "internal";
};

struct SolveStats {
  std::uint64_t nodes_explored = 0;
  double wall_sec = 0.0;
  double lower_bound = 0.0;
};

struct SolveResult {
  ScheduleTimetable timetable;
  SolveStats stats;
};

// Solves the model. The internal backend runs a deterministic depth-first
// branch-and-bound over the binary variables: assignment binaries first
// (canonical orders only, matching the symmetry-breaking constraint), then
// the window indicators via disjunctive branching on violated demand
// windows. Partial assignments are bounded by an LP relaxation solved with
// the bundled simplex routine plus integral path/load bounds; fully ordered
// subproblems reduce to difference constraints solved exactly in integer
// arithmetic. On time limit the incumbent is returned with its gap.
// Throws std::runtime_error when infeasible (only possible with a deadline)
// or when no incumbent exists within the limit.
SolveResult solve(const IlpModel& model, const SolveOptions& options = {});

}  // namespace xsched
