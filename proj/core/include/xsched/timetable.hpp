#pragma once

#include <string>
#include <vector>

#include "xsched/deployment.hpp"
#include "xsched/graph.hpp"
#include "xsched/platform.hpp"

namespace xsched {

enum class OptimalityStatus { kProvenOptimal, kGap, kHeuristicFeasible };

struct Optimality {
  OptimalityStatus status = OptimalityStatus::kHeuristicFeasible;
  double gap = 0.0;  // relative (incumbent - bound) / incumbent, kGap only

  std::string to_string() const;

  friend bool operator==(const Optimality&, const Optimality&) = default;
};

// One node's execution window in a planned schedule. The window is where
// the node's whole wcet must fit; inside a window the node may be preempted
// and resumed arbitrarily.
struct TimetableEntry {
  std::string node_id;
  Micros start = 0;
  Micros finish = 0;
  XpuType xpu_type;
  int instance_id = 0;

  friend bool operator==(const TimetableEntry&, const TimetableEntry&) = default;
};

struct ScheduleTimetable {
  std::vector<TimetableEntry> entries;  // sorted by node_id
  Micros makespan = 0;
  Optimality optimality;

  const TimetableEntry* find(const std::string& node_id) const;
  void normalize();

  friend bool operator==(const ScheduleTimetable&, const ScheduleTimetable&) = default;
};

// Turns a timetable into a runnable deployment: the planned windows are
// realized by fixed priorities, nodes sorted ascending by finish time get
// descending priority (ties: earlier start first, then smaller node id).
DeploymentConfig interpret(const ScheduleTimetable& timetable);

struct FeasibilityReport {
  std::vector<std::string> violations;
  bool feasible() const { return violations.empty(); }
  std::string to_string() const;
};

// Independent feasibility check of a timetable, written against the schedule
// semantics rather than any solver internals:
//  - every node has exactly one entry on an existing instance with an impl,
//  - predecessors finish no later than successors start,
//  - finish - start >= wcet of the chosen impl,
//  - demand bound: for every window [start_a, finish_b] with start_a <=
//    finish_b and every instance, the summed wcet of nodes assigned to that
//    instance whose windows lie fully inside is at most the window length.
FeasibilityReport verify_timetable(const ScheduleTimetable& timetable,
                                   const ApplicationGraph& graph,
                                   const PlatformConfig& platform);

}  // namespace xsched
