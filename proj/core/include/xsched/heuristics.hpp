#pragma once

#include <cstdint>

#include "xsched/deployment.hpp"
#include "xsched/graph.hpp"
#include "xsched/platform.hpp"

namespace xsched {

// Baseline 1: every node on its fastest supported class (ties by type name),
// spreading across instances of that class round-robin in topological order.
// Priorities follow topological order, earlier nodes higher. Models a
// developer picking the obviously fastest device per stage.
DeploymentConfig fastest_xpu(const ApplicationGraph& graph,
                             const PlatformConfig& platform);

struct HeuristicResult {
  DeploymentConfig deployment;
  Micros predicted_makespan = 0;
};

// Baseline 2: HEFT adapted to per-class impls. Upward rank uses the mean
// wcet over supported classes and zero communication cost; nodes are placed
// in descending rank order on the instance minimizing earliest finish time
// with insertion-based slot search. Priorities: descending rank.
HeuristicResult heft(const ApplicationGraph& graph,
                     const PlatformConfig& platform);

struct BruteForceOptions {
  int max_nodes = 10;        // refuse larger graphs
  bool zero_overheads = true;
};

struct BruteForceResult {
  DeploymentConfig deployment;
  Micros makespan = 0;
  std::uint64_t evaluated = 0;  // simulated (assignment, priority) pairs
};

// Baseline 3 / oracle: exhaustive search over XPU assignments and priority
// orders, each candidate evaluated with the discrete-event simulator in
// fixed-priority preemptive mode. Equivalent assignments that only permute
// identical instances are enumerated once, and only priority orders
// consistent with precedence are tried (a successor can never be dispatched
// before its predecessor finishes, so demoting it below the predecessor
// never changes the schedule). Ties pick the lexicographically smallest
// (assignment, priority) encoding. Throws std::invalid_argument when the
// graph exceeds max_nodes.
BruteForceResult brute_force(const ApplicationGraph& graph,
                             const PlatformConfig& platform,
                             const BruteForceOptions& options = {});

}  // namespace xsched
