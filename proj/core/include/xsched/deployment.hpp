#pragma once

#include <string>
#include <vector>

#include "xsched/graph.hpp"
#include "xsched/platform.hpp"

namespace xsched {

// Where one node runs and how urgent it is. Larger priority value means
// higher priority; priorities must be pairwise distinct in a deployment.
struct NodeAssignment {
  std::string node_id;
  XpuType xpu_type;
  int instance_id = 0;
  int priority = 0;

  friend bool operator==(const NodeAssignment&, const NodeAssignment&) = default;
};

// Output of every planning policy: a full XPU assignment plus a strict
// priority order. `policy` records which planner produced it.
struct DeploymentConfig {
  std::string policy;
  std::vector<NodeAssignment> assignments;  // kept sorted by node_id

  const NodeAssignment* find(const std::string& node_id) const;
  void normalize();

  friend bool operator==(const DeploymentConfig&, const DeploymentConfig&) = default;
};

// Every node assigned exactly once, referenced instances exist, the node has
// an impl for the chosen type, and priorities form a strict total order.
ValidationReport validate(const DeploymentConfig& deployment,
                          const ApplicationGraph& graph,
                          const PlatformConfig& platform);

}  // namespace xsched
