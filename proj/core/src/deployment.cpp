#include "xsched/deployment.hpp"

#include <algorithm>
#include <set>

namespace xsched {

const NodeAssignment* DeploymentConfig::find(const std::string& node_id) const {
  for (const auto& a : assignments) {
    if (a.node_id == node_id) return &a;
  }
  return nullptr;
}

void DeploymentConfig::normalize() {
  std::sort(assignments.begin(), assignments.end(),
            [](const NodeAssignment& a, const NodeAssignment& b) {
              return a.node_id < b.node_id;
            });
}

ValidationReport validate(const DeploymentConfig& deployment,
                          const ApplicationGraph& graph,
                          const PlatformConfig& platform) {
  ValidationReport report;

  std::set<std::string> assigned;
  std::set<int> priorities;
  for (const auto& a : deployment.assignments) {
    if (!assigned.insert(a.node_id).second) {
      report.add("node '" + a.node_id + "' assigned more than once");
      continue;
    }
    const XNodeSpec* node = graph.find(a.node_id);
    if (node == nullptr) {
      report.add("assignment references unknown node '" + a.node_id + "'");
      continue;
    }
    if (platform.find(a.xpu_type, a.instance_id) == nullptr) {
      report.add("node '" + a.node_id + "' assigned to unknown instance " +
                 a.xpu_type + std::to_string(a.instance_id));
    }
    if (!node->supports(a.xpu_type)) {
      report.add("node '" + a.node_id + "' has no impl for '" + a.xpu_type + "'");
    }
    if (!priorities.insert(a.priority).second) {
      report.add("duplicate priority " + std::to_string(a.priority) +
                 " (priorities must form a strict total order)");
    }
  }
  for (const auto& node : graph.nodes) {
    if (!assigned.count(node.node_id)) {
      report.add("node '" + node.node_id + "' has no assignment");
    }
  }
  return report;
}

}  // namespace xsched
