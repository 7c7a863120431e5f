#pragma once

#include <string>
#include <utility>
#include <vector>

#include "xsched/deployment.hpp"
#include "xsched/graph.hpp"
#include "xsched/platform.hpp"
#include "xsched/simulator.hpp"

namespace xsched::testsupport {

// Terse builders so tests read like the scenarios they encode.

inline XNodeSpec make_node(std::string id, std::vector<ImplSpec> impls,
                           std::string module = "m0") {
  XNodeSpec node;
  node.node_id = std::move(id);
  node.module_id = std::move(module);
  node.impls = std::move(impls);
  return node;
}

inline ApplicationGraph make_graph(std::vector<XNodeSpec> nodes,
                                   std::vector<Edge> edges = {}) {
  ApplicationGraph graph;
  graph.nodes = std::move(nodes);
  graph.edges = std::move(edges);
  graph.normalize();
  return graph;
}

inline XpuInstance make_xpu(XpuType type, int instance_id, bool preemptive = true,
                            Micros preempt_overhead = 0, Micros restore_overhead = 0,
                            Micros rr_quantum = 1000) {
  XpuInstance xpu;
  xpu.xpu_type = std::move(type);
  xpu.instance_id = instance_id;
  xpu.preemptive = preemptive;
  xpu.preempt_overhead = preempt_overhead;
  xpu.restore_overhead = restore_overhead;
  xpu.rr_quantum = rr_quantum;
  return xpu;
}

inline PlatformConfig make_platform(std::vector<XpuInstance> xpus) {
  PlatformConfig platform;
  platform.xpus = std::move(xpus);
  platform.normalize();
  return platform;
}

inline DeploymentConfig make_deployment(std::vector<NodeAssignment> assignments,
                                        std::string policy = "test") {
  DeploymentConfig deployment;
  deployment.policy = std::move(policy);
  deployment.assignments = std::move(assignments);
  deployment.normalize();
  return deployment;
}

// One preemptive GPU, zero overheads unless configured otherwise.
inline PlatformConfig one_gpu(Micros preempt_overhead = 0,
                              Micros restore_overhead = 0,
                              Micros rr_quantum = 1000) {
  return make_platform(
      {make_xpu("GPU", 0, true, preempt_overhead, restore_overhead, rr_quantum)});
}

}  // namespace xsched::testsupport
