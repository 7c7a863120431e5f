#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "xsched/time.hpp"

namespace xsched {

// Name of a processor class ("CPU", "GPU", "DLA", ...). The set is open:
// platform files may introduce new names at will. Names are case-sensitive.
using XpuType = std::string;

// One implementation of a task stage on a particular processor class.
struct ImplSpec {
  XpuType xpu_type;
  Micros wcet = 0;  // worst-case execution time in microseconds, > 0

  friend bool operator==(const ImplSpec&, const ImplSpec&) = default;
};

// A stage-level task. node_id is unique within a graph. impls lists the
// processor classes the stage can run on, at most one impl per class.
struct XNodeSpec {
  std::string node_id;
  std::string module_id;
  std::vector<ImplSpec> impls;

  bool supports(const XpuType& type) const;
  std::optional<Micros> wcet_on(const XpuType& type) const;
  // Largest wcet over all impls (used for horizon computations).
  Micros max_wcet() const;

  friend bool operator==(const XNodeSpec&, const XNodeSpec&) = default;
};

// A sequential chain of stages, wired to other modules through pub/sub
// topics. node_ids gives the execution order inside the module.
struct XModuleSpec {
  std::string module_id;
  std::vector<std::string> node_ids;
  std::vector<std::string> input_topics;
  std::vector<std::string> output_topics;

  friend bool operator==(const XModuleSpec&, const XModuleSpec&) = default;
};

// Directed precedence edge: first must finish before second may start.
using Edge = std::pair<std::string, std::string>;

// Stage-level DAG, the unit every policy and the simulator consume.
// normalize() keeps nodes sorted by node_id and edges sorted and duplicate
// free, so equal graphs compare and serialize identically.
struct ApplicationGraph {
  std::vector<XNodeSpec> nodes;
  std::vector<Edge> edges;

  const XNodeSpec* find(const std::string& node_id) const;
  void normalize();

  friend bool operator==(const ApplicationGraph&, const ApplicationGraph&) = default;
};

struct ValidationIssue {
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool valid() const { return issues.empty(); }
  void add(std::string message) { issues.push_back({std::move(message)}); }
  // All messages joined with newlines; empty string when valid.
  std::string to_string() const;
};

// Wires module stage chains and topic edges into one stage-level DAG:
// consecutive stages of a module are chained, and for every topic the last
// stage of its publishing module precedes the first stage of every
// subscribing module. Throws std::invalid_argument on unknown node ids, on
// a topic with more than one publisher, or when the result has a cycle.
ApplicationGraph flatten(const std::vector<XModuleSpec>& modules,
                         const std::vector<XNodeSpec>& nodes);

// Structural checks: unique node ids, edge endpoints exist, no duplicate
// edges or impls, positive wcets, non-empty impl lists, acyclicity.
// Reports instead of throwing.
ValidationReport validate(const ApplicationGraph& graph);

// Deterministic topological order: Kahn's algorithm, ties resolved by
// lexicographically smallest node id. Throws std::invalid_argument if the
// graph has a cycle or an edge references a missing node.
std::vector<std::string> topo_order(const ApplicationGraph& graph);

}  // namespace xsched
