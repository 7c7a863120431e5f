#include "xsched/graph.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>

namespace xsched {

bool XNodeSpec::supports(const XpuType& type) const {
  return wcet_on(type).has_value();
}

std::optional<Micros> XNodeSpec::wcet_on(const XpuType& type) const {
  for (const auto& impl : impls) {
    if (impl.xpu_type == type) return impl.wcet;
  }
  return std::nullopt;
}

Micros XNodeSpec::max_wcet() const {
  Micros best = 0;
  for (const auto& impl : impls) best = std::max(best, impl.wcet);
  return best;
}

const XNodeSpec* ApplicationGraph::find(const std::string& node_id) const {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), node_id,
                             [](const XNodeSpec& n, const std::string& id) {
                               return n.node_id < id;
                             });
  if (it != nodes.end() && it->node_id == node_id) return &*it;
  // Fall back to a linear scan in case the graph was not normalized.
  for (const auto& n : nodes) {
    if (n.node_id == node_id) return &n;
  }
  return nullptr;
}

void ApplicationGraph::normalize() {
  std::sort(nodes.begin(), nodes.end(),
            [](const XNodeSpec& a, const XNodeSpec& b) { return a.node_id < b.node_id; });
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
}

std::string ValidationReport::to_string() const {
  std::string out;
  for (const auto& issue : issues) {
    if (!out.empty()) out += '\n';
    out += issue.message;
  }
  return out;
}

ApplicationGraph flatten(const std::vector<XModuleSpec>& modules,
                         const std::vector<XNodeSpec>& nodes) {
  std::map<std::string, const XNodeSpec*> by_id;
  for (const auto& node : nodes) {
    if (!by_id.emplace(node.node_id, &node).second) {
      throw std::invalid_argument("flatten: duplicate node id '" + node.node_id + "'");
    }
  }

  ApplicationGraph graph;
  graph.nodes = nodes;

  // Chain the stages inside each module.
  for (const auto& mod : modules) {
    if (mod.node_ids.empty()) {
      throw std::invalid_argument("flatten: module '" + mod.module_id + "' has no stages");
    }
    for (const auto& id : mod.node_ids) {
      if (!by_id.count(id)) {
        throw std::invalid_argument("flatten: module '" + mod.module_id +
                                    "' references unknown node '" + id + "'");
      }
    }
    for (std::size_t i = 0; i + 1 < mod.node_ids.size(); ++i) {
      graph.edges.emplace_back(mod.node_ids[i], mod.node_ids[i + 1]);
    }
  }

  // Topic wiring: the publisher's last stage precedes every subscriber's
  // first stage. A topic must not have two publishers.
  std::map<std::string, const XModuleSpec*> publisher;
  for (const auto& mod : modules) {
    for (const auto& topic : mod.output_topics) {
      auto [it, inserted] = publisher.emplace(topic, &mod);
      if (!inserted) {
        throw std::invalid_argument("flatten: topic '" + topic +
                                    "' published by both '" + it->second->module_id +
                                    "' and '" + mod.module_id + "'");
      }
    }
  }
  for (const auto& mod : modules) {
    for (const auto& topic : mod.input_topics) {
      auto it = publisher.find(topic);
      if (it == publisher.end()) continue;  // external input (sensor feed)
      const XModuleSpec& pub = *it->second;
      if (pub.module_id == mod.module_id) {
        throw std::invalid_argument("flatten: module '" + mod.module_id +
                                    "' subscribes to its own topic '" + topic + "'");
      }
      graph.edges.emplace_back(pub.node_ids.back(), mod.node_ids.front());
    }
  }

  graph.normalize();
  topo_order(graph);  // throws on cycles
  return graph;
}

ValidationReport validate(const ApplicationGraph& graph) {
  ValidationReport report;

  std::set<std::string> ids;
  for (const auto& node : graph.nodes) {
    if (node.node_id.empty()) report.add("node with empty id");
    if (!ids.insert(node.node_id).second) {
      report.add("duplicate node id '" + node.node_id + "'");
    }
    if (node.impls.empty()) {
      report.add("node '" + node.node_id + "' has no impls");
    }
    std::set<XpuType> types;
    for (const auto& impl : node.impls) {
      if (impl.wcet <= 0) {
        report.add("node '" + node.node_id + "' impl on '" + impl.xpu_type +
                   "' has non-positive wcet");
      }
      if (!types.insert(impl.xpu_type).second) {
        report.add("node '" + node.node_id + "' has duplicate impl for '" +
                   impl.xpu_type + "'");
      }
    }
  }

  std::set<Edge> seen;
  for (const auto& [from, to] : graph.edges) {
    if (!ids.count(from)) report.add("edge references unknown node '" + from + "'");
    if (!ids.count(to)) report.add("edge references unknown node '" + to + "'");
    if (from == to) report.add("self-edge on node '" + from + "'");
    if (!seen.insert({from, to}).second) {
      report.add("duplicate edge " + from + " -> " + to);
    }
  }

  try {
    topo_order(graph);
  } catch (const std::invalid_argument& e) {
    report.add(e.what());
  }
  return report;
}

std::vector<std::string> topo_order(const ApplicationGraph& graph) {
  std::map<std::string, int> indegree;
  for (const auto& node : graph.nodes) indegree[node.node_id] = 0;
  std::map<std::string, std::vector<std::string>> succ;
  for (const auto& [from, to] : graph.edges) {
    if (!indegree.count(from) || !indegree.count(to)) {
      throw std::invalid_argument("topo_order: edge references unknown node");
    }
    succ[from].push_back(to);
    ++indegree[to];
  }

  // Min-heap on node id makes the order unique across runs and platforms.
  std::priority_queue<std::string, std::vector<std::string>, std::greater<>> ready;
  for (const auto& [id, deg] : indegree) {
    if (deg == 0) ready.push(id);
  }

  std::vector<std::string> order;
  order.reserve(graph.nodes.size());
  while (!ready.empty()) {
    std::string id = ready.top();
    ready.pop();
    order.push_back(id);
    for (const auto& next : succ[id]) {
      if (--indegree[next] == 0) ready.push(next);
    }
  }
  if (order.size() != graph.nodes.size()) {
    throw std::invalid_argument("topo_order: graph has a cycle");
  }
  return order;
}

}  // namespace xsched
