#include "xsched/timetable.hpp"

#include <algorithm>
#include <map>
#include <tuple>

namespace xsched {

std::string Optimality::to_string() const {
  switch (status) {
    case OptimalityStatus::kProvenOptimal: return "proven-optimal";
    case OptimalityStatus::kGap: return "gap " + std::to_string(gap);
    case OptimalityStatus::kHeuristicFeasible: return "heuristic-feasible";
  }
  return "?";
}

const TimetableEntry* ScheduleTimetable::find(const std::string& node_id) const {
  for (const auto& entry : entries) {
    if (entry.node_id == node_id) return &entry;
  }
  return nullptr;
}

void ScheduleTimetable::normalize() {
  std::sort(entries.begin(), entries.end(),
            [](const TimetableEntry& a, const TimetableEntry& b) {
              return a.node_id < b.node_id;
            });
}

DeploymentConfig interpret(const ScheduleTimetable& timetable) {
  std::vector<const TimetableEntry*> order;
  order.reserve(timetable.entries.size());
  for (const auto& entry : timetable.entries) order.push_back(&entry);
  std::sort(order.begin(), order.end(),
            [](const TimetableEntry* a, const TimetableEntry* b) {
              return std::tie(a->finish, a->start, a->node_id) <
                     std::tie(b->finish, b->start, b->node_id);
            });

  DeploymentConfig deployment;
  deployment.policy = "timetable";
  int priority = static_cast<int>(order.size());
  for (const TimetableEntry* entry : order) {
    deployment.assignments.push_back(
        {entry->node_id, entry->xpu_type, entry->instance_id, priority--});
  }
  deployment.normalize();
  return deployment;
}

std::string FeasibilityReport::to_string() const {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += '\n';
    out += v;
  }
  return out;
}

FeasibilityReport verify_timetable(const ScheduleTimetable& timetable,
                                   const ApplicationGraph& graph,
                                   const PlatformConfig& platform) {
  FeasibilityReport report;
  auto fail = [&report](std::string msg) { report.violations.push_back(std::move(msg)); };

  std::map<std::string, const TimetableEntry*> entry_of;
  for (const auto& entry : timetable.entries) {
    if (!entry_of.emplace(entry.node_id, &entry).second) {
      fail("duplicate entry for node '" + entry.node_id + "'");
    }
  }

  for (const auto& node : graph.nodes) {
    auto it = entry_of.find(node.node_id);
    if (it == entry_of.end()) {
      fail("node '" + node.node_id + "' has no entry");
      continue;
    }
    const TimetableEntry& entry = *it->second;
    if (platform.find(entry.xpu_type, entry.instance_id) == nullptr) {
      fail("node '" + node.node_id + "' placed on unknown instance " + entry.xpu_type +
           std::to_string(entry.instance_id));
      continue;
    }
    auto wcet = node.wcet_on(entry.xpu_type);
    if (!wcet) {
      fail("node '" + node.node_id + "' has no impl for type '" + entry.xpu_type + "'");
      continue;
    }
    if (entry.start < 0) fail("node '" + node.node_id + "' starts before 0");
    if (entry.finish - entry.start < *wcet) {
      fail("window of '" + node.node_id + "' is shorter than its wcet");
    }
  }
  for (const auto& entry : timetable.entries) {
    if (graph.find(entry.node_id) == nullptr) {
      fail("entry for unknown node '" + entry.node_id + "'");
    }
  }
  if (!report.feasible()) return report;

  for (const auto& [from, to] : graph.edges) {
    const TimetableEntry* a = entry_of.at(from);
    const TimetableEntry* b = entry_of.at(to);
    if (a->finish > b->start) {
      fail("'" + to + "' starts at " + std::to_string(b->start) + " before '" + from +
           "' finishes at " + std::to_string(a->finish));
    }
  }

  // Demand bound: any window spanned by a start and a later-or-equal finish
  // must have room for all work confined inside it on each instance. Nodes
  // are grouped per instance first; windows spanned by entries of other
  // instances never tighten the bound, so per-instance pairs suffice.
  struct Plan {
    const TimetableEntry* entry;
    Micros wcet;
  };
  std::map<std::pair<XpuType, int>, std::vector<Plan>> per_instance;
  for (const auto& node : graph.nodes) {
    const TimetableEntry* entry = entry_of.at(node.node_id);
    per_instance[{entry->xpu_type, entry->instance_id}].push_back(
        {entry, *node.wcet_on(entry->xpu_type)});
  }
  for (const auto& [key, plans] : per_instance) {
    for (const Plan& a : plans) {
      for (const Plan& b : plans) {
        const Micros lo = a.entry->start;
        const Micros hi = b.entry->finish;
        if (lo > hi) continue;
        Micros demand = 0;
        for (const Plan& inside : plans) {
          if (inside.entry->start >= lo && inside.entry->finish <= hi) {
            demand += inside.wcet;
          }
        }
        if (demand > hi - lo) {
          fail("instance " + key.first + std::to_string(key.second) + " is overloaded in [" +
               std::to_string(lo) + ", " + std::to_string(hi) + "]: demand " +
               std::to_string(demand) + " us exceeds " + std::to_string(hi - lo) + " us");
        }
      }
    }
  }

  Micros makespan = 0;
  for (const auto& entry : timetable.entries) makespan = std::max(makespan, entry.finish);
  if (timetable.makespan != makespan) {
    fail("stated makespan " + std::to_string(timetable.makespan) +
         " != max finish " + std::to_string(makespan));
  }

  return report;
}

}  // namespace xsched
