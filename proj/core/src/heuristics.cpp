#include "xsched/heuristics.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <tuple>

#include "xsched/simulator.hpp"

namespace xsched {

namespace {

// Supported classes that actually exist on the platform, ascending by name.
std::vector<XpuType> usable_types(const XNodeSpec& node, const PlatformConfig& platform) {
  std::vector<XpuType> types;
  for (const auto& impl : node.impls) {
    if (platform.has_type(impl.xpu_type)) types.push_back(impl.xpu_type);
  }
  std::sort(types.begin(), types.end());
  if (types.empty()) {
    throw std::invalid_argument("node '" + node.node_id +
                                "' has no impl for any platform class");
  }
  return types;
}

}  // namespace

DeploymentConfig fastest_xpu(const ApplicationGraph& graph,
                             const PlatformConfig& platform) {
  ApplicationGraph g = graph;
  g.normalize();
  PlatformConfig p = platform;
  p.normalize();

  const std::vector<std::string> topo = topo_order(g);
  std::map<std::string, int> topo_pos;
  for (std::size_t i = 0; i < topo.size(); ++i) topo_pos[topo[i]] = static_cast<int>(i);

  DeploymentConfig deployment;
  deployment.policy = "fastest-xpu";
  std::map<XpuType, std::size_t> next_instance;
  const int n = static_cast<int>(topo.size());
  for (const std::string& node_id : topo) {
    const XNodeSpec* node = g.find(node_id);
    XpuType best;
    Micros best_wcet = 0;
    for (const XpuType& type : usable_types(*node, p)) {
      const Micros wcet = *node->wcet_on(type);
      if (best.empty() || wcet < best_wcet) {
        best = type;
        best_wcet = wcet;
      }
    }
    const auto instances = p.of_type(best);
    const XpuInstance* xpu = instances[next_instance[best]++ % instances.size()];
    deployment.assignments.push_back(
        {node_id, best, xpu->instance_id, n - topo_pos[node_id]});
  }
  deployment.normalize();
  return deployment;
}

HeuristicResult heft(const ApplicationGraph& graph, const PlatformConfig& platform) {
  ApplicationGraph g = graph;
  g.normalize();
  PlatformConfig p = platform;
  p.normalize();

  std::map<std::string, std::vector<std::string>> succs;
  std::map<std::string, std::vector<std::string>> preds;
  for (const auto& [from, to] : g.edges) {
    succs[from].push_back(to);
    preds[to].push_back(from);
  }

  // Upward rank over the mean wcet of each node's usable impls.
  std::map<std::string, double> mean_wcet;
  for (const auto& node : g.nodes) {
    double sum = 0.0;
    const auto types = usable_types(node, p);
    for (const XpuType& type : types) sum += static_cast<double>(*node.wcet_on(type));
    mean_wcet[node.node_id] = sum / static_cast<double>(types.size());
  }
  std::map<std::string, double> rank;
  std::vector<std::string> topo = topo_order(g);
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    double best_succ = 0.0;
    for (const auto& s : succs[*it]) best_succ = std::max(best_succ, rank[s]);
    rank[*it] = mean_wcet[*it] + best_succ;
  }

  std::vector<std::string> order = topo;
  std::sort(order.begin(), order.end(), [&rank](const std::string& a, const std::string& b) {
    if (rank[a] != rank[b]) return rank[a] > rank[b];
    return a < b;
  });

  // Insertion-based list scheduling: per instance a sorted list of busy
  // intervals, each node lands where it finishes earliest.
  std::map<std::pair<XpuType, int>, std::vector<std::pair<Micros, Micros>>> busy;
  std::map<std::string, Micros> finish;
  HeuristicResult result;
  result.deployment.policy = "heft";
  for (const std::string& node_id : order) {
    const XNodeSpec* node = g.find(node_id);
    Micros ready = 0;
    for (const auto& pred : preds[node_id]) ready = std::max(ready, finish[pred]);

    const XpuInstance* best_xpu = nullptr;
    Micros best_start = 0;
    Micros best_eft = 0;
    for (const auto& xpu : p.xpus) {
      auto wcet = node->wcet_on(xpu.xpu_type);
      if (!wcet) continue;
      Micros start = ready;
      for (const auto& [s, e] : busy[{xpu.xpu_type, xpu.instance_id}]) {
        if (e <= start) continue;
        if (s >= start + *wcet) break;  // fits in the gap before this interval
        start = e;
      }
      const Micros eft = start + *wcet;
      if (best_xpu == nullptr || eft < best_eft) {
        best_xpu = &xpu;
        best_start = start;
        best_eft = eft;
      }
    }
    if (best_xpu == nullptr) {
      throw std::invalid_argument("node '" + node_id +
                                  "' has no impl for any platform class");
    }

    auto& intervals = busy[{best_xpu->xpu_type, best_xpu->instance_id}];
    intervals.emplace_back(best_start, best_eft);
    std::sort(intervals.begin(), intervals.end());
    finish[node_id] = best_eft;
    result.predicted_makespan = std::max(result.predicted_makespan, best_eft);
    result.deployment.assignments.push_back(
        {node_id, best_xpu->xpu_type, best_xpu->instance_id, 0});
  }

  // Priorities follow the rank order: first placed, highest priority.
  std::map<std::string, int> prio;
  int next = static_cast<int>(order.size());
  for (const std::string& node_id : order) prio[node_id] = next--;
  for (auto& a : result.deployment.assignments) a.priority = prio[a.node_id];
  result.deployment.normalize();
  return result;
}

namespace {

struct BruteContext {
  const ApplicationGraph* graph;
  const PlatformConfig* platform;
  BruteForceOptions options;
  SimConfig sim_config;

  int n = 0;
  std::vector<const XNodeSpec*> nodes;
  std::vector<std::vector<bool>> reaches;  // reaches[u][v]: path u -> v

  // Instances grouped by interchangeability; within a group only canonical
  // (first-free) labelings are enumerated.
  struct Group {
    XpuType type;
    std::vector<const XpuInstance*> instances;
  };
  std::vector<Group> groups;
  std::map<XpuType, std::vector<int>> groups_of_type;

  // Current assignment: per node (group index, member index).
  std::vector<std::pair<int, int>> chosen;

  BruteForceResult best;
  bool have_best = false;
  std::uint64_t evaluated = 0;
};

void evaluate_candidate(BruteContext& ctx,
                        const std::vector<std::vector<int>>& orders_per_instance) {
  DeploymentConfig deployment;
  deployment.policy = "brute-force";
  int priority = ctx.n;
  for (const auto& order : orders_per_instance) {
    for (int idx : order) {
      const auto& [gi, mi] = ctx.chosen[idx];
      const XpuInstance* xpu = ctx.groups[gi].instances[mi];
      deployment.assignments.push_back(
          {ctx.nodes[idx]->node_id, xpu->xpu_type, xpu->instance_id, priority--});
    }
  }
  deployment.normalize();

  const SimulationTrace trace =
      simulate(*ctx.graph, *ctx.platform, deployment, ctx.sim_config);
  ctx.evaluated++;
  if (!ctx.have_best || trace.makespan < ctx.best.makespan) {
    ctx.have_best = true;
    ctx.best.makespan = trace.makespan;
    ctx.best.deployment = deployment;
  }
}

// Enumerates the cartesian product of per-instance priority orders, each a
// linear extension of the precedence relation restricted to that instance.
void enumerate_orders(BruteContext& ctx, std::vector<std::vector<int>>& per_instance,
                      const std::vector<std::vector<int>>& members, std::size_t lane) {
  if (lane == members.size()) {
    evaluate_candidate(ctx, per_instance);
    return;
  }
  const std::vector<int>& pool = members[lane];
  std::vector<int>& order = per_instance[lane];
  std::vector<bool> used(pool.size(), false);

  // Recursive lexicographic generation of linear extensions of `pool`.
  auto extend = [&](auto&& self) -> void {
    if (order.size() == pool.size()) {
      enumerate_orders(ctx, per_instance, members, lane + 1);
      return;
    }
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (used[i]) continue;
      bool minimal = true;
      for (std::size_t j = 0; j < pool.size(); ++j) {
        if (!used[j] && j != i && ctx.reaches[pool[j]][pool[i]]) {
          minimal = false;
          break;
        }
      }
      if (!minimal) continue;
      used[i] = true;
      order.push_back(pool[i]);
      self(self);
      order.pop_back();
      used[i] = false;
    }
  };
  extend(extend);
}

void assignments_done(BruteContext& ctx) {
  // Group the chosen nodes per concrete instance, ordered by instance.
  std::map<const XpuInstance*, std::vector<int>> by_instance;
  for (int idx = 0; idx < ctx.n; ++idx) {
    const auto& [gi, mi] = ctx.chosen[idx];
    by_instance[ctx.groups[gi].instances[mi]].push_back(idx);
  }
  std::vector<std::pair<std::pair<XpuType, int>, std::vector<int>>> lanes;
  for (const auto& [xpu, idxs] : by_instance) {
    lanes.push_back({{xpu->xpu_type, xpu->instance_id}, idxs});
  }
  std::sort(lanes.begin(), lanes.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<std::vector<int>> members;
  members.reserve(lanes.size());
  for (auto& lane : lanes) members.push_back(std::move(lane.second));
  std::vector<std::vector<int>> per_instance(members.size());
  enumerate_orders(ctx, per_instance, members, 0);
}

void enumerate_assignments(BruteContext& ctx, int idx) {
  if (idx == ctx.n) {
    assignments_done(ctx);
    return;
  }
  const XNodeSpec& node = *ctx.nodes[idx];
  std::vector<XpuType> types;
  for (const auto& impl : node.impls) types.push_back(impl.xpu_type);
  std::sort(types.begin(), types.end());
  for (const XpuType& type : types) {
    auto git = ctx.groups_of_type.find(type);
    if (git == ctx.groups_of_type.end()) continue;
    for (int gi : git->second) {
      // Canonical labeling: a member may be used only if all lower members
      // of the group are used by earlier nodes.
      int first_free = 0;
      for (int prev = 0; prev < idx; ++prev) {
        if (ctx.chosen[prev].first == gi) {
          first_free = std::max(first_free, ctx.chosen[prev].second + 1);
        }
      }
      const int limit =
          std::min<int>(first_free, static_cast<int>(ctx.groups[gi].instances.size()) - 1);
      for (int mi = 0; mi <= limit; ++mi) {
        ctx.chosen[idx] = {gi, mi};
        enumerate_assignments(ctx, idx + 1);
      }
    }
  }
  ctx.chosen[idx] = {-1, -1};
}

}  // namespace

BruteForceResult brute_force(const ApplicationGraph& graph,
                             const PlatformConfig& platform,
                             const BruteForceOptions& options) {
  BruteContext ctx;
  ApplicationGraph g = graph;
  g.normalize();
  PlatformConfig p = platform;
  p.normalize();

  ctx.n = static_cast<int>(g.nodes.size());
  if (ctx.n > options.max_nodes) {
    throw std::invalid_argument("brute_force: graph has " + std::to_string(ctx.n) +
                                " nodes, limit is " + std::to_string(options.max_nodes));
  }
  ctx.graph = &g;
  ctx.platform = &p;
  ctx.options = options;
  ctx.sim_config =
      SimConfig::uniform(p, SchedMode::kFpPreemptive, !options.zero_overheads);

  std::map<std::string, int> index_of;
  for (const auto& node : g.nodes) {
    index_of[node.node_id] = static_cast<int>(ctx.nodes.size());
    ctx.nodes.push_back(&node);
  }
  ctx.reaches.assign(ctx.n, std::vector<bool>(ctx.n, false));
  for (const auto& [from, to] : g.edges) ctx.reaches[index_of[from]][index_of[to]] = true;
  for (const std::string& mid_id : topo_order(g)) {
    const int mid = index_of[mid_id];
    for (int u = 0; u < ctx.n; ++u) {
      if (!ctx.reaches[u][mid]) continue;
      for (int v = 0; v < ctx.n; ++v) {
        if (ctx.reaches[mid][v]) ctx.reaches[u][v] = true;
      }
    }
  }

  // Interchangeable instances: same class and same behavior under the
  // simulation config.
  std::map<std::tuple<XpuType, bool, Micros, Micros>, int> group_index;
  for (const auto& xpu : p.xpus) {
    const Micros po = options.zero_overheads ? 0 : xpu.preempt_overhead;
    const Micros ro = options.zero_overheads ? 0 : xpu.restore_overhead;
    const auto key = std::make_tuple(xpu.xpu_type, xpu.preemptive, po, ro);
    auto it = group_index.find(key);
    if (it == group_index.end()) {
      it = group_index.emplace(key, static_cast<int>(ctx.groups.size())).first;
      ctx.groups.push_back({xpu.xpu_type, {}});
      ctx.groups_of_type[xpu.xpu_type].push_back(it->second);
    }
    ctx.groups[it->second].instances.push_back(&xpu);
  }

  ctx.chosen.assign(ctx.n, {-1, -1});
  enumerate_assignments(ctx, 0);
  if (!ctx.have_best) {
    throw std::invalid_argument("brute_force: no feasible assignment");
  }
  ctx.best.evaluated = ctx.evaluated;
  return ctx.best;
}

}  // namespace xsched
