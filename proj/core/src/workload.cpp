#include "xsched/workload.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <numeric>
#include <stdexcept>

#include "json.hpp"

#include "xsched/json_io.hpp"

namespace xsched {

using nlohmann::json;

namespace {

std::string node_name(int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "n%03d", index);
  return buf;
}

}  // namespace

ApplicationGraph generate_topology(const GenParams& params, Rng& rng) {
  if (params.target_node_count < 1) {
    throw std::invalid_argument("generate_topology: target_node_count must be >= 1");
  }
  if (params.fanout_min < 1 || params.fanout_max < params.fanout_min) {
    throw std::invalid_argument("generate_topology: invalid fanout range");
  }

  ApplicationGraph graph;
  auto add_node = [&graph](int index) {
    XNodeSpec node;
    node.node_id = node_name(index);
    node.module_id = node.node_id;
    graph.nodes.push_back(std::move(node));
  };

  const int target = params.target_node_count;
  int count = 1;
  add_node(0);
  std::deque<int> frontier{0};

  // Frontier expansion. Each popped node becomes a terminal with
  // p_terminal or forks into fanout children, clamped so the graph never
  // exceeds the target. Two refinements keep the realized size exactly on
  // target: the last live frontier node always expands while the budget is
  // not exhausted, and once the budget is reached the remaining frontier
  // nodes become terminals without further draws.
  while (!frontier.empty()) {
    const int parent = frontier.front();
    frontier.pop_front();
    if (count >= target) continue;

    const bool forced = frontier.empty();
    if (!forced && rng.bernoulli(params.p_terminal)) continue;

    const auto raw = rng.uniform_int(static_cast<std::uint64_t>(params.fanout_min),
                                     static_cast<std::uint64_t>(params.fanout_max));
    const int fanout = std::min<int>(static_cast<int>(raw), target - count);

    std::vector<int> children;
    children.reserve(fanout);
    for (int c = 0; c < fanout; ++c) {
      add_node(count);
      graph.edges.emplace_back(node_name(parent), node_name(count));
      children.push_back(count);
      frontier.push_back(count);
      ++count;
    }
    // Extra dependencies between siblings, always oriented from the smaller
    // to the larger id so the graph stays acyclic.
    for (std::size_t a = 0; a + 1 < children.size(); ++a) {
      for (std::size_t b = a + 1; b < children.size(); ++b) {
        if (rng.bernoulli(params.p_sibling_edge)) {
          graph.edges.emplace_back(node_name(children[a]), node_name(children[b]));
        }
      }
    }
  }

  graph.normalize();
  return graph;
}

void assign_impls(ApplicationGraph& graph, const GenParams& params, Rng& rng) {
  for (const auto& node : graph.nodes) {
    if (!node.impls.empty()) {
      throw std::invalid_argument("assign_impls: node '" + node.node_id +
                                  "' already has impls");
    }
  }
  const std::size_t n = graph.nodes.size();

  // Pass 1, in node-id order: the CPU fallback every stage has.
  std::vector<Micros> cpu(n);
  for (std::size_t i = 0; i < n; ++i) {
    cpu[i] = std::llround(rng.uniform_real(static_cast<double>(params.cpu_wcet_min),
                                           static_cast<double>(params.cpu_wcet_max)));
    graph.nodes[i].impls.push_back({"CPU", cpu[i]});
  }

  // Rank by CPU wcet (heaviest first, ties by node id) and mark the top
  // fraction: heavyweight stages are the ones likely to have accelerator
  // kernels.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (cpu[a] != cpu[b]) return cpu[a] > cpu[b];
    return graph.nodes[a].node_id < graph.nodes[b].node_id;
  });
  const auto top_count =
      static_cast<std::size_t>(std::llround(params.top_fraction * static_cast<double>(n)));
  std::vector<bool> is_top(n, false);
  for (std::size_t r = 0; r < std::min(top_count, n); ++r) is_top[order[r]] = true;

  // Pass 2 and 3, in node-id order: accelerator impls. The wcet is the CPU
  // time divided by a drawn speedup, rounded down with a 1 us floor.
  auto accel_pass = [&](const XpuType& type, double prob_top, double prob_bottom,
                        double speedup_min, double speedup_max) {
    for (std::size_t i = 0; i < n; ++i) {
      const double prob = is_top[i] ? prob_top : prob_bottom;
      if (!rng.bernoulli(prob)) continue;
      const double speedup = rng.uniform_real(speedup_min, speedup_max);
      const auto wcet = static_cast<Micros>(
          std::floor(static_cast<double>(cpu[i]) / speedup));
      graph.nodes[i].impls.push_back({type, std::max<Micros>(1, wcet)});
    }
  };
  accel_pass("GPU", params.gpu_prob_top, params.gpu_prob_bottom,
             params.gpu_speedup_min, params.gpu_speedup_max);
  accel_pass("DLA", params.dla_prob_top, params.dla_prob_bottom,
             params.dla_speedup_min, params.dla_speedup_max);
}

ApplicationGraph generate_graph(const GenParams& params, std::uint64_t seed) {
  Rng rng(seed);
  ApplicationGraph graph = generate_topology(params, rng);
  assign_impls(graph, params, rng);
  return graph;
}

WorkloadSuite generate_suite(const SuiteSpec& spec) {
  WorkloadSuite suite;
  suite.spec = spec;
  for (std::size_t gi = 0; gi < spec.group_sizes.size(); ++gi) {
    for (int idx = 0; idx < spec.per_group; ++idx) {
      SuiteEntry entry;
      entry.group_index = static_cast<int>(gi);
      entry.graph_index = idx;
      entry.seed = spec.base_seed +
                   static_cast<std::uint64_t>(gi) * static_cast<std::uint64_t>(spec.per_group) +
                   static_cast<std::uint64_t>(idx);
      GenParams params = spec.params;
      params.target_node_count = spec.group_sizes[gi];
      entry.graph = generate_graph(params, entry.seed);
      char buf[48];
      std::snprintf(buf, sizeof(buf), "dag_%03d_%03d.json", spec.group_sizes[gi], idx);
      entry.file = buf;
      suite.entries.push_back(std::move(entry));
    }
  }
  return suite;
}

namespace {

json params_to_json(const GenParams& p) {
  return json{{"target_node_count", p.target_node_count},
              {"p_terminal", p.p_terminal},
              {"p_sibling_edge", p.p_sibling_edge},
              {"fanout_min", p.fanout_min},
              {"fanout_max", p.fanout_max},
              {"cpu_wcet_min", p.cpu_wcet_min},
              {"cpu_wcet_max", p.cpu_wcet_max},
              {"top_fraction", p.top_fraction},
              {"gpu_prob_top", p.gpu_prob_top},
              {"gpu_prob_bottom", p.gpu_prob_bottom},
              {"gpu_speedup_min", p.gpu_speedup_min},
              {"gpu_speedup_max", p.gpu_speedup_max},
              {"dla_prob_top", p.dla_prob_top},
              {"dla_prob_bottom", p.dla_prob_bottom},
              {"dla_speedup_min", p.dla_speedup_min},
              {"dla_speedup_max", p.dla_speedup_max}};
}

GenParams params_from_json(const json& j) {
  GenParams p;
  p.target_node_count = j.value("target_node_count", p.target_node_count);
  p.p_terminal = j.value("p_terminal", p.p_terminal);
  p.p_sibling_edge = j.value("p_sibling_edge", p.p_sibling_edge);
  p.fanout_min = j.value("fanout_min", p.fanout_min);
  p.fanout_max = j.value("fanout_max", p.fanout_max);
  p.cpu_wcet_min = j.value("cpu_wcet_min", p.cpu_wcet_min);
  p.cpu_wcet_max = j.value("cpu_wcet_max", p.cpu_wcet_max);
  p.top_fraction = j.value("top_fraction", p.top_fraction);
  p.gpu_prob_top = j.value("gpu_prob_top", p.gpu_prob_top);
  p.gpu_prob_bottom = j.value("gpu_prob_bottom", p.gpu_prob_bottom);
  p.gpu_speedup_min = j.value("gpu_speedup_min", p.gpu_speedup_min);
  p.gpu_speedup_max = j.value("gpu_speedup_max", p.gpu_speedup_max);
  p.dla_prob_top = j.value("dla_prob_top", p.dla_prob_top);
  p.dla_prob_bottom = j.value("dla_prob_bottom", p.dla_prob_bottom);
  p.dla_speedup_min = j.value("dla_speedup_min", p.dla_speedup_min);
  p.dla_speedup_max = j.value("dla_speedup_max", p.dla_speedup_max);
  return p;
}

}  // namespace

void write_suite(const WorkloadSuite& suite, const std::filesystem::path& dir,
                 const std::map<std::string, std::string>& flags, bool force) {
  const auto manifest_path = dir / "suite.json";
  if (std::filesystem::exists(manifest_path) && !force) {
    throw std::runtime_error("suite already exists at '" + dir.string() +
                             "' (use force to overwrite)");
  }
  std::filesystem::create_directories(dir);

  json manifest;
  manifest["base_seed"] = suite.spec.base_seed;
  manifest["per_group"] = suite.spec.per_group;
  manifest["params"] = params_to_json(suite.spec.params);
  if (!flags.empty()) manifest["flags"] = flags;
  manifest["groups"] = json::array();
  for (std::size_t gi = 0; gi < suite.spec.group_sizes.size(); ++gi) {
    json group;
    group["group_index"] = gi;
    group["target_node_count"] = suite.spec.group_sizes[gi];
    group["graphs"] = json::array();
    manifest["groups"].push_back(std::move(group));
  }
  for (const auto& entry : suite.entries) {
    save_graph(entry.graph, dir / entry.file);
    manifest["groups"][entry.group_index]["graphs"].push_back(
        {{"file", entry.file},
         {"seed", entry.seed},
         {"node_count", entry.graph.nodes.size()}});
  }
  write_text_file(manifest_path, manifest.dump(2) + "\n");
}

WorkloadSuite load_suite(const std::filesystem::path& dir) {
  json manifest = json::parse(read_text_file(dir / "suite.json"));
  WorkloadSuite suite;
  suite.spec.base_seed = manifest.at("base_seed").get<std::uint64_t>();
  suite.spec.per_group = manifest.at("per_group").get<int>();
  suite.spec.params = params_from_json(manifest.at("params"));
  for (const auto& jg : manifest.at("groups")) {
    suite.spec.group_sizes.push_back(jg.at("target_node_count").get<int>());
    int idx = 0;
    for (const auto& jgraph : jg.at("graphs")) {
      SuiteEntry entry;
      entry.group_index = jg.at("group_index").get<int>();
      entry.graph_index = idx++;
      entry.seed = jgraph.at("seed").get<std::uint64_t>();
      entry.file = jgraph.at("file").get<std::string>();
      entry.graph = load_graph(dir / entry.file);
      suite.entries.push_back(std::move(entry));
    }
  }
  return suite;
}

}  // namespace xsched
