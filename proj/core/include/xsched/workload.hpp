#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "xsched/graph.hpp"
#include "xsched/rng.hpp"

namespace xsched {

// Knobs of the synthetic multi-sensor workload generator. Defaults encode
// the benchmark's reference distribution: wide fork-join DAGs whose
// heavyweight stages usually have accelerator implementations with a
// healthy speedup over the CPU fallback.
struct GenParams {
  int target_node_count = 25;

  // Topology: each expanded node becomes a terminal with p_terminal, else
  // forks into uniform{fanout_min..fanout_max} children; extra edges are
  // added between siblings with p_sibling_edge.
  double p_terminal = 0.4;
  double p_sibling_edge = 0.1;
  int fanout_min = 2;
  int fanout_max = 4;

  // Every node gets a CPU impl with wcet ~ Uniform(cpu_wcet_min, cpu_wcet_max).
  Micros cpu_wcet_min = 5'000;
  Micros cpu_wcet_max = 95'000;

  // Nodes ranked by CPU wcet; the heaviest top_fraction receive accelerator
  // impls with the *_prob_top probabilities, the rest with *_prob_bottom.
  // Accelerator wcet = cpu wcet / Uniform(speedup range), floored to whole
  // microseconds with a 1 us minimum.
  double top_fraction = 0.6;
  double gpu_prob_top = 1.0;
  double gpu_prob_bottom = 0.5;
  double gpu_speedup_min = 3.0;
  double gpu_speedup_max = 8.0;
  double dla_prob_top = 0.8;
  double dla_prob_bottom = 0.3;
  double dla_speedup_min = 2.0;
  double dla_speedup_max = 5.0;
};

// Builds the DAG structure only; every node has an empty impl list.
// Node ids are zero-padded ("n000", "n001", ...) in creation order, so the
// id order is also a topological order.
ApplicationGraph generate_topology(const GenParams& params, Rng& rng);

// Adds CPU/GPU/DLA impls to a bare topology. Throws std::invalid_argument
// if any node already has impls.
void assign_impls(ApplicationGraph& graph, const GenParams& params, Rng& rng);

// generate_topology + assign_impls with a fresh Rng.
ApplicationGraph generate_graph(const GenParams& params, std::uint64_t seed);

// A suite is a list of size groups, per_group DAGs each. The DAG with
// (group_index, graph_index) is generated with seed
//   base_seed + group_index * per_group + graph_index,
// so any single DAG can be regenerated in isolation.
struct SuiteSpec {
  std::vector<int> group_sizes;
  int per_group = 50;
  std::uint64_t base_seed = 42;
  GenParams params;  // target_node_count is overridden per group
};

struct SuiteEntry {
  int group_index = 0;
  int graph_index = 0;
  std::uint64_t seed = 0;
  std::string file;  // relative file name inside the suite directory
  ApplicationGraph graph;
};

struct WorkloadSuite {
  SuiteSpec spec;
  std::vector<SuiteEntry> entries;
};

WorkloadSuite generate_suite(const SuiteSpec& spec);

// Writes one graph JSON per DAG plus a suite.json manifest (groups, seeds,
// parameters, and the caller's flag map echoed verbatim). Refuses to write
// into a directory that already contains a suite unless force is set.
void write_suite(const WorkloadSuite& suite, const std::filesystem::path& dir,
                 const std::map<std::string, std::string>& flags, bool force);

// Reads a manifest + graphs written by write_suite.
WorkloadSuite load_suite(const std::filesystem::path& dir);

}  // namespace xsched
