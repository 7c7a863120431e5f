#include "xsched/json_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace xsched {

using nlohmann::json;

namespace {

json graph_json(const ApplicationGraph& graph,
                const std::vector<XModuleSpec>& modules,
                const std::vector<std::string>& topics) {
  json j;
  j["modules"] = json::array();
  for (const auto& mod : modules) {
    j["modules"].push_back({{"module_id", mod.module_id},
                            {"node_ids", mod.node_ids},
                            {"input_topics", mod.input_topics},
                            {"output_topics", mod.output_topics}});
  }
  j["topics"] = topics;
  j["nodes"] = json::array();
  for (const auto& node : graph.nodes) {
    json impls = json::array();
    for (const auto& impl : node.impls) {
      impls.push_back({{"xpu_type", impl.xpu_type}, {"wcet", impl.wcet}});
    }
    j["nodes"].push_back({{"node_id", node.node_id},
                          {"module_id", node.module_id},
                          {"impls", std::move(impls)}});
  }
  j["edges"] = json::array();
  for (const auto& [from, to] : graph.edges) {
    j["edges"].push_back(json::array({from, to}));
  }
  return j;
}

json parse(const std::string& text, const char* what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    throw std::invalid_argument(std::string("invalid JSON in ") + what);
  }
  return j;
}

}  // namespace

std::string graph_to_json(const ApplicationGraph& graph,
                          const std::vector<XModuleSpec>& modules,
                          const std::vector<std::string>& topics) {
  return graph_json(graph, modules, topics).dump(2) + "\n";
}

GraphFile graph_from_json(const std::string& text) {
  json j = parse(text, "graph");
  GraphFile file;

  for (const auto& jm : j.value("modules", json::array())) {
    XModuleSpec mod;
    mod.module_id = jm.at("module_id").get<std::string>();
    mod.node_ids = jm.value("node_ids", std::vector<std::string>{});
    mod.input_topics = jm.value("input_topics", std::vector<std::string>{});
    mod.output_topics = jm.value("output_topics", std::vector<std::string>{});
    file.modules.push_back(std::move(mod));
  }
  file.topics = j.value("topics", std::vector<std::string>{});

  std::vector<XNodeSpec> nodes;
  for (const auto& jn : j.at("nodes")) {
    XNodeSpec node;
    node.node_id = jn.at("node_id").get<std::string>();
    node.module_id = jn.value("module_id", std::string{});
    for (const auto& ji : jn.value("impls", json::array())) {
      node.impls.push_back(
          {ji.at("xpu_type").get<std::string>(), ji.at("wcet").get<Micros>()});
    }
    nodes.push_back(std::move(node));
  }

  if (j.contains("edges")) {
    file.graph.nodes = std::move(nodes);
    for (const auto& je : j.at("edges")) {
      file.graph.edges.emplace_back(je.at(0).get<std::string>(),
                                    je.at(1).get<std::string>());
    }
    file.graph.normalize();
  } else {
    file.graph = flatten(file.modules, nodes);
  }
  return file;
}

void save_graph(const ApplicationGraph& graph, const std::filesystem::path& path,
                const std::vector<XModuleSpec>& modules,
                const std::vector<std::string>& topics) {
  write_text_file(path, graph_to_json(graph, modules, topics));
}

GraphFile load_graph_file(const std::filesystem::path& path) {
  return graph_from_json(read_text_file(path));
}

ApplicationGraph load_graph(const std::filesystem::path& path) {
  return load_graph_file(path).graph;
}

std::string platform_to_json(const PlatformConfig& platform) {
  json j;
  j["xpus"] = json::array();
  for (const auto& xpu : platform.xpus) {
    j["xpus"].push_back({{"xpu_type", xpu.xpu_type},
                         {"instance_id", xpu.instance_id},
                         {"preemptive", xpu.preemptive},
                         {"preempt_overhead", xpu.preempt_overhead},
                         {"restore_overhead", xpu.restore_overhead},
                         {"rr_quantum", xpu.rr_quantum}});
  }
  return j.dump(2) + "\n";
}

PlatformConfig platform_from_json(const std::string& text) {
  json j = parse(text, "platform");
  PlatformConfig platform;
  for (const auto& jx : j.at("xpus")) {
    XpuInstance xpu;
    xpu.xpu_type = jx.at("xpu_type").get<std::string>();
    xpu.instance_id = jx.value("instance_id", 0);
    xpu.preemptive = jx.value("preemptive", true);
    xpu.preempt_overhead = jx.value("preempt_overhead", Micros{0});
    xpu.restore_overhead = jx.value("restore_overhead", Micros{0});
    xpu.rr_quantum = jx.value("rr_quantum", Micros{0});
    platform.xpus.push_back(std::move(xpu));
  }
  platform.normalize();
  return platform;
}

void save_platform(const PlatformConfig& platform, const std::filesystem::path& path) {
  write_text_file(path, platform_to_json(platform));
}

PlatformConfig load_platform(const std::filesystem::path& path) {
  return platform_from_json(read_text_file(path));
}

std::string deployment_to_json(const DeploymentConfig& deployment,
                               const FlagMap& flags) {
  json j;
  j["policy"] = deployment.policy;
  j["assignments"] = json::array();
  for (const auto& a : deployment.assignments) {
    j["assignments"].push_back({{"node_id", a.node_id},
                                {"xpu_type", a.xpu_type},
                                {"instance_id", a.instance_id},
                                {"priority", a.priority}});
  }
  if (!flags.empty()) j["flags"] = flags;
  return j.dump(2) + "\n";
}

DeploymentConfig deployment_from_json(const std::string& text) {
  json j = parse(text, "deployment");
  DeploymentConfig deployment;
  deployment.policy = j.value("policy", std::string{});
  for (const auto& ja : j.at("assignments")) {
    NodeAssignment a;
    a.node_id = ja.at("node_id").get<std::string>();
    a.xpu_type = ja.at("xpu_type").get<std::string>();
    a.instance_id = ja.value("instance_id", 0);
    a.priority = ja.at("priority").get<int>();
    deployment.assignments.push_back(std::move(a));
  }
  deployment.normalize();
  return deployment;
}

void save_deployment(const DeploymentConfig& deployment,
                     const std::filesystem::path& path, const FlagMap& flags) {
  write_text_file(path, deployment_to_json(deployment, flags));
}

DeploymentConfig load_deployment(const std::filesystem::path& path) {
  return deployment_from_json(read_text_file(path));
}

std::string timetable_to_json(const ScheduleTimetable& timetable,
                              const FlagMap& flags) {
  json j;
  j["makespan"] = timetable.makespan;
  json opt;
  opt["status"] = timetable.optimality.to_string();
  if (timetable.optimality.status == OptimalityStatus::kGap) {
    opt["gap"] = timetable.optimality.gap;
  }
  j["optimality"] = std::move(opt);
  j["entries"] = json::array();
  for (const auto& e : timetable.entries) {
    j["entries"].push_back({{"node_id", e.node_id},
                            {"start", e.start},
                            {"finish", e.finish},
                            {"xpu_type", e.xpu_type},
                            {"instance_id", e.instance_id}});
  }
  if (!flags.empty()) j["flags"] = flags;
  return j.dump(2) + "\n";
}

ScheduleTimetable timetable_from_json(const std::string& text) {
  json j = parse(text, "timetable");
  ScheduleTimetable t;
  t.makespan = j.at("makespan").get<Micros>();
  const std::string status = j.at("optimality").at("status").get<std::string>();
  if (status == "proven-optimal") {
    t.optimality.status = OptimalityStatus::kProvenOptimal;
  } else if (status == "gap") {
    t.optimality.status = OptimalityStatus::kGap;
    t.optimality.gap = j.at("optimality").value("gap", 0.0);
  } else if (status == "heuristic-feasible") {
    t.optimality.status = OptimalityStatus::kHeuristicFeasible;
  } else {
    throw std::invalid_argument("unknown optimality status '" + status + "'");
  }
  for (const auto& je : j.at("entries")) {
    TimetableEntry e;
    e.node_id = je.at("node_id").get<std::string>();
    e.start = je.at("start").get<Micros>();
    e.finish = je.at("finish").get<Micros>();
    e.xpu_type = je.at("xpu_type").get<std::string>();
    e.instance_id = je.value("instance_id", 0);
    t.entries.push_back(std::move(e));
  }
  t.normalize();
  return t;
}

void save_timetable(const ScheduleTimetable& timetable,
                    const std::filesystem::path& path, const FlagMap& flags) {
  write_text_file(path, timetable_to_json(timetable, flags));
}

ScheduleTimetable load_timetable(const std::filesystem::path& path) {
  return timetable_from_json(read_text_file(path));
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace xsched
