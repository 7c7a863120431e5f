#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "xsched/deployment.hpp"
#include "xsched/graph.hpp"
#include "xsched/platform.hpp"
#include "xsched/timetable.hpp"

namespace xsched {

// Flat string map echoed into output manifests ("flags": the exact options
// a tool was invoked with). Keys serialize in sorted order.
using FlagMap = std::map<std::string, std::string>;

// Graph files carry top-level keys "modules", "nodes", "topics" and
// (optionally) "edges". When "edges" is present it is the flattened DAG;
// otherwise the loader flattens the module wiring. All wcets are integer
// microseconds.
struct GraphFile {
  std::vector<XModuleSpec> modules;
  std::vector<std::string> topics;
  ApplicationGraph graph;
};

std::string graph_to_json(const ApplicationGraph& graph,
                          const std::vector<XModuleSpec>& modules = {},
                          const std::vector<std::string>& topics = {});
GraphFile graph_from_json(const std::string& text);
void save_graph(const ApplicationGraph& graph, const std::filesystem::path& path,
                const std::vector<XModuleSpec>& modules = {},
                const std::vector<std::string>& topics = {});
GraphFile load_graph_file(const std::filesystem::path& path);
ApplicationGraph load_graph(const std::filesystem::path& path);

std::string platform_to_json(const PlatformConfig& platform);
PlatformConfig platform_from_json(const std::string& text);
void save_platform(const PlatformConfig& platform, const std::filesystem::path& path);
PlatformConfig load_platform(const std::filesystem::path& path);

std::string deployment_to_json(const DeploymentConfig& deployment,
                               const FlagMap& flags = {});
DeploymentConfig deployment_from_json(const std::string& text);
void save_deployment(const DeploymentConfig& deployment,
                     const std::filesystem::path& path, const FlagMap& flags = {});
DeploymentConfig load_deployment(const std::filesystem::path& path);

std::string timetable_to_json(const ScheduleTimetable& timetable,
                              const FlagMap& flags = {});
ScheduleTimetable timetable_from_json(const std::string& text);
void save_timetable(const ScheduleTimetable& timetable,
                    const std::filesystem::path& path, const FlagMap& flags = {});
ScheduleTimetable load_timetable(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace xsched
