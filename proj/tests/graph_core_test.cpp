#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "test_util.hpp"
#include "xsched/graph.hpp"
#include "xsched/json_io.hpp"

using namespace xsched;
using namespace xsched::testsupport;

namespace {

XModuleSpec make_module(std::string id, std::vector<std::string> node_ids,
                        std::vector<std::string> inputs,
                        std::vector<std::string> outputs) {
  XModuleSpec module;
  module.module_id = std::move(id);
  module.node_ids = std::move(node_ids);
  module.input_topics = std::move(inputs);
  module.output_topics = std::move(outputs);
  return module;
}

std::vector<XNodeSpec> stage_nodes(const std::vector<std::string>& ids) {
  std::vector<XNodeSpec> nodes;
  for (const auto& id : ids) nodes.push_back(make_node(id, {{"CPU", 1'000}}));
  return nodes;
}

bool has_edge(const ApplicationGraph& graph, const std::string& from,
              const std::string& to) {
  return std::find(graph.edges.begin(), graph.edges.end(), Edge{from, to}) !=
         graph.edges.end();
}

}  // namespace

TEST_CASE("[graph] flatten chains module stages and wires topics") {
  const auto modules = {make_module("A", {"a1", "a2"}, {}, {"t"}),
                        make_module("B", {"b1"}, {"t"}, {})};
  const auto graph = flatten(modules, stage_nodes({"a1", "a2", "b1"}));
  CHECK(graph.nodes.size() == 3);
  REQUIRE(graph.edges.size() == 2);
  CHECK(has_edge(graph, "a1", "a2"));
  CHECK(has_edge(graph, "a2", "b1"));
}

TEST_CASE("[graph] flatten wires a multi-sensor perception pipeline") {
  // Six modules: three detectors fan into tracking, the traffic-light
  // detector feeds a classifier first, tracking feeds prediction. Stage
  // chains inside each module, topic edges last-stage -> first-stage.
  const std::vector<XModuleSpec> modules = {
      make_module("lidar_det", {"ld1", "ld2", "ld3"}, {}, {"lidar_objects"}),
      make_module("cam_det", {"cd1", "cd2", "cd3"}, {}, {"cam_objects"}),
      make_module("tl_det", {"td1", "td2", "td3"}, {}, {"tl_boxes"}),
      make_module("tl_cls", {"tc1", "tc2", "tc3"}, {"tl_boxes"}, {"tl_state"}),
      make_module("tracking", {"tr1", "tr2"},
                  {"lidar_objects", "cam_objects", "tl_state"}, {"tracks"}),
      make_module("prediction", {"pr1"}, {"tracks"}, {}),
  };
  const auto graph = flatten(
      modules, stage_nodes({"ld1", "ld2", "ld3", "cd1", "cd2", "cd3", "td1", "td2",
                            "td3", "tc1", "tc2", "tc3", "tr1", "tr2", "pr1"}));

  CHECK(graph.nodes.size() == 15);
  // 9 intra-module chain edges + 5 topic edges.
  CHECK(graph.edges.size() == 14);
  CHECK(has_edge(graph, "td3", "tc1"));
  CHECK(has_edge(graph, "ld3", "tr1"));
  CHECK(has_edge(graph, "cd3", "tr1"));
  CHECK(has_edge(graph, "tc3", "tr1"));
  CHECK(has_edge(graph, "tr2", "pr1"));
  CHECK_FALSE(has_edge(graph, "td3", "tr1"));

  CHECK(validate(graph).valid());
  const auto order = topo_order(graph);
  CHECK(order.size() == 15);
  CHECK(order.back() == "pr1");
}

TEST_CASE("[graph] flatten rejects broken wiring") {
  SUBCASE("module subscribing to its own output topic") {
    const auto modules = {make_module("A", {"a1"}, {"loop"}, {"loop"})};
    CHECK_THROWS_AS(flatten(modules, stage_nodes({"a1"})), std::invalid_argument);
  }
  SUBCASE("unknown node id") {
    const auto modules = {make_module("A", {"missing"}, {}, {})};
    CHECK_THROWS_AS(flatten(modules, stage_nodes({"a1"})), std::invalid_argument);
  }
  SUBCASE("topic with two publishers") {
    const auto modules = {make_module("A", {"a1"}, {}, {"t"}),
                          make_module("B", {"b1"}, {}, {"t"}),
                          make_module("C", {"c1"}, {"t"}, {})};
    CHECK_THROWS_AS(flatten(modules, stage_nodes({"a1", "b1", "c1"})),
                    std::invalid_argument);
  }
  SUBCASE("cross-module cycle") {
    const auto modules = {make_module("A", {"a1"}, {"u"}, {"t"}),
                          make_module("B", {"b1"}, {"t"}, {"u"})};
    CHECK_THROWS_AS(flatten(modules, stage_nodes({"a1", "b1"})),
                    std::invalid_argument);
  }
}

TEST_CASE("[graph] validate reports structural defects") {
  SUBCASE("single node, no edges") {
    CHECK(validate(make_graph({make_node("a", {{"CPU", 10}})})).valid());
  }
  SUBCASE("two-node cycle") {
    const auto graph =
        make_graph({make_node("a", {{"CPU", 10}}), make_node("b", {{"CPU", 10}})},
                   {{"a", "b"}, {"b", "a"}});
    const auto report = validate(graph);
    CHECK_FALSE(report.valid());
    CHECK(report.to_string().find("cycle") != std::string::npos);
  }
  SUBCASE("empty impl list") {
    const auto report = validate(make_graph({make_node("a", {})}));
    CHECK_FALSE(report.valid());
    CHECK(report.to_string().find("impl") != std::string::npos);
  }
  SUBCASE("dangling edge endpoint") {
    const auto graph =
        make_graph({make_node("a", {{"CPU", 10}})}, {{"a", "ghost"}});
    CHECK_FALSE(validate(graph).valid());
  }
  SUBCASE("non-positive wcet") {
    CHECK_FALSE(validate(make_graph({make_node("a", {{"CPU", 0}})})).valid());
  }
  SUBCASE("duplicate node ids") {
    ApplicationGraph graph;
    graph.nodes = {make_node("a", {{"CPU", 10}}), make_node("a", {{"CPU", 20}})};
    CHECK_FALSE(validate(graph).valid());
  }
  SUBCASE("duplicate impls for one class") {
    CHECK_FALSE(
        validate(make_graph({make_node("a", {{"CPU", 10}, {"CPU", 20}})})).valid());
  }
}

TEST_CASE("[graph] topo_order is deterministic with lexicographic ties") {
  SUBCASE("diamond") {
    const auto graph = make_graph(
        {make_node("a", {{"CPU", 1}}), make_node("b", {{"CPU", 1}}),
         make_node("c", {{"CPU", 1}}), make_node("d", {{"CPU", 1}})},
        {{"a", "b"}, {"a", "c"}, {"b", "d"}, {"c", "d"}});
    CHECK(topo_order(graph) == std::vector<std::string>{"a", "b", "c", "d"});
  }
  SUBCASE("chain") {
    const auto graph = make_graph(
        {make_node("x", {{"CPU", 1}}), make_node("y", {{"CPU", 1}}),
         make_node("z", {{"CPU", 1}})},
        {{"x", "y"}, {"y", "z"}});
    CHECK(topo_order(graph) == std::vector<std::string>{"x", "y", "z"});
  }
  SUBCASE("disconnected nodes come out in id order") {
    const auto graph =
        make_graph({make_node("n", {{"CPU", 1}}), make_node("m", {{"CPU", 1}})});
    CHECK(topo_order(graph) == std::vector<std::string>{"m", "n"});
  }
  SUBCASE("cycle throws") {
    ApplicationGraph graph;
    graph.nodes = {make_node("a", {{"CPU", 1}}), make_node("b", {{"CPU", 1}})};
    graph.edges = {{"a", "b"}, {"b", "a"}};
    CHECK_THROWS_AS(topo_order(graph), std::invalid_argument);
  }
}

TEST_CASE("[graph] topo_order respects every edge") {
  const auto graph = make_graph(
      {make_node("s", {{"CPU", 1}}), make_node("p", {{"CPU", 1}}),
       make_node("q", {{"CPU", 1}}), make_node("r", {{"CPU", 1}}),
       make_node("t", {{"CPU", 1}})},
      {{"s", "p"}, {"s", "q"}, {"p", "r"}, {"q", "r"}, {"r", "t"}, {"s", "t"}});
  const auto order = topo_order(graph);
  REQUIRE(order.size() == graph.nodes.size());
  auto position = [&](const std::string& id) {
    return std::find(order.begin(), order.end(), id) - order.begin();
  };
  for (const auto& [from, to] : graph.edges) {
    CHECK(position(from) < position(to));
  }
}

TEST_CASE("[graph] normalize gives a canonical representation") {
  ApplicationGraph messy;
  messy.nodes = {make_node("b", {{"CPU", 5}}), make_node("a", {{"CPU", 5}})};
  messy.edges = {{"a", "b"}, {"a", "b"}};
  messy.normalize();
  CHECK(messy.nodes[0].node_id == "a");
  CHECK(messy.edges.size() == 1);

  ApplicationGraph other;
  other.nodes = {make_node("a", {{"CPU", 5}}), make_node("b", {{"CPU", 5}})};
  other.edges = {{"a", "b"}};
  other.normalize();
  CHECK(messy == other);
}

TEST_CASE("[graph] graph json round-trips") {
  const auto modules = {make_module("A", {"a1", "a2"}, {}, {"t"}),
                        make_module("B", {"b1"}, {"t"}, {})};
  auto nodes = stage_nodes({"a1", "a2", "b1"});
  nodes[1].impls.push_back({"GPU", 250});
  const auto graph = flatten(modules, nodes);

  const std::string text = graph_to_json(graph);
  const GraphFile parsed = graph_from_json(text);
  CHECK(parsed.graph == graph);
  // Serialization is canonical: a second round trip is byte-identical.
  CHECK(graph_to_json(parsed.graph) == text);
}

TEST_CASE("[graph] platform and deployment json round-trip") {
  const auto platform = make_platform(
      {make_xpu("CPU", 0), make_xpu("GPU", 0, true, 275, 0, 1'000)});
  CHECK(platform_from_json(platform_to_json(platform)) == platform);

  const auto deployment = make_deployment(
      {{"a", "CPU", 0, 2}, {"b", "GPU", 0, 1}}, "ilp");
  CHECK(deployment_from_json(deployment_to_json(deployment)) == deployment);
}
