#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "micro_cases.hpp"
#include "test_util.hpp"
#include "ticksim.hpp"
#include "xsched/simulator.hpp"

using namespace xsched;
using namespace xsched::testsupport;

namespace {

// Three CPU-only 10 ms stages in a row on one CPU.
ApplicationGraph chain3() {
  return make_graph({make_node("x", {{"CPU", 10'000}}),
                     make_node("y", {{"CPU", 10'000}}),
                     make_node("z", {{"CPU", 10'000}})},
                    {{"x", "y"}, {"y", "z"}});
}

DeploymentConfig chain3_deployment() {
  return make_deployment({{"x", "CPU", 0, 3}, {"y", "CPU", 0, 2}, {"z", "CPU", 0, 1}});
}

// Two independent GPU tasks released together: "low" 10 ms, "high" 2 ms.
ApplicationGraph two_gpu_tasks() {
  return make_graph({make_node("high", {{"GPU", 2'000}}),
                     make_node("low", {{"GPU", 10'000}})});
}

DeploymentConfig two_gpu_deployment() {
  return make_deployment({{"high", "GPU", 0, 10}, {"low", "GPU", 0, 1}});
}

// "low" starts at 0 on the GPU; "high" becomes ready at 3 ms via a CPU
// predecessor, forcing a genuine mid-run preemption.
struct PreemptionScenario {
  ApplicationGraph graph = make_graph({make_node("feed", {{"CPU", 3'000}}),
                                       make_node("high", {{"GPU", 2'000}}),
                                       make_node("low", {{"GPU", 10'000}})},
                                      {{"feed", "high"}});
  DeploymentConfig deployment = make_deployment(
      {{"feed", "CPU", 0, 5}, {"high", "GPU", 0, 10}, {"low", "GPU", 0, 1}});

  PlatformConfig platform(Micros po, Micros ro) {
    return make_platform({make_xpu("CPU", 0), make_xpu("GPU", 0, true, po, ro)});
  }
};

int count_segments(const SimulationTrace& trace, const std::string& node,
                   SegmentKind kind) {
  int count = 0;
  for (const auto& seg : trace.segments) {
    if (seg.node_id == node && seg.kind == kind) count++;
  }
  return count;
}

}  // namespace

TEST_CASE("[sim] chain on one cpu takes the sum of its stages in every mode") {
  const auto graph = chain3();
  const auto platform = make_platform({make_xpu("CPU", 0)});
  const auto deployment = chain3_deployment();
  for (SchedMode mode : {SchedMode::kFpPreemptive, SchedMode::kFpNonPreemptive,
                         SchedMode::kRoundRobin}) {
    const auto trace =
        simulate(graph, platform, deployment, SimConfig::uniform(platform, mode));
    CHECK(trace.makespan == 30'000);
    CHECK(trace.finish.at("x") == 10'000);
    CHECK(trace.finish.at("y") == 20'000);
    CHECK(trace.finish.at("z") == 30'000);
    CHECK(trace.release.at("y") == 10'000);
    CHECK(check_trace(trace, graph, platform, deployment,
                      SimConfig::uniform(platform, mode))
              .ok());
  }
}

TEST_CASE("[sim] fixed priority runs the urgent task first") {
  const auto graph = two_gpu_tasks();
  const auto platform = one_gpu();
  const auto trace = simulate(graph, platform, two_gpu_deployment(),
                              SimConfig::uniform(platform, SchedMode::kFpPreemptive));
  CHECK(trace.finish.at("high") == 2'000);
  CHECK(trace.finish.at("low") == 12'000);
  CHECK(trace.makespan == 12'000);
  // Both were ready at t = 0, so this is pure dispatch order, no preemption.
  CHECK(trace.preemptions.at("GPU0") == 0);
}

TEST_CASE("[sim] round robin interleaves in fixed slices") {
  const auto graph = make_graph({make_node("a", {{"GPU", 10'000}}),
                                 make_node("b", {{"GPU", 2'000}})});
  const auto deployment = make_deployment({{"a", "GPU", 0, 1}, {"b", "GPU", 0, 2}});
  const auto platform = one_gpu(0, 0, 1'000);
  const auto trace = simulate(graph, platform, deployment,
                              SimConfig::uniform(platform, SchedMode::kRoundRobin));
  CHECK(trace.finish.at("b") == 4'000);
  CHECK(trace.finish.at("a") == 12'000);
  // a's tail slices [4000, 12000) are back to back, so they merge into one
  // segment: a[0,1000) b[1000,2000) a[2000,3000) b[3000,4000) a[4000,12000).
  REQUIRE(trace.segments.size() == 5);
  CHECK(trace.segments[4].node_id == "a");
  CHECK(trace.segments[4].start == 4'000);
  CHECK(trace.segments[4].end == 12'000);

  // The same pair under preemptive priorities finishes the short task at
  // 2 ms instead of 4 ms; that gap is the whole point of priority dispatch.
  const auto fp = simulate(graph, platform, make_deployment({{"a", "GPU", 0, 1},
                                                             {"b", "GPU", 0, 2}}),
                           SimConfig::uniform(platform, SchedMode::kFpPreemptive));
  CHECK(fp.finish.at("b") < trace.finish.at("b"));
}

TEST_CASE("[sim] round robin joins waiters at the slice boundary in release order") {
  // a and b cycle on the GPU from t = 0; c arrives at t = 500 via a CPU
  // predecessor. At the first boundary (t = 1000) the expired slice (a)
  // re-enters behind the newcomer: cycle becomes b, c, a.
  const auto graph = make_graph({make_node("a", {{"GPU", 3'000}}),
                                 make_node("b", {{"GPU", 3'000}}),
                                 make_node("c", {{"GPU", 1'000}}),
                                 make_node("feed", {{"CPU", 500}})},
                                {{"feed", "c"}});
  const auto deployment = make_deployment({{"a", "GPU", 0, 1},
                                           {"b", "GPU", 0, 2},
                                           {"c", "GPU", 0, 3},
                                           {"feed", "CPU", 0, 4}});
  const auto platform = make_platform({make_xpu("CPU", 0), make_xpu("GPU", 0)});
  const auto trace = simulate(graph, platform, deployment,
                              SimConfig::uniform(platform, SchedMode::kRoundRobin));
  std::vector<std::string> gpu_order;
  for (const auto& seg : trace.segments) {
    if (seg.xpu_type == "GPU") gpu_order.push_back(seg.node_id);
  }
  REQUIRE(gpu_order.size() >= 3);
  CHECK(gpu_order[0] == "a");
  CHECK(gpu_order[1] == "b");
  CHECK(gpu_order[2] == "c");
  CHECK(trace.finish.at("c") == 3'000);
}

TEST_CASE("[sim] an idle round robin instance dispatches new work immediately") {
  const auto graph = make_graph({make_node("feed", {{"CPU", 700}}),
                                 make_node("only", {{"GPU", 1'000}})},
                                {{"feed", "only"}});
  const auto deployment =
      make_deployment({{"feed", "CPU", 0, 2}, {"only", "GPU", 0, 1}});
  const auto platform = make_platform({make_xpu("CPU", 0), make_xpu("GPU", 0)});
  const auto trace = simulate(graph, platform, deployment,
                              SimConfig::uniform(platform, SchedMode::kRoundRobin));
  CHECK(trace.release.at("only") == 700);
  CHECK(trace.finish.at("only") == 1'700);
}

TEST_CASE("[sim] preemption suspends the running task until the urgent one is done") {
  PreemptionScenario s;
  const auto platform = s.platform(0, 0);
  const auto trace = simulate(s.graph, platform, s.deployment,
                              SimConfig::uniform(platform, SchedMode::kFpPreemptive));
  CHECK(trace.finish.at("high") == 5'000);
  CHECK(trace.finish.at("low") == 12'000);
  CHECK(trace.preemptions.at("GPU0") == 1);
  CHECK(count_segments(trace, "low", SegmentKind::kRun) == 2);
}

TEST_CASE("[sim] preempt overhead delays the victim by exactly its cost") {
  PreemptionScenario s;
  const auto base = simulate(s.graph, s.platform(0, 0), s.deployment,
                             SimConfig::uniform(s.platform(0, 0),
                                                SchedMode::kFpPreemptive));

  const auto po_platform = s.platform(275, 0);
  const auto po = simulate(
      s.graph, po_platform, s.deployment,
      SimConfig::uniform(po_platform, SchedMode::kFpPreemptive, true));
  CHECK(po.finish.at("low") == base.finish.at("low") + 275);
  CHECK(count_segments(po, "low", SegmentKind::kPreemptOverhead) == 1);
  CHECK(count_segments(po, "low", SegmentKind::kRestoreOverhead) == 0);

  const auto both_platform = s.platform(275, 275);
  const auto both = simulate(
      s.graph, both_platform, s.deployment,
      SimConfig::uniform(both_platform, SchedMode::kFpPreemptive, true));
  CHECK(both.finish.at("low") == base.finish.at("low") + 550);
  CHECK(count_segments(both, "low", SegmentKind::kRestoreOverhead) == 1);

  // Overheads configured but disabled in the run config change nothing.
  const auto off = simulate(s.graph, both_platform, s.deployment,
                            SimConfig::uniform(both_platform,
                                               SchedMode::kFpPreemptive, false));
  CHECK(off == base);
}

TEST_CASE("[sim] a restore interrupted by an urgent arrival is paid again") {
  // l runs, m preempts it and finishes, l's restore starts at 3000; h lands
  // at 3050, inside the restore window, and takes the instance when the
  // restore completes. Bringing l back later costs a second restore.
  const auto graph = make_graph({make_node("h", {{"GPU", 500}}),
                                 make_node("l", {{"GPU", 10'000}}),
                                 make_node("m", {{"GPU", 1'000}}),
                                 make_node("p1", {{"CPU", 2'000}}),
                                 make_node("p2", {{"CPU", 3'050}})},
                                {{"p1", "m"}, {"p2", "h"}});
  const auto deployment = make_deployment({{"h", "GPU", 0, 9},
                                           {"l", "GPU", 0, 1},
                                           {"m", "GPU", 0, 5},
                                           {"p1", "CPU", 0, 2},
                                           {"p2", "CPU", 1, 3}});
  const auto platform = make_platform(
      {make_xpu("CPU", 0), make_xpu("CPU", 1), make_xpu("GPU", 0, true, 0, 100)});
  const auto config =
      SimConfig::uniform(platform, SchedMode::kFpPreemptive, true);
  const auto trace = simulate(graph, platform, deployment, config);
  CHECK(count_segments(trace, "l", SegmentKind::kRestoreOverhead) == 2);
  CHECK(trace.finish.at("h") == 3'600);
  CHECK(trace.finish.at("l") == 11'700);
  CHECK(check_trace(trace, graph, platform, deployment, config).ok());
}

TEST_CASE("[sim] non-preemptive dispatch lets the running task finish") {
  PreemptionScenario s;
  const auto platform = s.platform(0, 0);
  const auto trace = simulate(
      s.graph, platform, s.deployment,
      SimConfig::uniform(platform, SchedMode::kFpNonPreemptive));
  CHECK(trace.finish.at("low") == 10'000);
  CHECK(trace.finish.at("high") == 12'000);
  CHECK(trace.preemptions.at("GPU0") == 0);

  // A non-preemptible instance forces the same downgrade in preemptive mode.
  const auto locked = make_platform(
      {make_xpu("CPU", 0), make_xpu("GPU", 0, /*preemptive=*/false)});
  const auto downgraded = simulate(
      s.graph, locked, s.deployment,
      SimConfig::uniform(locked, SchedMode::kFpPreemptive));
  CHECK(downgraded.finish.at("low") == 10'000);
  CHECK(downgraded.finish.at("high") == 12'000);
}

TEST_CASE("[sim] simulate rejects broken inputs") {
  const auto graph = two_gpu_tasks();
  const auto platform = one_gpu();

  // Unknown instance.
  CHECK_THROWS_AS(simulate(graph, platform,
                           make_deployment({{"high", "GPU", 3, 2}, {"low", "GPU", 0, 1}}),
                           SimConfig::uniform(platform, SchedMode::kFpPreemptive)),
                  std::invalid_argument);
  // Unsupported type for the node.
  CHECK_THROWS_AS(simulate(graph, platform,
                           make_deployment({{"high", "CPU", 0, 2}, {"low", "GPU", 0, 1}}),
                           SimConfig::uniform(platform, SchedMode::kFpPreemptive)),
                  std::invalid_argument);
  // Missing mode for a platform type.
  SimConfig incomplete;
  CHECK_THROWS_AS(simulate(graph, platform, two_gpu_deployment(), incomplete),
                  std::invalid_argument);
  // Round robin without a quantum.
  const auto no_quantum = make_platform({make_xpu("GPU", 0, true, 0, 0, 0)});
  CHECK_THROWS_AS(simulate(graph, no_quantum, two_gpu_deployment(),
                           SimConfig::uniform(no_quantum, SchedMode::kRoundRobin)),
                  std::invalid_argument);
}

TEST_CASE("[sim] check_trace flags tampered traces") {
  const auto graph = two_gpu_tasks();
  const auto platform = one_gpu();
  const auto deployment = two_gpu_deployment();
  const auto config = SimConfig::uniform(platform, SchedMode::kFpPreemptive);
  const auto good = simulate(graph, platform, deployment, config);
  REQUIRE(check_trace(good, graph, platform, deployment, config).ok());

  SUBCASE("run time shorter than the wcet") {
    auto bad = good;
    bad.segments[0].end -= 1;
    const auto report = check_trace(bad, graph, platform, deployment, config);
    CHECK_FALSE(report.ok());
    CHECK(report.to_string().find("wcet") != std::string::npos);
  }
  SUBCASE("overlapping segments on one instance") {
    auto bad = good;
    bad.segments[1].start -= 500;
    bad.segments[1].end -= 500;
    const auto report = check_trace(bad, graph, platform, deployment, config);
    CHECK_FALSE(report.ok());
    CHECK(report.to_string().find("overlap") != std::string::npos);
  }
  SUBCASE("lower priority task hogging the instance") {
    auto bad = good;
    for (auto& seg : bad.segments) {
      if (seg.node_id == "low") {
        seg.start = 0;
        seg.end = 10'000;
      } else {
        seg.start = 10'000;
        seg.end = 12'000;
      }
    }
    bad.finish["low"] = 10'000;
    bad.finish["high"] = 12'000;
    const auto report = check_trace(bad, graph, platform, deployment, config);
    CHECK_FALSE(report.ok());
    CHECK(report.to_string().find("higher-priority") != std::string::npos);
  }
  SUBCASE("overhead segments with overheads disabled") {
    auto bad = good;
    bad.segments.push_back(
        {"low", "GPU", 0, 20'000, 20'100, SegmentKind::kPreemptOverhead});
    const auto report = check_trace(bad, graph, platform, deployment, config);
    CHECK_FALSE(report.ok());
    CHECK(report.to_string().find("overhead") != std::string::npos);
  }
  SUBCASE("precedence broken by an early start") {
    PreemptionScenario s;
    const auto p = s.platform(0, 0);
    const auto cfg = SimConfig::uniform(p, SchedMode::kFpPreemptive);
    auto bad = simulate(s.graph, p, s.deployment, cfg);
    for (auto& seg : bad.segments) {
      if (seg.node_id == "high") {
        seg.start -= 1'000;
        seg.end -= 1'000;
      }
    }
    const auto report = check_trace(bad, s.graph, p, s.deployment, cfg);
    CHECK_FALSE(report.ok());
    CHECK(report.to_string().find("predecessor") != std::string::npos);
  }
}

TEST_CASE("[sim] identical inputs give identical traces") {
  PreemptionScenario s;
  const auto platform = s.platform(275, 132);
  const auto config = SimConfig::uniform(platform, SchedMode::kFpPreemptive, true);
  const auto a = simulate(s.graph, platform, s.deployment, config);
  const auto b = simulate(s.graph, platform, s.deployment, config);
  CHECK(a == b);
  CHECK(trace_to_jsonl(a) == trace_to_jsonl(b));
}

TEST_CASE("[sim] trace serialization is one object per segment") {
  const auto graph = chain3();
  const auto platform = make_platform({make_xpu("CPU", 0)});
  const auto trace =
      simulate(graph, platform, chain3_deployment(),
               SimConfig::uniform(platform, SchedMode::kFpPreemptive));
  const std::string jsonl = trace_to_jsonl(trace);
  std::size_t lines = 0;
  for (char ch : jsonl) {
    if (ch == '\n') lines++;
  }
  CHECK(lines == trace.segments.size());
  CHECK(jsonl.find("\"node_id\"") != std::string::npos);
  CHECK(jsonl.find("\"kind\"") != std::string::npos);
}

TEST_CASE("[sim] gantt renderings are deterministic and structured") {
  SimulationTrace empty;
  const std::string empty_text = render_gantt_text(empty);
  CHECK_FALSE(empty_text.empty());
  CHECK(render_gantt_text(empty) == empty_text);
  const std::string empty_svg = render_gantt_svg(empty);
  CHECK(empty_svg.find("<svg") != std::string::npos);
  CHECK(empty_svg.find("</svg>") != std::string::npos);

  const auto graph = chain3();
  const auto platform = make_platform({make_xpu("CPU", 0)});
  const auto trace =
      simulate(graph, platform, chain3_deployment(),
               SimConfig::uniform(platform, SchedMode::kFpPreemptive));
  const std::string text = render_gantt_text(trace);
  CHECK(text.find("CPU0") != std::string::npos);
  CHECK(text.find("x") != std::string::npos);
  CHECK(text.find("z") != std::string::npos);

  // Two lanes with overlapping-in-time segments both get rendered.
  SimulationTrace overlap;
  overlap.segments.push_back({"infer", "GPU", 0, 0, 100, SegmentKind::kRun});
  overlap.segments.push_back({"offload", "DLA", 0, 50, 150, SegmentKind::kRun});
  overlap.makespan = 150;
  const std::string two_lane = render_gantt_text(overlap);
  CHECK(two_lane.find("GPU0") != std::string::npos);
  CHECK(two_lane.find("DLA0") != std::string::npos);
}

TEST_CASE("[sim] event simulation matches the tick-by-tick oracle") {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    CAPTURE(seed);
    const MicroCase c = make_micro_case(seed);
    const auto event = simulate(c.graph, c.platform, c.deployment, c.config);
    const auto ticks = tick_simulate(c.graph, c.platform, c.deployment, c.config);
    REQUIRE(event == ticks);
    REQUIRE(trace_to_jsonl(event) == trace_to_jsonl(ticks));
  }
}
