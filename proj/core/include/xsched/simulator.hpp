#pragma once

#include <map>
#include <string>
#include <vector>

#include "xsched/deployment.hpp"
#include "xsched/graph.hpp"
#include "xsched/platform.hpp"

namespace xsched {

// How one processor class arbitrates between ready tasks.
//
// kFpPreemptive    highest priority runs; a newly released higher-priority
//                  task preempts the running one immediately.
// kFpNonPreemptive highest priority is dispatched at completion boundaries
//                  and then runs to completion.
// kRoundRobin     ready tasks share the instance in fixed rr_quantum slices,
//                  cycling in release order and ignoring priorities; tasks
//                  released while a slice is in flight join the cycle at the
//                  next slice boundary.
enum class SchedMode { kFpPreemptive, kFpNonPreemptive, kRoundRobin };

std::string to_string(SchedMode mode);

struct SimConfig {
  // Mode per processor class; every class present on the platform needs one.
  std::map<XpuType, SchedMode> modes;
  // When set, preemptions charge the instance preempt_overhead before the
  // preemptor starts and restore_overhead before the victim resumes.
  // Instances with preemptive == false never preempt in kFpPreemptive mode
  // (they fall back to non-preemptive dispatch).
  bool apply_overheads = false;

  static SimConfig uniform(const PlatformConfig& platform, SchedMode mode,
                           bool apply_overheads = false);
};

enum class SegmentKind { kRun, kPreemptOverhead, kRestoreOverhead };

std::string to_string(SegmentKind kind);

// Half-open occupancy interval [start, end) of one instance. Overhead
// segments carry the node that was preempted (kPreemptOverhead) or is about
// to resume (kRestoreOverhead).
struct TraceSegment {
  std::string node_id;
  XpuType xpu_type;
  int instance_id = 0;
  Micros start = 0;
  Micros end = 0;
  SegmentKind kind = SegmentKind::kRun;

  friend bool operator==(const TraceSegment&, const TraceSegment&) = default;
};

struct SimulationTrace {
  std::vector<TraceSegment> segments;  // canonical order, see simulate()
  std::map<std::string, Micros> release;  // node -> time all preds finished
  std::map<std::string, Micros> finish;   // node -> completion time
  std::map<std::string, int> preemptions; // instance label -> count
  Micros makespan = 0;  // max finish over sink nodes

  friend bool operator==(const SimulationTrace&, const SimulationTrace&) = default;
};

// Deterministic discrete-event simulation of one end-to-end activation:
// sources release at t = 0, every node runs exactly once on its assigned
// instance, successors release when all predecessors finished. Simultaneous
// events resolve finish-before-release, then by priority, then by node id.
// Adjacent same-kind segments are merged and the segment list is sorted by
// (start, xpu_type, instance_id, node_id, kind), which fixes the canonical
// serialization. Throws std::invalid_argument on an invalid deployment, a
// missing mode, or a round-robin instance without a positive quantum.
SimulationTrace simulate(const ApplicationGraph& graph,
                         const PlatformConfig& platform,
                         const DeploymentConfig& deployment,
                         const SimConfig& config);

struct InvariantReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

// Independent re-check of a trace: per-node run time equals the wcet of the
// deployed impl, segments on an instance never overlap, no node runs before
// its predecessors finish, no instance idles while one of its tasks is
// ready (fixed-priority modes), and a running task is never outprioritized
// by a ready one (modulo non-preemptive carry-over and overhead windows).
InvariantReport check_trace(const SimulationTrace& trace,
                            const ApplicationGraph& graph,
                            const PlatformConfig& platform,
                            const DeploymentConfig& deployment,
                            const SimConfig& config);

// One JSON object per segment, in canonical order; bit-stable.
std::string trace_to_jsonl(const SimulationTrace& trace);

// Gantt rendering, one lane per XPU instance that appears in the trace,
// run segments labeled with node ids, overhead segments hatched. Both
// renderings are deterministic; an empty trace yields header-only output.
std::string render_gantt_text(const SimulationTrace& trace);
std::string render_gantt_svg(const SimulationTrace& trace);

}  // namespace xsched
