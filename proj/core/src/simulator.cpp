#include "xsched/simulator.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace xsched {

using nlohmann::json;

std::string to_string(SchedMode mode) {
  switch (mode) {
    case SchedMode::kFpPreemptive: return "fp";
    case SchedMode::kFpNonPreemptive: return "fp-nonpreempt";
    case SchedMode::kRoundRobin: return "rr";
  }
  return "?";
}

std::string to_string(SegmentKind kind) {
  switch (kind) {
    case SegmentKind::kRun: return "run";
    case SegmentKind::kPreemptOverhead: return "preempt_overhead";
    case SegmentKind::kRestoreOverhead: return "restore_overhead";
  }
  return "?";
}

SimConfig SimConfig::uniform(const PlatformConfig& platform, SchedMode mode,
                             bool apply_overheads) {
  SimConfig config;
  config.apply_overheads = apply_overheads;
  for (const auto& xpu : platform.xpus) config.modes[xpu.xpu_type] = mode;
  return config;
}

namespace {

constexpr Micros kNoTime = -1;

struct SimTask {
  int idx = 0;
  const XNodeSpec* node = nullptr;
  int priority = 0;
  Micros wcet = 0;
  Micros remaining = 0;
  int instance = 0;
  int preds_left = 0;
  std::vector<int> succs;
  Micros release = kNoTime;
  Micros finish = kNoTime;
  bool started = false;
  bool needs_restore = false;
};

struct SimInstance {
  const XpuInstance* xpu = nullptr;
  SchedMode mode = SchedMode::kFpPreemptive;

  enum class Act { kIdle, kRun, kOverhead } act = Act::kIdle;
  int current = -1;
  Micros seg_start = 0;
  Micros seg_end = 0;
  SegmentKind overhead_kind = SegmentKind::kPreemptOverhead;
  int overhead_task = -1;

  // Fixed-priority ready queue, ordered highest priority first. Priorities
  // are unique, so (-priority) alone is a strict order; the task index is
  // carried for lookups.
  std::set<std::pair<int, int>> ready;

  // Round-robin state. Tasks released while a slice is in flight wait in
  // `pending` and join the cycle at the next slice boundary, ordered by
  // (release time, node index); the task whose slice just expired re-enters
  // the cycle after them.
  std::deque<int> cycle;
  std::vector<std::pair<Micros, int>> pending;
  int expired_current = -1;

  // Bookkeeping for restore overheads: a restore is only honored when the
  // matching task is dispatched the instant the restore segment ends;
  // otherwise it was wasted and the task pays again later.
  int last_restore_task = -1;
  Micros last_restore_end = kNoTime;

  int preempt_count = 0;
};

struct RawSegment {
  int instance;
  int task;
  SegmentKind kind;
  Micros start;
  Micros end;
};

class Simulation {
 public:
  Simulation(const ApplicationGraph& graph, const PlatformConfig& platform,
             const DeploymentConfig& deployment, const SimConfig& config)
      : config_(config) {
    graph_ = graph;
    graph_.normalize();
    platform_ = platform;
    platform_.normalize();

    if (auto report = validate(graph_); !report.valid()) {
      throw std::invalid_argument("simulate: invalid graph: " + report.to_string());
    }
    if (auto report = validate(deployment, graph_, platform_); !report.valid()) {
      throw std::invalid_argument("simulate: invalid deployment: " + report.to_string());
    }

    for (const auto& xpu : platform_.xpus) {
      auto it = config_.modes.find(xpu.xpu_type);
      if (it == config_.modes.end()) {
        throw std::invalid_argument("simulate: no scheduling mode for type '" +
                                    xpu.xpu_type + "'");
      }
      SimInstance inst;
      inst.xpu = &xpu;
      inst.mode = it->second;
      // A non-preemptible instance cannot honor preemptive dispatch.
      if (inst.mode == SchedMode::kFpPreemptive && !xpu.preemptive) {
        inst.mode = SchedMode::kFpNonPreemptive;
      }
      if (inst.mode == SchedMode::kRoundRobin && xpu.rr_quantum <= 0) {
        throw std::invalid_argument("simulate: round-robin requires rr_quantum > 0 on " +
                                    xpu.label());
      }
      instances_.push_back(inst);
    }

    std::map<std::string, int> index_of;
    for (std::size_t i = 0; i < graph_.nodes.size(); ++i) {
      index_of[graph_.nodes[i].node_id] = static_cast<int>(i);
    }
    tasks_.resize(graph_.nodes.size());
    for (std::size_t i = 0; i < graph_.nodes.size(); ++i) {
      const XNodeSpec& node = graph_.nodes[i];
      const NodeAssignment* a = deployment.find(node.node_id);
      SimTask& task = tasks_[i];
      task.idx = static_cast<int>(i);
      task.node = &node;
      task.priority = a->priority;
      task.wcet = *node.wcet_on(a->xpu_type);
      task.remaining = task.wcet;
      task.instance = instance_index(a->xpu_type, a->instance_id);
    }
    for (const auto& [from, to] : graph_.edges) {
      tasks_[index_of[to]].preds_left++;
      tasks_[index_of[from]].succs.push_back(index_of[to]);
    }
  }

  SimulationTrace run() {
    // Sources release at t = 0.
    for (auto& task : tasks_) {
      if (task.preds_left == 0) release_task(task.idx, 0);
    }

    Micros t = 0;
    for (;;) {
      for (auto& inst : instances_) dispatch(inst, t);

      Micros next = std::numeric_limits<Micros>::max();
      for (const auto& inst : instances_) {
        if (inst.act != SimInstance::Act::kIdle) next = std::min(next, inst.seg_end);
      }
      if (next == std::numeric_limits<Micros>::max()) break;

      t = next;
      std::vector<int> released;
      for (auto& inst : instances_) handle_endings(inst, t, released);
      std::sort(released.begin(), released.end());
      for (int idx : released) release_task(idx, t);
    }

    return build_trace();
  }

 private:
  int instance_index(const XpuType& type, int instance_id) const {
    for (std::size_t i = 0; i < instances_.size(); ++i) {
      const auto& xpu = *instances_[i].xpu;
      if (xpu.xpu_type == type && xpu.instance_id == instance_id) {
        return static_cast<int>(i);
      }
    }
    throw std::invalid_argument("simulate: unknown instance");
  }

  void release_task(int idx, Micros t) {
    SimTask& task = tasks_[idx];
    task.release = t;
    SimInstance& inst = instances_[task.instance];
    if (inst.mode == SchedMode::kRoundRobin) {
      inst.pending.emplace_back(t, idx);
    } else {
      inst.ready.insert({-task.priority, idx});
    }
  }

  void emit(const SimInstance& inst, int task, SegmentKind kind, Micros start,
            Micros end) {
    if (end > start) {
      raw_.push_back({static_cast<int>(&inst - instances_.data()), task, kind,
                      start, end});
    }
  }

  void handle_endings(SimInstance& inst, Micros t, std::vector<int>& released) {
    if (inst.act == SimInstance::Act::kIdle || inst.seg_end != t) return;

    if (inst.act == SimInstance::Act::kOverhead) {
      emit(inst, inst.overhead_task, inst.overhead_kind, inst.seg_start, t);
      if (inst.overhead_kind == SegmentKind::kRestoreOverhead) {
        inst.last_restore_task = inst.overhead_task;
        inst.last_restore_end = t;
      }
      inst.act = SimInstance::Act::kIdle;
      inst.overhead_task = -1;
      return;
    }

    SimTask& task = tasks_[inst.current];
    task.remaining -= t - inst.seg_start;
    emit(inst, task.idx, SegmentKind::kRun, inst.seg_start, t);
    inst.act = SimInstance::Act::kIdle;
    inst.current = -1;

    if (task.remaining == 0) {
      task.finish = t;
      for (int succ : task.succs) {
        if (--tasks_[succ].preds_left == 0) released.push_back(succ);
      }
    } else {
      // Round-robin slice expired; the task re-enters the cycle at the
      // boundary handled by the next dispatch.
      inst.expired_current = task.idx;
    }
  }

  // Returns the highest-priority ready task without removing it.
  int peek_ready(const SimInstance& inst) const {
    return inst.ready.empty() ? -1 : inst.ready.begin()->second;
  }

  void start_run(SimInstance& inst, int idx, Micros t, Micros duration) {
    SimTask& task = tasks_[idx];
    inst.act = SimInstance::Act::kRun;
    inst.current = idx;
    inst.seg_start = t;
    inst.seg_end = t + duration;
    task.started = true;
  }

  void start_overhead(SimInstance& inst, int idx, SegmentKind kind, Micros t,
                      Micros duration) {
    inst.act = SimInstance::Act::kOverhead;
    inst.overhead_kind = kind;
    inst.overhead_task = idx;
    inst.seg_start = t;
    inst.seg_end = t + duration;
  }

  void dispatch(SimInstance& inst, Micros t) {
    if (inst.act == SimInstance::Act::kOverhead) return;  // overheads are atomic

    if (inst.mode == SchedMode::kRoundRobin) {
      dispatch_rr(inst, t);
      return;
    }

    // Preemption: only in preemptive mode, only when a strictly higher
    // priority task is waiting.
    if (inst.act == SimInstance::Act::kRun) {
      if (inst.mode != SchedMode::kFpPreemptive) return;
      const int top = peek_ready(inst);
      if (top < 0 || tasks_[top].priority <= tasks_[inst.current].priority) return;

      SimTask& victim = tasks_[inst.current];
      victim.remaining -= t - inst.seg_start;
      emit(inst, victim.idx, SegmentKind::kRun, inst.seg_start, t);
      victim.needs_restore = true;
      inst.ready.insert({-victim.priority, victim.idx});
      inst.current = -1;
      inst.act = SimInstance::Act::kIdle;
      inst.preempt_count++;
      if (config_.apply_overheads && inst.xpu->preempt_overhead > 0) {
        start_overhead(inst, victim.idx, SegmentKind::kPreemptOverhead, t,
                       inst.xpu->preempt_overhead);
        return;
      }
    }

    if (inst.act != SimInstance::Act::kIdle) return;
    const int top = peek_ready(inst);
    if (top < 0) return;

    SimTask& task = tasks_[top];
    const bool wants_restore = config_.apply_overheads && task.needs_restore &&
                               inst.xpu->restore_overhead > 0;
    if (wants_restore &&
        !(inst.last_restore_task == top && inst.last_restore_end == t)) {
      // Pay the restore first; the task stays queued and the dispatcher
      // re-evaluates when the overhead ends.
      start_overhead(inst, top, SegmentKind::kRestoreOverhead, t,
                     inst.xpu->restore_overhead);
      return;
    }
    task.needs_restore = false;
    inst.ready.erase(inst.ready.begin());
    start_run(inst, top, t, task.remaining);
  }

  void dispatch_rr(SimInstance& inst, Micros t) {
    if (inst.act == SimInstance::Act::kRun) return;

    // Slice boundary: waiting tasks join in (release, node index) order,
    // then the task whose slice just expired re-enters at the tail.
    std::sort(inst.pending.begin(), inst.pending.end());
    for (const auto& [release, idx] : inst.pending) inst.cycle.push_back(idx);
    inst.pending.clear();
    if (inst.expired_current >= 0) {
      inst.cycle.push_back(inst.expired_current);
      inst.expired_current = -1;
    }
    if (inst.cycle.empty()) return;

    const int idx = inst.cycle.front();
    inst.cycle.pop_front();
    SimTask& task = tasks_[idx];
    start_run(inst, idx, t, std::min(inst.xpu->rr_quantum, task.remaining));
  }

  SimulationTrace build_trace() {
    SimulationTrace trace;

    // Merge back-to-back pieces of the same task (consecutive round-robin
    // slices when the cycle has one member) per instance, then sort into
    // the canonical order.
    std::stable_sort(raw_.begin(), raw_.end(),
                     [](const RawSegment& a, const RawSegment& b) {
                       return std::tie(a.instance, a.start) < std::tie(b.instance, b.start);
                     });
    std::vector<RawSegment> merged;
    for (const auto& seg : raw_) {
      if (!merged.empty()) {
        RawSegment& last = merged.back();
        if (last.instance == seg.instance && last.task == seg.task &&
            last.kind == seg.kind && last.end == seg.start) {
          last.end = seg.end;
          continue;
        }
      }
      merged.push_back(seg);
    }
    for (const auto& seg : merged) {
      const XpuInstance& xpu = *instances_[seg.instance].xpu;
      trace.segments.push_back({tasks_[seg.task].node->node_id, xpu.xpu_type,
                                xpu.instance_id, seg.start, seg.end, seg.kind});
    }
    std::sort(trace.segments.begin(), trace.segments.end(),
              [](const TraceSegment& a, const TraceSegment& b) {
                return std::tie(a.start, a.xpu_type, a.instance_id, a.node_id, a.kind) <
                       std::tie(b.start, b.xpu_type, b.instance_id, b.node_id, b.kind);
              });

    std::set<std::string> with_succ;
    for (const auto& [from, to] : graph_.edges) with_succ.insert(from);
    for (const auto& task : tasks_) {
      if (task.finish == kNoTime) {
        throw std::logic_error("simulate: task never finished: " + task.node->node_id);
      }
      trace.release[task.node->node_id] = task.release;
      trace.finish[task.node->node_id] = task.finish;
      if (!with_succ.count(task.node->node_id)) {
        trace.makespan = std::max(trace.makespan, task.finish);
      }
    }
    for (const auto& inst : instances_) {
      trace.preemptions[inst.xpu->label()] = inst.preempt_count;
    }
    return trace;
  }

  SimConfig config_;
  ApplicationGraph graph_;
  PlatformConfig platform_;
  std::vector<SimInstance> instances_;
  std::vector<SimTask> tasks_;
  std::vector<RawSegment> raw_;
};

}  // namespace

SimulationTrace simulate(const ApplicationGraph& graph,
                         const PlatformConfig& platform,
                         const DeploymentConfig& deployment,
                         const SimConfig& config) {
  return Simulation(graph, platform, deployment, config).run();
}

std::string InvariantReport::to_string() const {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += '\n';
    out += v;
  }
  return out;
}

InvariantReport check_trace(const SimulationTrace& trace,
                            const ApplicationGraph& graph,
                            const PlatformConfig& platform,
                            const DeploymentConfig& deployment,
                            const SimConfig& config) {
  InvariantReport report;
  auto fail = [&report](std::string msg) { report.violations.push_back(std::move(msg)); };

  // Per-instance, time-sorted view of the segments.
  std::map<std::pair<XpuType, int>, std::vector<const TraceSegment*>> by_instance;
  std::map<std::string, Micros> run_time;
  std::map<std::string, Micros> first_start, last_end;
  for (const auto& seg : trace.segments) {
    if (seg.end <= seg.start) {
      fail("empty or reversed segment for '" + seg.node_id + "'");
      continue;
    }
    by_instance[{seg.xpu_type, seg.instance_id}].push_back(&seg);
    if (seg.kind == SegmentKind::kRun) {
      run_time[seg.node_id] += seg.end - seg.start;
      auto [it, fresh] = first_start.emplace(seg.node_id, seg.start);
      if (!fresh) it->second = std::min(it->second, seg.start);
      last_end[seg.node_id] = std::max(last_end[seg.node_id], seg.end);
    }
    if (!config.apply_overheads && seg.kind != SegmentKind::kRun) {
      fail("overhead segment present with overheads disabled");
    }
  }

  // Conservation: total run time equals the wcet of the deployed impl, and
  // every run lands on the assigned instance.
  for (const auto& node : graph.nodes) {
    const NodeAssignment* a = deployment.find(node.node_id);
    if (a == nullptr) {
      fail("node '" + node.node_id + "' missing from deployment");
      continue;
    }
    auto wcet = node.wcet_on(a->xpu_type);
    if (!wcet) {
      fail("node '" + node.node_id + "' deployed on unsupported type");
      continue;
    }
    if (run_time[node.node_id] != *wcet) {
      fail("node '" + node.node_id + "' ran " + std::to_string(run_time[node.node_id]) +
           " us, wcet is " + std::to_string(*wcet));
    }
  }
  for (const auto& seg : trace.segments) {
    const NodeAssignment* a = deployment.find(seg.node_id);
    if (a == nullptr) {
      fail("segment for unknown node '" + seg.node_id + "'");
    } else if (seg.kind == SegmentKind::kRun &&
               (a->xpu_type != seg.xpu_type || a->instance_id != seg.instance_id)) {
      fail("node '" + seg.node_id + "' ran on " + seg.xpu_type +
           std::to_string(seg.instance_id) + " instead of its assignment");
    }
  }

  // No overlap per instance.
  for (auto& [key, segs] : by_instance) {
    std::sort(segs.begin(), segs.end(), [](const TraceSegment* a, const TraceSegment* b) {
      return a->start < b->start;
    });
    for (std::size_t i = 0; i + 1 < segs.size(); ++i) {
      if (segs[i]->end > segs[i + 1]->start) {
        fail("overlapping segments on " + key.first + std::to_string(key.second));
      }
    }
  }

  // Precedence: a node must not start before every predecessor finished.
  for (const auto& [from, to] : graph.edges) {
    auto fin = trace.finish.find(from);
    auto start = first_start.find(to);
    if (fin == trace.finish.end()) {
      fail("predecessor '" + from + "' has no finish time");
    } else if (start != first_start.end() && start->second < fin->second) {
      fail("node '" + to + "' starts before predecessor '" + from + "' finishes");
    }
  }

  // Work conservation and priority ordering on fixed-priority instances.
  std::map<std::string, const XNodeSpec*> node_of;
  for (const auto& node : graph.nodes) node_of[node.node_id] = &node;
  for (const auto& xpu : platform.xpus) {
    auto mode_it = config.modes.find(xpu.xpu_type);
    if (mode_it == config.modes.end()) {
      fail("no mode configured for type '" + xpu.xpu_type + "'");
      continue;
    }
    SchedMode mode = mode_it->second;
    if (mode == SchedMode::kFpPreemptive && !xpu.preemptive) {
      mode = SchedMode::kFpNonPreemptive;
    }
    if (mode == SchedMode::kRoundRobin) continue;

    // Tasks deployed on this instance.
    struct LocalTask {
      std::string id;
      int priority;
      Micros release, finish;
    };
    std::vector<LocalTask> local;
    for (const auto& a : deployment.assignments) {
      if (a.xpu_type != xpu.xpu_type || a.instance_id != xpu.instance_id) continue;
      auto rel = trace.release.find(a.node_id);
      auto fin = trace.finish.find(a.node_id);
      if (rel == trace.release.end() || fin == trace.finish.end()) {
        fail("node '" + a.node_id + "' missing release/finish in trace");
        continue;
      }
      local.push_back({a.node_id, a.priority, rel->second, fin->second});
    }

    const auto segs_it = by_instance.find({xpu.xpu_type, xpu.instance_id});
    const std::vector<const TraceSegment*> empty;
    const auto& segs = segs_it == by_instance.end() ? empty : segs_it->second;

    // Idle gaps while one of this instance's tasks is ready.
    Micros cursor = 0;
    auto check_gap = [&](Micros gap_start, Micros gap_end) {
      if (gap_end <= gap_start) return;
      for (const auto& task : local) {
        if (task.release < gap_end && task.finish > gap_start) {
          fail(xpu.label() + " idles in [" + std::to_string(gap_start) + ", " +
               std::to_string(gap_end) + ") while '" + task.id + "' is ready");
          return;
        }
      }
    };
    for (const auto* seg : segs) {
      check_gap(cursor, seg->start);
      cursor = std::max(cursor, seg->end);
    }
    Micros horizon = 0;
    for (const auto& task : local) horizon = std::max(horizon, task.finish);
    check_gap(cursor, horizon);

    // Priority: while x runs, no strictly higher-priority ready task may
    // wait. Non-preemptive dispatch only answers for what was ready when
    // the segment started.
    for (const auto* seg : segs) {
      if (seg->kind != SegmentKind::kRun) continue;
      const auto self = std::find_if(local.begin(), local.end(),
                                     [&](const LocalTask& t) { return t.id == seg->node_id; });
      if (self == local.end()) continue;  // reported above
      for (const auto& other : local) {
        if (other.priority <= self->priority) continue;
        const bool waiting =
            mode == SchedMode::kFpPreemptive
                ? (other.release < seg->end && other.finish > seg->start)
                : (other.release <= seg->start && other.finish > seg->start);
        if (waiting) {
          fail("'" + seg->node_id + "' runs on " + xpu.label() + " at " +
               std::to_string(seg->start) + " while higher-priority '" + other.id +
               "' is ready");
        }
      }
    }
  }

  return report;
}

std::string trace_to_jsonl(const SimulationTrace& trace) {
  std::string out;
  for (const auto& seg : trace.segments) {
    json j{{"node_id", seg.node_id},     {"xpu_type", seg.xpu_type},
           {"instance_id", seg.instance_id}, {"start", seg.start},
           {"end", seg.end},             {"kind", to_string(seg.kind)}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace xsched
