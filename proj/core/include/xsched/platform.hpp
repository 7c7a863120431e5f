#pragma once

#include <optional>
#include <string>
#include <vector>

#include "xsched/graph.hpp"
#include "xsched/time.hpp"

namespace xsched {

// One schedulable processor. (xpu_type, instance_id) is unique within a
// platform. Overheads model the cost of a preemption: preempt_overhead
// occupies the instance before the preempting task starts, restore_overhead
// before a previously preempted task resumes.
struct XpuInstance {
  XpuType xpu_type;
  int instance_id = 0;
  bool preemptive = true;
  Micros preempt_overhead = 0;
  Micros restore_overhead = 0;
  Micros rr_quantum = 0;  // time slice for round-robin scheduling, > 0 to use

  // Short display name, e.g. "GPU0".
  std::string label() const;

  friend bool operator==(const XpuInstance&, const XpuInstance&) = default;
};

struct PlatformConfig {
  std::vector<XpuInstance> xpus;

  void normalize();  // sort by (xpu_type, instance_id)
  const XpuInstance* find(const XpuType& type, int instance_id) const;
  std::vector<const XpuInstance*> of_type(const XpuType& type) const;
  bool has_type(const XpuType& type) const;

  friend bool operator==(const PlatformConfig&, const PlatformConfig&) = default;
};

// Checks uniqueness of (type, instance_id) and non-negative durations.
ValidationReport validate(const PlatformConfig& platform);

// Desk-scale presets used throughout the benchmarks. GPU preemption costs
// 275 us and DLA preemption 132 us (restores are free); every instance uses
// a 1 ms round-robin quantum when simulated in round-robin mode.
PlatformConfig small_platform();  // 4 CPU + 1 GPU + 1 DLA
PlatformConfig large_platform();  // 8 CPU + 1 GPU + 2 DLA

// Preset lookup by name ("small" / "large"); nullopt for unknown names.
std::optional<PlatformConfig> platform_preset(const std::string& name);

}  // namespace xsched
