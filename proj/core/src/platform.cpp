#include "xsched/platform.hpp"

#include <algorithm>
#include <set>

namespace xsched {

std::string XpuInstance::label() const {
  return xpu_type + std::to_string(instance_id);
}

void PlatformConfig::normalize() {
  std::sort(xpus.begin(), xpus.end(), [](const XpuInstance& a, const XpuInstance& b) {
    return std::tie(a.xpu_type, a.instance_id) < std::tie(b.xpu_type, b.instance_id);
  });
}

const XpuInstance* PlatformConfig::find(const XpuType& type, int instance_id) const {
  for (const auto& xpu : xpus) {
    if (xpu.xpu_type == type && xpu.instance_id == instance_id) return &xpu;
  }
  return nullptr;
}

std::vector<const XpuInstance*> PlatformConfig::of_type(const XpuType& type) const {
  std::vector<const XpuInstance*> out;
  for (const auto& xpu : xpus) {
    if (xpu.xpu_type == type) out.push_back(&xpu);
  }
  return out;
}

bool PlatformConfig::has_type(const XpuType& type) const {
  return !of_type(type).empty();
}

ValidationReport validate(const PlatformConfig& platform) {
  ValidationReport report;
  if (platform.xpus.empty()) report.add("platform has no XPUs");
  std::set<std::pair<XpuType, int>> keys;
  for (const auto& xpu : platform.xpus) {
    if (xpu.xpu_type.empty()) report.add("XPU with empty type name");
    if (!keys.insert({xpu.xpu_type, xpu.instance_id}).second) {
      report.add("duplicate XPU instance " + xpu.label());
    }
    if (xpu.preempt_overhead < 0 || xpu.restore_overhead < 0 || xpu.rr_quantum < 0) {
      report.add("negative duration on " + xpu.label());
    }
  }
  return report;
}

namespace {

XpuInstance make_xpu(XpuType type, int id, Micros preempt_overhead,
                     Micros restore_overhead) {
  XpuInstance xpu;
  xpu.xpu_type = std::move(type);
  xpu.instance_id = id;
  xpu.preemptive = true;
  xpu.preempt_overhead = preempt_overhead;
  xpu.restore_overhead = restore_overhead;
  xpu.rr_quantum = 1000;
  return xpu;
}

}  // namespace

PlatformConfig small_platform() {
  PlatformConfig p;
  for (int i = 0; i < 4; ++i) p.xpus.push_back(make_xpu("CPU", i, 0, 0));
  p.xpus.push_back(make_xpu("GPU", 0, 275, 0));
  p.xpus.push_back(make_xpu("DLA", 0, 132, 0));
  p.normalize();
  return p;
}

PlatformConfig large_platform() {
  PlatformConfig p;
  for (int i = 0; i < 8; ++i) p.xpus.push_back(make_xpu("CPU", i, 0, 0));
  p.xpus.push_back(make_xpu("GPU", 0, 275, 0));
  for (int i = 0; i < 2; ++i) p.xpus.push_back(make_xpu("DLA", i, 132, 0));
  p.normalize();
  return p;
}

std::optional<PlatformConfig> platform_preset(const std::string& name) {
  if (name == "small") return small_platform();
  if (name == "large") return large_platform();
  return std::nullopt;
}

}  // namespace xsched
