#pragma once

#include "xsched/deployment.hpp"
#include "xsched/graph.hpp"
#include "xsched/platform.hpp"
#include "xsched/simulator.hpp"

namespace xsched::testsupport {

// Brute-force 1 us tick-by-tick reference scheduler. Implements the same
// dispatch rules as simulate() from scratch — no shared machinery beyond the
// public types — by advancing a global clock one microsecond at a time and
// re-evaluating every instance at every tick. Hopelessly slow for real
// workloads and exactly as authoritative as it is slow, which makes it the
// oracle of choice for cross-checking the event-driven simulator on small
// instances.
//
// Produces a SimulationTrace in the same canonical form (merged adjacent
// segments, canonical sort order, release/finish maps, per-instance
// preemption counts), so traces can be compared with == or byte-compared
// after serialization.
//
// Throws std::runtime_error if the simulation has not drained after
// max_ticks microseconds.
SimulationTrace tick_simulate(const ApplicationGraph& graph,
                              const PlatformConfig& platform,
                              const DeploymentConfig& deployment,
                              const SimConfig& config,
                              Micros max_ticks = 10'000'000);

}  // namespace xsched::testsupport
